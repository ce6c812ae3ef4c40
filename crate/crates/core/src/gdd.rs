//! Global direction distribution of EPI gradients.

use rayon::prelude::*;
use thiserror::Error;

use crate::image::{Image, Plane};
use crate::lightfield::{extract_epis, EpiSlice, LfError, LightField, Orientation};

pub const BINS: usize = 360;

#[derive(Debug, Error)]
pub enum GddError {
    #[error("EPI {width}x{height} is smaller than the 3x3 gradient kernels")]
    TooSmall { width: usize, height: usize },
    #[error("no EPI orientation has an angular extent of at least 3 views")]
    NoUsableEpis,
    #[error(transparent)]
    Lf(#[from] LfError),
}

/// Horizontal-derivative kernel, applied by correlation.
pub const HX: [[f64; 3]; 3] = [[-1.0, 0.0, 1.0], [-2.0, 0.0, 2.0], [-1.0, 0.0, 1.0]];
/// Vertical-derivative kernel, applied by correlation.
pub const HY: [[f64; 3]; 3] = [[-1.0, -2.0, -1.0], [0.0, 0.0, 0.0], [1.0, 2.0, 1.0]];

/// Gradient directions in degrees, every value in `[-180, 180)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionMap(Plane);

impl DirectionMap {
    pub fn values(&self) -> &[f64] {
        self.0.data()
    }

    pub fn as_plane(&self) -> &Plane {
        &self.0
    }

    pub fn histogram(&self) -> DirectionHistogram {
        DirectionHistogram::from_directions(self.values())
    }
}

/// 360 unit-width bins; bin `b` covers `[b - 180, b - 179)` degrees.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionHistogram {
    mass: Vec<f64>,
}

impl DirectionHistogram {
    pub fn from_directions(dirs: &[f64]) -> Self {
        let mut counts = vec![0.0; BINS];
        for &d in dirs {
            counts[bin_of(d)] += 1.0;
        }
        let total = dirs.len() as f64;
        if total > 0.0 {
            counts.iter_mut().for_each(|c| *c /= total);
        }
        DirectionHistogram { mass: counts }
    }

    /// Normalized mass per bin.
    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn bin_start(bin: usize) -> f64 {
        bin as f64 - 180.0
    }

    /// Shannon entropy in bits, with `0 log 0 = 0`.
    pub fn entropy(&self) -> f64 {
        shannon_bits(&self.mass)
    }

    /// Mass of bins lying entirely within `tol` degrees of `center`,
    /// measured on the circle.
    pub fn mass_near(&self, center: f64, tol: f64) -> f64 {
        (0..BINS)
            .filter(|&b| {
                let lo = Self::bin_start(b);
                circular_distance(lo, center) <= tol && circular_distance(lo + 1.0, center) <= tol
            })
            .map(|b| self.mass[b])
            .sum()
    }

    /// Mean of several histograms, accumulated in the given order.
    pub fn average<'a>(hists: impl IntoIterator<Item = &'a DirectionHistogram>) -> Self {
        let mut mass = vec![0.0; BINS];
        let mut n = 0usize;
        for h in hists {
            mass.iter_mut().zip(&h.mass).for_each(|(a, b)| *a += b);
            n += 1;
        }
        if n > 0 {
            mass.iter_mut().for_each(|m| *m /= n as f64);
        }
        DirectionHistogram { mass }
    }
}

fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(360.0);
    d.min(360.0 - d)
}

pub(crate) fn shannon_bits(mass: &[f64]) -> f64 {
    -mass
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * p.log2())
        .sum::<f64>()
}

#[inline]
fn bin_of(deg: f64) -> usize {
    ((deg + 180.0).floor() as isize).clamp(0, BINS as isize - 1) as usize
}

fn correlate3(img: &Plane, kernel: &[[f64; 3]; 3], x: usize, y: usize) -> f64 {
    let mut acc = 0.0;
    for (j, row) in kernel.iter().enumerate() {
        for (i, &k) in row.iter().enumerate() {
            if k != 0.0 {
                acc += k * img.get_clamped(x as isize + i as isize - 1, y as isize + j as isize - 1);
            }
        }
    }
    acc
}

/// `(Ex, Ey)` responses of the derivative kernels, edge-clamped.
pub fn gradients(img: &Image) -> (Plane, Plane) {
    let p = img.as_plane();
    (
        Plane::from_fn(p.width(), p.height(), |x, y| correlate3(p, &HX, x, y)),
        Plane::from_fn(p.width(), p.height(), |x, y| correlate3(p, &HY, x, y)),
    )
}

/// `atan2(-Ey, Ex)` in degrees, folded into `[-180, 180)`.
pub fn gradient_direction_map(epi: &EpiSlice) -> Result<DirectionMap, GddError> {
    let img = &epi.pixels;
    if img.width() < 3 || img.height() < 3 {
        return Err(GddError::TooSmall {
            width: img.width(),
            height: img.height(),
        });
    }
    let (ex, ey) = gradients(img);
    let data = ex
        .data()
        .iter()
        .zip(ey.data())
        .map(|(&gx, &gy)| direction_deg(gx, gy))
        .collect();
    Ok(DirectionMap(
        Plane::new(img.width(), img.height(), data).expect("same shape as EPI"),
    ))
}

#[inline]
fn direction_deg(gx: f64, gy: f64) -> f64 {
    let d = (-gy).atan2(gx).to_degrees();
    if d >= 180.0 {
        -180.0
    } else if d == 0.0 {
        // Folds -0.0 into the 0 degree bin.
        0.0
    } else {
        d
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GddStats {
    pub mean: f64,
    pub entropy: f64,
    pub skewness: f64,
    pub kurtosis: f64,
}

impl GddStats {
    pub const NAMES: [&'static str; 4] = ["mean", "entropy", "skewness", "kurtosis"];

    pub fn to_array(self) -> [f64; 4] {
        [self.mean, self.entropy, self.skewness, self.kurtosis]
    }
}

/// Mean, 360-bin entropy, skewness and plain kurtosis of a direction map.
/// Zero-variance maps report skewness and kurtosis as 0.
pub fn gdd_stats(map: &DirectionMap) -> GddStats {
    let v = map.values();
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &x in v {
        let d = x - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    let (m2, m3, m4) = (m2 / n, m3 / n, m4 / n);
    let (skewness, kurtosis) = if m2 > 0.0 {
        (m3 / m2.powf(1.5), m4 / (m2 * m2))
    } else {
        (0.0, 0.0)
    };
    GddStats {
        mean,
        entropy: map.histogram().entropy(),
        skewness,
        kurtosis,
    }
}

/// Orientations with enough views for gradient kernels, in feature order.
pub fn usable_orientations(lf: &LightField) -> Vec<Orientation> {
    Orientation::ALL
        .into_iter()
        .filter(|&o| lf.angular_extent(o) >= 3)
        .collect()
}

pub fn feature_names(orientations: &[Orientation]) -> Vec<String> {
    orientations
        .iter()
        .flat_map(|o| {
            GddStats::NAMES
                .iter()
                .map(move |n| format!("gdd.{}.{n}", o.short_name()))
        })
        .collect()
}

/// Per-orientation statistics averaged over all EPIs.
pub fn orientation_stats(lf: &LightField, orientation: Orientation) -> Result<GddStats, GddError> {
    let epis = extract_epis(lf, orientation)?;
    let stats = epis
        .par_iter()
        .map(|e| gradient_direction_map(e).map(|m| gdd_stats(&m).to_array()))
        .collect::<Result<Vec<_>, _>>()?;
    let mut acc = [0.0; 4];
    for s in &stats {
        acc.iter_mut().zip(s).for_each(|(a, b)| *a += b);
    }
    let n = stats.len() as f64;
    Ok(GddStats {
        mean: acc[0] / n,
        entropy: acc[1] / n,
        skewness: acc[2] / n,
        kurtosis: acc[3] / n,
    })
}

/// Four averaged statistics per usable orientation, vertical then horizontal.
pub fn gdd_features(lf: &LightField) -> Result<(Vec<Orientation>, Vec<f64>), GddError> {
    let present = usable_orientations(lf);
    if present.is_empty() {
        return Err(GddError::NoUsableEpis);
    }
    let mut out = Vec::with_capacity(4 * present.len());
    for &o in &present {
        out.extend(orientation_stats(lf, o)?.to_array());
    }
    Ok((present, out))
}

/// Mean normalized direction histogram over all EPIs of one orientation.
pub fn mean_histogram(
    lf: &LightField,
    orientation: Orientation,
) -> Result<DirectionHistogram, GddError> {
    let hists = extract_epis(lf, orientation)?
        .par_iter()
        .map(|e| gradient_direction_map(e).map(|m| m.histogram()))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(DirectionHistogram::average(&hists))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn epi_from(w: usize, h: usize, f: impl Fn(usize, usize) -> f64) -> EpiSlice {
        EpiSlice {
            orientation: Orientation::Vertical,
            fixed_angular: 0,
            fixed_spatial: 0,
            pixels: Image::from_fn_clamped(w, h, f),
        }
    }

    fn interior_check(epi: &EpiSlice, ex_want: f64, ey_want: f64, dir_want: f64) {
        let (ex, ey) = gradients(&epi.pixels);
        let dirs = gradient_direction_map(epi).unwrap();
        let w = epi.pixels.width();
        for y in 1..epi.pixels.height() - 1 {
            for x in 1..w - 1 {
                assert_eq!(ex.get(x, y), ex_want);
                assert_eq!(ey.get(x, y), ey_want);
                assert_eq!(dirs.as_plane().get(x, y), dir_want);
            }
        }
    }

    #[test]
    fn ramps() {
        interior_check(&epi_from(10, 6, |t, _| t as f64), 8.0, 0.0, 0.0);
        interior_check(&epi_from(10, 6, |_, v| v as f64), 0.0, 8.0, -90.0);
        interior_check(&epi_from(10, 6, |t, v| (t + v) as f64), 8.0, 8.0, -45.0);
    }

    #[test]
    fn directions_in_range() {
        let epi = epi_from(16, 7, |x, y| ((x * 13 + y * 29) % 17) as f64 * 15.0);
        let map = gradient_direction_map(&epi).unwrap();
        assert!(map.values().iter().all(|&d| (-180.0..180.0).contains(&d)));
        let h = map.histogram();
        assert!((h.mass().iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn plus_180_folds_to_minus_180() {
        assert_eq!(direction_deg(-8.0, 0.0), -180.0);
        assert_eq!(direction_deg(-8.0, -0.0), -180.0);
        assert_eq!(direction_deg(0.0, 0.0), 0.0);
        assert_eq!(direction_deg(8.0, 0.0), 0.0);
    }

    #[test]
    fn too_small() {
        let epi = epi_from(10, 2, |_, _| 0.0);
        assert!(matches!(
            gradient_direction_map(&epi),
            Err(GddError::TooSmall { .. })
        ));
    }

    fn map_of(values: Vec<f64>) -> DirectionMap {
        let n = values.len();
        DirectionMap(Plane::new(n, 1, values).unwrap())
    }

    #[test]
    fn stats_of_constant_map() {
        let s = gdd_stats(&map_of(vec![0.0; 12]));
        assert_eq!(s.to_array(), [0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn stats_of_uniform_map() {
        let s = gdd_stats(&map_of((0..360).map(|b| b as f64 - 179.5).collect()));
        assert!((s.entropy - 360f64.log2()).abs() < 1e-12);
        assert!((s.entropy - 8.4919).abs() < 1e-4);
    }

    #[test]
    fn stats_of_two_values() {
        let s = gdd_stats(&map_of(vec![-90.0, 90.0, -90.0, 90.0]));
        assert_eq!(s.mean, 0.0);
        assert_eq!(s.entropy, 1.0);
        assert_eq!(s.skewness, 0.0);
        assert_eq!(s.kurtosis, 1.0);
    }

    #[test]
    fn mass_near_wraps() {
        let h = DirectionHistogram::from_directions(&[-179.5, 179.5, 1.5, 2.5, 90.0]);
        assert!((h.mass_near(-180.0, 2.0) - 0.4).abs() < 1e-12);
        assert!((h.mass_near(0.0, 2.0) - 0.2).abs() < 1e-12);
    }

    fn lf(u: usize, v: usize, f: impl Fn(usize, usize, usize, usize) -> f64) -> LightField {
        LightField::from_fn(u, v, |uu, vv| {
            Image::from_fn_clamped(12, 10, |s, t| f(uu, vv, s, t))
        })
        .unwrap()
    }

    #[test]
    fn feature_lengths() {
        let full = lf(5, 5, |u, v, s, t| ((u + 2 * v + 3 * s + 5 * t) % 31) as f64);
        let (present, f) = gdd_features(&full).unwrap();
        assert_eq!(f.len(), 8);
        assert_eq!(present, vec![Orientation::Vertical, Orientation::Horizontal]);

        let row = lf(5, 1, |u, _, s, t| ((u + 3 * s + 5 * t) % 31) as f64);
        let (present, f) = gdd_features(&row).unwrap();
        assert_eq!(f.len(), 4);
        assert_eq!(present, vec![Orientation::Horizontal]);

        let tiny = lf(2, 2, |_, _, _, _| 0.0);
        assert!(matches!(gdd_features(&tiny), Err(GddError::NoUsableEpis)));
    }

    #[test]
    fn constant_light_field_gives_zeros() {
        let flat = lf(4, 3, |_, _, _, _| 64.0);
        let (_, f) = gdd_features(&flat).unwrap();
        assert_eq!(f, vec![0.0; 8]);
    }

    proptest::proptest! {
        #[test]
        fn direction_maps_are_bounded_and_histograms_normalized(
            pixels in proptest::collection::vec(0.0f64..255.0, 9 * 7),
        ) {
            let epi = epi_from(9, 7, |x, y| pixels[y * 9 + x]);
            let map = gradient_direction_map(&epi).unwrap();
            proptest::prop_assert!(map.values().iter().all(|d| (-180.0..=180.0).contains(d)));
            let total: f64 = map.histogram().mass().iter().sum();
            proptest::prop_assert!((total - 1.0).abs() < 1e-9);
        }
    }
}
