//! Integer horizontal disparity by exhaustive SSIM matching.

use serde::{Deserialize, Serialize};

use super::LcnError;
use crate::image::Plane;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DisparityConfig {
    /// Search range `[-d_max, d_max]` in pixels.
    pub d_max: usize,
    /// Side of the square SSIM window (odd).
    pub window: usize,
    /// Standard deviation of the Gaussian window weights.
    pub sigma: f64,
}

impl Default for DisparityConfig {
    fn default() -> Self {
        DisparityConfig {
            d_max: 4,
            window: 11,
            sigma: 1.5,
        }
    }
}

impl DisparityConfig {
    pub(crate) fn validate(&self) -> Result<(), LcnError> {
        if self.window.is_multiple_of(2) || self.window == 0 {
            return Err(LcnError::InvalidConfig(format!(
                "SSIM window must be odd, got {}",
                self.window
            )));
        }
        if !(self.sigma > 0.0) {
            return Err(LcnError::InvalidConfig(format!(
                "SSIM window sigma must be positive, got {}",
                self.sigma
            )));
        }
        Ok(())
    }
}

pub(crate) const SSIM_C1: f64 = (0.01 * 255.0) * (0.01 * 255.0);
pub(crate) const SSIM_C2: f64 = (0.03 * 255.0) * (0.03 * 255.0);

/// Per-pixel signed horizontal offsets into the right view.
#[derive(Debug, Clone, PartialEq)]
pub struct DisparityMap {
    width: usize,
    height: usize,
    d_max: usize,
    values: Vec<i32>,
}

impl DisparityMap {
    pub fn zeros(width: usize, height: usize) -> Self {
        DisparityMap {
            width,
            height,
            d_max: 0,
            values: vec![0; width * height],
        }
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> i32 {
        self.values[y * self.width + x]
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn d_max(&self) -> usize {
        self.d_max
    }

    pub fn values(&self) -> &[i32] {
        &self.values
    }
}

/// Normalized 1D Gaussian taps of length `size`.
pub(crate) fn gaussian_taps(size: usize, sigma: f64) -> Vec<f64> {
    let r = (size / 2) as f64;
    let raw: Vec<f64> = (0..size)
        .map(|i| {
            let x = i as f64 - r;
            (-x * x / (2.0 * sigma * sigma)).exp()
        })
        .collect();
    let sum: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / sum).collect()
}

/// Search order realizing the tie-break: `0, -1, 1, -2, 2, ...`.
fn search_order(d_max: usize) -> impl Iterator<Item = i32> {
    std::iter::once(0).chain((1..=d_max as i32).flat_map(|d| [-d, d]))
}

/// For each pixel, the shift `d` maximizing windowed SSIM between the left
/// window at `(s, t)` and the right window at `(s + d, t)`. Window samples
/// outside the image are edge-clamped. Ties resolve toward smaller `|d|`,
/// then toward negative `d`.
pub fn estimate_disparity(
    left: &Plane,
    right: &Plane,
    cfg: &DisparityConfig,
) -> Result<DisparityMap, LcnError> {
    cfg.validate()?;
    if left.width() != right.width() || left.height() != right.height() {
        return Err(LcnError::SizeMismatch);
    }
    let (w, h) = (left.width(), left.height());
    let r = cfg.window / 2;
    let taps = gaussian_taps(cfg.window, cfg.sigma);
    let pad = r + cfg.d_max;
    let we = w + 2 * pad;

    // Horizontally edge-extended copies; column `xe` maps to `clamp(xe - pad)`.
    let extend = |p: &Plane| -> Vec<f64> {
        let mut out = Vec::with_capacity(we * h);
        for y in 0..h {
            let row = p.row(y);
            out.extend((0..we).map(|xe| row[(xe as isize - pad as isize).clamp(0, w as isize - 1) as usize]));
        }
        out
    };
    let l_ext = extend(left);
    let r_ext = extend(right);

    // Vertical Gaussian pass with clamped rows, over the extended width.
    let vertical = |src: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; we * h];
        for y in 0..h {
            let dst = &mut out[y * we..(y + 1) * we];
            for (j, &wt) in taps.iter().enumerate() {
                let sy = (y as isize + j as isize - r as isize).clamp(0, h as isize - 1) as usize;
                let srow = &src[sy * we..(sy + 1) * we];
                for (d, &s) in dst.iter_mut().zip(srow) {
                    *d += wt * s;
                }
            }
        }
        out
    };
    // Horizontal pass evaluated at output column `x`, reading extended column
    // `x + pad + shift + i - r`.
    let horizontal = |src: &[f64], y: usize, x: usize, shift: i32| -> f64 {
        let base = (x + pad) as isize + shift as isize - r as isize;
        let row = &src[y * we..(y + 1) * we];
        taps.iter()
            .enumerate()
            .map(|(i, &wt)| wt * row[(base + i as isize) as usize])
            .sum()
    };

    let sq = |v: &[f64]| v.iter().map(|x| x * x).collect::<Vec<_>>();
    let vl = vertical(&l_ext);
    let vl2 = vertical(&sq(&l_ext));
    let vr = vertical(&r_ext);
    let vr2 = vertical(&sq(&r_ext));

    let mut best = vec![f64::NEG_INFINITY; w * h];
    let mut best_d = vec![0i32; w * h];
    let mut prod = vec![0.0; we * h];
    for d in search_order(cfg.d_max) {
        for y in 0..h {
            for xe in 0..we {
                let xr = xe as isize + d as isize;
                prod[y * we + xe] = if (0..we as isize).contains(&xr) {
                    l_ext[y * we + xe] * r_ext[y * we + xr as usize]
                } else {
                    0.0
                };
            }
        }
        let vlr = vertical(&prod);
        for y in 0..h {
            for x in 0..w {
                let mu_l = horizontal(&vl, y, x, 0);
                let mu_r = horizontal(&vr, y, x, d);
                let var_l = horizontal(&vl2, y, x, 0) - mu_l * mu_l;
                let var_r = horizontal(&vr2, y, x, d) - mu_r * mu_r;
                let cov = horizontal(&vlr, y, x, 0) - mu_l * mu_r;
                let ssim = ssim_from_moments(mu_l, mu_r, var_l, var_r, cov);
                let i = y * w + x;
                if ssim > best[i] {
                    best[i] = ssim;
                    best_d[i] = d;
                }
            }
        }
    }
    Ok(DisparityMap {
        width: w,
        height: h,
        d_max: cfg.d_max,
        values: best_d,
    })
}

#[inline]
pub(crate) fn ssim_from_moments(mu_x: f64, mu_y: f64, var_x: f64, var_y: f64, cov: f64) -> f64 {
    ((2.0 * mu_x * mu_y + SSIM_C1) * (2.0 * cov + SSIM_C2))
        / ((mu_x * mu_x + mu_y * mu_y + SSIM_C1) * (var_x + var_y + SSIM_C2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn textured(w: usize, h: usize, seed: u64) -> Plane {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let noise: Vec<f64> = (0..w * h).map(|_| rng.gen_range(0.0..255.0)).collect();
        Plane::new(w, h, noise).unwrap()
    }

    /// Direct windowed SSIM, one window at a time.
    fn direct(left: &Plane, right: &Plane, cfg: &DisparityConfig) -> Vec<i32> {
        let r = (cfg.window / 2) as isize;
        let taps = gaussian_taps(cfg.window, cfg.sigma);
        let mut out = Vec::new();
        for y in 0..left.height() as isize {
            for x in 0..left.width() as isize {
                let mut best = (f64::NEG_INFINITY, 0);
                for d in search_order(cfg.d_max) {
                    let (mut ml, mut mr, mut ll, mut rr, mut lr) = (0.0, 0.0, 0.0, 0.0, 0.0);
                    for j in -r..=r {
                        for i in -r..=r {
                            let wt = taps[(i + r) as usize] * taps[(j + r) as usize];
                            let a = left.get_clamped(x + i, y + j);
                            let b = right.get_clamped(x + d as isize + i, y + j);
                            ml += wt * a;
                            mr += wt * b;
                            ll += wt * a * a;
                            rr += wt * b * b;
                            lr += wt * a * b;
                        }
                    }
                    let s = ssim_from_moments(ml, mr, ll - ml * ml, rr - mr * mr, lr - ml * mr);
                    if s > best.0 + 1e-12 {
                        best = (s, d);
                    }
                }
                out.push(best.1);
            }
        }
        out
    }

    #[test]
    fn identical_views_give_zero() {
        let img = textured(24, 16, 1);
        let map = estimate_disparity(&img, &img, &DisparityConfig::default()).unwrap();
        assert!(map.values().iter().all(|&d| d == 0));
    }

    #[test]
    fn zero_search_range() {
        let a = textured(16, 16, 2);
        let b = textured(16, 16, 3);
        let cfg = DisparityConfig {
            d_max: 0,
            ..Default::default()
        };
        let map = estimate_disparity(&a, &b, &cfg).unwrap();
        assert!(map.values().iter().all(|&d| d == 0));
    }

    #[test]
    fn constant_images_tie_to_zero() {
        let a = Plane::filled(12, 12, 90.0);
        let map = estimate_disparity(&a, &a, &DisparityConfig::default()).unwrap();
        assert!(map.values().iter().all(|&d| d == 0));
    }

    #[test]
    fn matches_direct_window_search() {
        let left = textured(20, 14, 4);
        let right = Plane::from_fn(20, 14, |x, y| {
            left.get_clamped(x as isize - 2, y as isize) * 0.9 + 5.0 * ((x * y) % 3) as f64
        });
        let cfg = DisparityConfig {
            d_max: 3,
            window: 7,
            sigma: 1.5,
        };
        let fast = estimate_disparity(&left, &right, &cfg).unwrap();
        assert_eq!(fast.values(), direct(&left, &right, &cfg).as_slice());
    }

    #[test]
    fn size_mismatch() {
        let a = Plane::filled(8, 8, 0.0);
        let b = Plane::filled(9, 8, 0.0);
        assert!(matches!(
            estimate_disparity(&a, &b, &DisparityConfig::default()),
            Err(LcnError::SizeMismatch)
        ));
    }

    #[test]
    fn bounded_by_d_max() {
        let a = textured(20, 10, 7);
        let b = textured(20, 10, 8);
        let cfg = DisparityConfig {
            d_max: 2,
            ..Default::default()
        };
        let map = estimate_disparity(&a, &b, &cfg).unwrap();
        assert!(map.values().iter().all(|d| d.unsigned_abs() <= 2));
    }
}
