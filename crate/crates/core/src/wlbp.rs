//! Entropy-weighted rotation-invariant uniform LBP histograms over EPIs.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gdd::shannon_bits;
use crate::lightfield::{extract_epis, EpiSlice, LfError, LightField, Orientation};

#[derive(Debug, Error)]
pub enum WlbpError {
    #[error("EPI {width}x{height} is too small for radius {radius}")]
    TooSmall {
        width: usize,
        height: usize,
        radius: usize,
    },
    #[error("no label maps to aggregate")]
    EmptyInput,
    #[error("no EPI orientation has enough views for the LBP ladder (need {needed})")]
    NoUsableEpis { needed: usize },
    #[error("invalid LBP configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Lf(#[from] LfError),
}

/// One `(R, P, T)` rung of the multiresolution ladder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LbpRung {
    pub radius: usize,
    pub points: usize,
    pub threshold: f64,
}

impl LbpRung {
    pub fn bins(&self) -> usize {
        self.points + 2
    }

    fn validate(&self) -> Result<(), WlbpError> {
        if self.radius < 1 || self.points < 4 || self.points > 32 || !(self.threshold >= 0.0) {
            return Err(WlbpError::InvalidConfig(format!(
                "rung R={} P={} T={} needs R >= 1, 4 <= P <= 32, T >= 0",
                self.radius, self.points, self.threshold
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LbpVariant {
    /// `P = 8R`, `T = R/2`.
    #[default]
    P8r,
    /// `P = max(3R, 4)`, `T = R/2`.
    P3r,
    /// Use `custom` verbatim.
    Custom,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LbpConfig {
    pub variant: LbpVariant,
    pub radii: Vec<usize>,
    pub custom: Vec<LbpRung>,
}

impl Default for LbpConfig {
    fn default() -> Self {
        LbpConfig {
            variant: LbpVariant::P8r,
            radii: vec![1, 2, 3],
            custom: Vec::new(),
        }
    }
}

impl LbpConfig {
    pub fn single(radius: usize, points: usize) -> Self {
        LbpConfig {
            variant: LbpVariant::Custom,
            radii: Vec::new(),
            custom: vec![LbpRung {
                radius,
                points,
                threshold: radius as f64 / 2.0,
            }],
        }
    }

    pub fn ladder(&self) -> Vec<LbpRung> {
        let rung = |radius: usize, points: usize| LbpRung {
            radius,
            points,
            threshold: radius as f64 / 2.0,
        };
        match self.variant {
            LbpVariant::P8r => self.radii.iter().map(|&r| rung(r, 8 * r)).collect(),
            LbpVariant::P3r => self.radii.iter().map(|&r| rung(r, (3 * r).max(4))).collect(),
            LbpVariant::Custom => self.custom.clone(),
        }
    }

    pub fn validate(&self) -> Result<(), WlbpError> {
        let ladder = self.ladder();
        if ladder.is_empty() {
            return Err(WlbpError::InvalidConfig("empty LBP ladder".into()));
        }
        ladder.iter().try_for_each(LbpRung::validate)
    }

    /// Smallest angular extent every rung can be evaluated on.
    pub fn min_extent(&self) -> usize {
        2 * self.ladder().iter().map(|r| r.radius).max().unwrap_or(1) + 1
    }
}

/// riu2 mapping of a `points`-bit circular sign pattern: the ones-count when
/// the pattern has at most two 0/1 transitions, otherwise `points + 1`.
#[inline]
pub fn riu2_label(bits: u32, points: usize) -> u16 {
    let mask = if points == 32 {
        u32::MAX
    } else {
        (1u32 << points) - 1
    };
    let bits = bits & mask;
    let rotated = ((bits >> 1) | ((bits & 1) << (points - 1))) & mask;
    if (bits ^ rotated).count_ones() <= 2 {
        bits.count_ones() as u16
    } else {
        points as u16 + 1
    }
}

/// Precomputed bilinear tap for one circular neighbor.
#[derive(Debug, Clone, Copy)]
struct Tap {
    dx: isize,
    dy: isize,
    w: [f64; 4],
}

fn neighbor_taps(radius: usize, points: usize) -> Vec<Tap> {
    let snap = |v: f64| {
        let r = v.round();
        if (v - r).abs() < 1e-9 {
            r
        } else {
            v
        }
    };
    (0..points)
        .map(|p| {
            let angle = 2.0 * std::f64::consts::PI * p as f64 / points as f64;
            let x = snap(radius as f64 * angle.cos());
            let y = snap(-(radius as f64) * angle.sin());
            let (x0, y0) = (x.floor(), y.floor());
            let (fx, fy) = (x - x0, y - y0);
            Tap {
                dx: x0 as isize,
                dy: y0 as isize,
                w: [
                    (1.0 - fx) * (1.0 - fy),
                    fx * (1.0 - fy),
                    (1.0 - fx) * fy,
                    fx * fy,
                ],
            }
        })
        .collect()
}

/// Labels for the interior of an EPI (a margin of `R` on every side).
#[derive(Debug, Clone, PartialEq)]
pub struct LbpLabelMap {
    width: usize,
    height: usize,
    points: usize,
    labels: Vec<u16>,
}

impl LbpLabelMap {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn labels(&self) -> &[u16] {
        &self.labels
    }

    /// Normalized label histogram with `P + 2` bins.
    pub fn histogram(&self) -> Vec<f64> {
        let mut h = vec![0.0; self.points + 2];
        for &l in &self.labels {
            h[l as usize] += 1.0;
        }
        let n = self.labels.len() as f64;
        h.iter_mut().for_each(|v| *v /= n);
        h
    }
}

/// Thresholded riu2 LBP of every interior pixel.
pub fn lbp_riu2(epi: &EpiSlice, rung: LbpRung) -> Result<LbpLabelMap, WlbpError> {
    rung.validate()?;
    let img = epi.pixels.as_plane();
    let (w, h, r) = (img.width(), img.height(), rung.radius);
    if w < 2 * r + 1 || h < 2 * r + 1 {
        return Err(WlbpError::TooSmall {
            width: w,
            height: h,
            radius: r,
        });
    }
    let taps = neighbor_taps(r, rung.points);
    let (iw, ih) = (w - 2 * r, h - 2 * r);
    let mut labels = Vec::with_capacity(iw * ih);
    for yc in r..h - r {
        for xc in r..w - r {
            let center = img.get(xc, yc);
            let mut bits = 0u32;
            for (p, tap) in taps.iter().enumerate() {
                let x0 = (xc as isize + tap.dx) as usize;
                let y0 = (yc as isize + tap.dy) as usize;
                let mut g = tap.w[0] * img.get(x0, y0);
                if tap.w[1] != 0.0 {
                    g += tap.w[1] * img.get(x0 + 1, y0);
                }
                if tap.w[2] != 0.0 {
                    g += tap.w[2] * img.get(x0, y0 + 1);
                }
                if tap.w[3] != 0.0 {
                    g += tap.w[3] * img.get(x0 + 1, y0 + 1);
                }
                if g - center >= rung.threshold {
                    bits |= 1 << p;
                }
            }
            labels.push(riu2_label(bits, rung.points));
        }
    }
    Ok(LbpLabelMap {
        width: iw,
        height: ih,
        points: rung.points,
        labels,
    })
}

/// Entropy-weighted mean of per-EPI label histograms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WlbpHistogram {
    pub bins: Vec<f64>,
    /// Set when every EPI had zero entropy and the plain mean was used.
    pub unweighted: bool,
}

/// Weighted aggregate of already-normalized histograms of equal length.
pub fn aggregate_histograms(hists: &[Vec<f64>]) -> Result<WlbpHistogram, WlbpError> {
    let first = hists.first().ok_or(WlbpError::EmptyInput)?;
    let mut acc = vec![0.0; first.len()];
    let mut total = 0.0;
    for h in hists {
        let w = shannon_bits(h);
        total += w;
        acc.iter_mut().zip(h).for_each(|(a, b)| *a += w * b);
    }
    if total > 0.0 {
        acc.iter_mut().for_each(|a| *a /= total);
        return Ok(WlbpHistogram {
            bins: acc,
            unweighted: false,
        });
    }
    let mut acc = vec![0.0; first.len()];
    for h in hists {
        acc.iter_mut().zip(h).for_each(|(a, b)| *a += b);
    }
    let n = hists.len() as f64;
    acc.iter_mut().for_each(|a| *a /= n);
    Ok(WlbpHistogram {
        bins: acc,
        unweighted: true,
    })
}

/// Entropy-weighted aggregation over the label maps of one rung and
/// orientation: `sum(w_i h_i) / sum(w_i)` with `w_i` the entropy of `h_i`.
pub fn wlbp_aggregate(maps: &[LbpLabelMap]) -> Result<WlbpHistogram, WlbpError> {
    let hists: Vec<Vec<f64>> = maps.iter().map(LbpLabelMap::histogram).collect();
    aggregate_histograms(&hists)
}

/// Orientations whose angular extent fits every rung, in feature order.
pub fn usable_orientations(lf: &LightField, cfg: &LbpConfig) -> Vec<Orientation> {
    let need = cfg.min_extent().max(3);
    Orientation::ALL
        .into_iter()
        .filter(|&o| lf.angular_extent(o) >= need)
        .collect()
}

pub fn feature_names(orientations: &[Orientation], cfg: &LbpConfig) -> Vec<String> {
    let ladder = cfg.ladder();
    let mut names = Vec::new();
    for o in orientations {
        for rung in &ladder {
            for b in 0..rung.bins() {
                names.push(format!(
                    "wlbp.{}.r{}p{}.{b}",
                    o.short_name(),
                    rung.radius,
                    rung.points
                ));
            }
        }
    }
    names
}

/// Aggregated histograms per `(orientation, rung)`, vertical first.
pub fn wlbp_histograms(
    lf: &LightField,
    cfg: &LbpConfig,
) -> Result<Vec<(Orientation, LbpRung, WlbpHistogram)>, WlbpError> {
    cfg.validate()?;
    let present = usable_orientations(lf, cfg);
    if present.is_empty() {
        return Err(WlbpError::NoUsableEpis {
            needed: cfg.min_extent().max(3),
        });
    }
    let ladder = cfg.ladder();
    let mut out = Vec::new();
    for o in present {
        let epis = extract_epis(lf, o)?;
        for &rung in &ladder {
            let hists = epis
                .par_iter()
                .map(|e| lbp_riu2(e, rung).map(|m| m.histogram()))
                .collect::<Result<Vec<_>, _>>()?;
            out.push((o, rung, aggregate_histograms(&hists)?));
        }
    }
    Ok(out)
}

/// Concatenated WLBP histograms and the orientations they cover.
pub fn wlbp_features(
    lf: &LightField,
    cfg: &LbpConfig,
) -> Result<(Vec<Orientation>, Vec<f64>), WlbpError> {
    let hists = wlbp_histograms(lf, cfg)?;
    let mut present: Vec<Orientation> = hists.iter().map(|h| h.0).collect();
    present.dedup();
    Ok((present, hists.into_iter().flat_map(|h| h.2.bins).collect()))
}
