//! Mean-subtracted contrast-normalized coefficients.

use super::LcnError;
use crate::image::Plane;

/// Half-width of the 7x7 weighting window.
pub const MSCN_RADIUS: usize = 3;

/// 2D circularly symmetric Gaussian spanning three standard deviations on
/// each side, normalized to unit sum. Row-major, `(2r+1)^2` entries.
pub fn mscn_window() -> Vec<f64> {
    let r = MSCN_RADIUS as isize;
    let sigma = (2 * MSCN_RADIUS + 1) as f64 / 6.0;
    let mut w = Vec::with_capacity((2 * MSCN_RADIUS + 1).pow(2));
    for k in -r..=r {
        for l in -r..=r {
            let d2 = (k * k + l * l) as f64;
            w.push((-d2 / (2.0 * sigma * sigma)).exp());
        }
    }
    let sum: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= sum);
    w
}

/// `(C - mu) / (sigma + 1)` with Gaussian-weighted local mean and deviation.
///
/// Statistics are accumulated relative to the center sample so that flat
/// neighborhoods yield exactly zero.
pub fn mscn(img: &Plane) -> Result<Plane, LcnError> {
    let side = 2 * MSCN_RADIUS + 1;
    if img.width() < side || img.height() < side {
        return Err(LcnError::TooSmall {
            width: img.width(),
            height: img.height(),
            min: side,
        });
    }
    let window = mscn_window();
    let r = MSCN_RADIUS as isize;
    let mut patch = vec![0.0; window.len()];
    Ok(Plane::from_fn(img.width(), img.height(), |x, y| {
        let center = img.get(x, y);
        let mut idx = 0;
        for k in -r..=r {
            for l in -r..=r {
                patch[idx] = img.get_clamped(x as isize + l, y as isize + k) - center;
                idx += 1;
            }
        }
        let mean_dev: f64 = window.iter().zip(&patch).map(|(w, p)| w * p).sum();
        let var: f64 = window
            .iter()
            .zip(&patch)
            .map(|(w, p)| w * (p - mean_dev) * (p - mean_dev))
            .sum();
        -mean_dev / (var.sqrt() + 1.0)
    }))
}
