//! Activity-weighted cyclopean synthesis of horizontally adjacent views.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::disparity::{estimate_disparity, DisparityConfig, DisparityMap};
use super::LcnError;
use crate::image::Plane;
use crate::lightfield::LightField;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ActivityConfig {
    /// Side of the square activity neighborhood (odd, >= 3).
    pub n: usize,
    /// Weight stabilizer.
    pub a1: f64,
    /// Keeps the log-activity non-negative.
    pub a2: f64,
}

impl Default for ActivityConfig {
    fn default() -> Self {
        ActivityConfig {
            n: 5,
            a1: 1e-3,
            a2: 1.0,
        }
    }
}

impl ActivityConfig {
    pub(crate) fn validate(&self) -> Result<(), LcnError> {
        if self.n < 3 || self.n.is_multiple_of(2) {
            return Err(LcnError::InvalidConfig(format!(
                "activity window must be odd and >= 3, got {}",
                self.n
            )));
        }
        if !(self.a1 > 0.0) || !(self.a2 > 0.0) {
            return Err(LcnError::InvalidConfig(
                "activity constants a1, a2 must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// `log2(var^2 + a2)` where `var` is the population variance of the
/// edge-clamped `n x n` neighborhood.
pub fn spatial_activity(img: &Plane, n: usize, a2: f64) -> Plane {
    let r = (n / 2) as isize;
    let count = (n * n) as f64;
    let mut window = Vec::with_capacity(n * n);
    Plane::from_fn(img.width(), img.height(), |x, y| {
        window.clear();
        for j in -r..=r {
            for i in -r..=r {
                window.push(img.get_clamped(x as isize + i, y as isize + j));
            }
        }
        let mean = window.iter().sum::<f64>() / count;
        let var = window.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / count;
        (var * var + a2).log2()
    })
}

/// Blend `left` with the disparity-compensated `right` view.
///
/// `C = W_l * left(s, t) + W_r * right(s + d, t)` with
/// `W_l = (e_l + a1) / (e_l + e_r + a1)` and `W_r = (e_r + a1) / (e_l + e_r + a1)`,
/// where `e_l`, `e_r` are the spatial activities at the matched positions.
pub fn synthesize_cyclopean(
    left: &Plane,
    right: &Plane,
    disparity: &DisparityMap,
    cfg: &ActivityConfig,
) -> Result<Plane, LcnError> {
    cfg.validate()?;
    let (w, h) = (left.width(), left.height());
    if right.width() != w
        || right.height() != h
        || disparity.width() != w
        || disparity.height() != h
    {
        return Err(LcnError::SizeMismatch);
    }
    let act_l = spatial_activity(left, cfg.n, cfg.a2);
    let act_r = spatial_activity(right, cfg.n, cfg.a2);
    Ok(Plane::from_fn(w, h, |x, y| {
        let (wl, wr) = blend_weights(&act_l, &act_r, disparity, cfg.a1, x, y);
        let xr = x as isize + disparity.get(x, y) as isize;
        wl * left.get(x, y) + wr * right.get_clamped(xr, y as isize)
    }))
}

#[inline]
fn blend_weights(
    act_l: &Plane,
    act_r: &Plane,
    disparity: &DisparityMap,
    a1: f64,
    x: usize,
    y: usize,
) -> (f64, f64) {
    let el = act_l.get(x, y);
    let er = act_r.get_clamped(x as isize + disparity.get(x, y) as isize, y as isize);
    let denom = el + er + a1;
    ((el + a1) / denom, (er + a1) / denom)
}

/// Blend weights at every pixel, exposed for checking the weight-sum bound.
pub fn cyclopean_weights(
    left: &Plane,
    right: &Plane,
    disparity: &DisparityMap,
    cfg: &ActivityConfig,
) -> (Plane, Plane, Plane, Plane) {
    let act_l = spatial_activity(left, cfg.n, cfg.a2);
    let act_r = spatial_activity(right, cfg.n, cfg.a2);
    let (w, h) = (left.width(), left.height());
    let wl = Plane::from_fn(w, h, |x, y| blend_weights(&act_l, &act_r, disparity, cfg.a1, x, y).0);
    let wr = Plane::from_fn(w, h, |x, y| blend_weights(&act_l, &act_r, disparity, cfg.a1, x, y).1);
    (wl, wr, act_l, act_r)
}

/// Sub-cyclopean images for every `u`-adjacent view pair: `(U-1) x V`.
#[derive(Debug, Clone)]
pub struct CyclopeanArray {
    u_count: usize,
    v_count: usize,
    images: Vec<Plane>,
}

impl CyclopeanArray {
    /// Pairs `(u, v)`-`(u+1, v)` in ascending `(v, u)` order.
    pub fn build(
        lf: &LightField,
        disparity: &DisparityConfig,
        activity: &ActivityConfig,
    ) -> Result<Self, LcnError> {
        if lf.u_count() < 2 {
            return Err(LcnError::NeedsTwoViews);
        }
        let u_count = lf.u_count() - 1;
        let v_count = lf.v_count();
        let images = (0..u_count * v_count)
            .into_par_iter()
            .map(|i| {
                let (u, v) = (i % u_count, i / u_count);
                let left = lf.view(u, v).as_plane();
                let right = lf.view(u + 1, v).as_plane();
                let d = estimate_disparity(left, right, disparity)?;
                synthesize_cyclopean(left, right, &d, activity)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(CyclopeanArray {
            u_count,
            v_count,
            images,
        })
    }

    pub fn u_count(&self) -> usize {
        self.u_count
    }

    pub fn v_count(&self) -> usize {
        self.v_count
    }

    /// Sub-cyclopean image from the pair `(u, v)`-`(u+1, v)`.
    pub fn get(&self, u: usize, v: usize) -> &Plane {
        &self.images[v * self.u_count + u]
    }

    pub fn images(&self) -> &[Plane] {
        &self.images
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn noise(w: usize, h: usize, lo: f64, hi: f64, seed: u64) -> Plane {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Plane::from_fn(w, h, |_, _| rng.gen_range(lo..hi))
    }

    #[test]
    fn activity_of_constant_is_log_a2() {
        let act = spatial_activity(&Plane::filled(9, 9, 42.0), 5, 1.0);
        assert!(act.data().iter().all(|&e| e == 0.0));
    }

    #[test]
    fn activity_checkerboard_interior() {
        let board = Plane::from_fn(9, 9, |x, y| if (x + y) % 2 == 0 { 255.0 } else { 0.0 });
        let act = spatial_activity(&board, 3, 1.0);
        // Interior 3x3 window holds 5 of one value and 4 of the other.
        let p: f64 = 5.0 / 9.0;
        let var = 255.0 * 255.0 * p * (1.0 - p);
        let want = (var * var + 1.0).log2();
        for y in 1..8 {
            for x in 1..8 {
                assert!((act.get(x, y) - want).abs() < 1e-9);
            }
        }
        assert!((want - 27.941_569_937).abs() < 1e-6);
    }

    #[test]
    fn activity_non_negative() {
        let img = noise(16, 16, 0.0, 255.0, 3);
        assert!(spatial_activity(&img, 5, 1.0).data().iter().all(|&e| e >= 0.0));
    }

    #[test]
    fn identical_views_reproduce_left() {
        let img = noise(32, 24, 0.0, 255.0, 11);
        let d = DisparityMap::zeros(32, 24);
        let c = synthesize_cyclopean(&img, &img, &d, &ActivityConfig::default()).unwrap();
        let worst = c
            .data()
            .iter()
            .zip(img.data())
            .map(|(a, b)| (a - b).abs() / 255.0)
            .fold(0.0, f64::max);
        assert!(worst <= 1e-3, "worst {worst}");
    }

    #[test]
    fn weight_sum_bound() {
        let l = noise(20, 20, 0.0, 255.0, 5);
        let r = noise(20, 20, 50.0, 60.0, 6);
        let d = DisparityMap::zeros(20, 20);
        let cfg = ActivityConfig::default();
        let (wl, wr, el, er) = cyclopean_weights(&l, &r, &d, &cfg);
        for i in 0..wl.data().len() {
            let sum = wl.data()[i] + wr.data()[i];
            let upper = 1.0 + cfg.a1 / (el.data()[i] + er.data()[i] + cfg.a1);
            assert!(sum >= 1.0 - 1e-12 && sum <= upper + 1e-12);
        }
    }

    #[test]
    fn offset_pair_blends_between() {
        let l = noise(24, 24, 20.0, 200.0, 9);
        let r = l.map(|v| v + 10.0);
        let d = DisparityMap::zeros(24, 24);
        let c = synthesize_cyclopean(&l, &r, &d, &ActivityConfig::default()).unwrap();
        for i in 0..c.data().len() {
            let (a, b) = (l.data()[i], r.data()[i]);
            assert!(c.data()[i] >= a.min(b) - 0.1 && c.data()[i] <= a.max(b) + 0.1);
        }
    }
}
