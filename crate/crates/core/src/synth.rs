//! Desk-scale benchmark generator.
//!
//! Scenes are stacks of textured fronto-parallel planes; each plane shifts
//! by its disparity per unit of view offset, so every EPI is a union of
//! straight shears. Distortions mimic angular reconstruction errors
//! (nearest/linear view interpolation) and spatial ones (blur, block
//! quantisation) on a five-step ladder.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::image::{Image, Plane};
use crate::io::save_lightfield;
use crate::lightfield::{LfError, LightField};

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Lf(#[from] LfError),
    #[error("manifest: {0}")]
    Manifest(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneSpec {
    pub seed: u64,
    pub u: usize,
    pub v: usize,
    pub s: usize,
    pub t: usize,
    /// Texture detail in `[0, 1]`: more and finer sinusoid components.
    pub richness: f64,
    /// Disparity of each layer in pixels per view step, back to front.
    pub disparities: Vec<f64>,
}

impl SceneSpec {
    pub fn layers(&self) -> usize {
        self.disparities.len()
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |m: String| Err(SynthError::InvalidSpec(m));
        if self.u == 0 || self.v == 0 {
            return bad("view counts must be positive".into());
        }
        if self.s < 8 || self.t < 8 {
            return bad(format!("views {}x{} smaller than 8x8", self.s, self.t));
        }
        if self.disparities.is_empty() {
            return bad("at least one layer is required".into());
        }
        if !(0.0..=1.0).contains(&self.richness) {
            return bad(format!("richness {} outside [0, 1]", self.richness));
        }
        let bound = self.s.min(self.t) as f64 / 4.0;
        let views = self.u.max(self.v) as f64;
        for &d in &self.disparities {
            if !d.is_finite() || d.abs() * views >= bound {
                return bad(format!(
                    "|disparity {d}| x {views} views must stay below {bound} px"
                ));
            }
        }
        Ok(())
    }
}

struct Texture {
    /// (amplitude, fx, fy, phase)
    waves: Vec<(f64, f64, f64, f64)>,
}

impl Texture {
    fn random(rng: &mut ChaCha8Rng, richness: f64) -> Self {
        let n = 4 + (12.0 * richness).round() as usize;
        let f_max = 0.05 + 0.3 * richness;
        let mut waves: Vec<(f64, f64, f64, f64)> = (0..n)
            .map(|_| {
                let f = rng.gen_range(0.02..f_max);
                let theta = rng.gen_range(0.0..PI);
                let amp = rng.gen_range(0.3..1.0) / (1.0 + 8.0 * f);
                (amp, f * theta.cos(), f * theta.sin(), rng.gen_range(0.0..2.0 * PI))
            })
            .collect();
        let total: f64 = waves.iter().map(|w| w.0).sum();
        for w in &mut waves {
            w.0 /= total;
        }
        Texture { waves }
    }

    fn at(&self, x: f64, y: f64) -> f64 {
        let sum: f64 = self
            .waves
            .iter()
            .map(|&(a, fx, fy, ph)| a * (2.0 * PI * (fx * x + fy * y) + ph).sin())
            .sum();
        127.5 + 110.0 * sum
    }
}

struct Layer {
    disparity: f64,
    texture: Texture,
    /// Support rectangle `[x0, x1) x [y0, y1)` in centre-view coordinates;
    /// `None` covers the whole plane.
    rect: Option<(f64, f64, f64, f64)>,
}

/// Render a scene. The same spec always yields the same light field.
pub fn generate_scene(spec: &SceneSpec) -> Result<LightField, SynthError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (s, t) = (spec.s as f64, spec.t as f64);
    let layers: Vec<Layer> = spec
        .disparities
        .iter()
        .enumerate()
        .map(|(i, &disparity)| {
            let texture = Texture::random(&mut rng, spec.richness);
            let rect = (i > 0).then(|| {
                let w = rng.gen_range(0.3..0.55) * s;
                let h = rng.gen_range(0.3..0.55) * t;
                let x0 = rng.gen_range(0.1 * s..(0.9 * s - w).max(0.1 * s + 1.0)).floor();
                let y0 = rng.gen_range(0.1 * t..(0.9 * t - h).max(0.1 * t + 1.0)).floor();
                (x0, x0 + w.round(), y0, y0 + h.round())
            });
            Layer {
                disparity,
                texture,
                rect,
            }
        })
        .collect();
    let uc = (spec.u as f64 - 1.0) / 2.0;
    let vc = (spec.v as f64 - 1.0) / 2.0;
    let lf = LightField::from_fn(spec.u, spec.v, |u, v| {
        let (du, dv) = (u as f64 - uc, v as f64 - vc);
        let plane = Plane::from_fn(spec.s, spec.t, |x, y| {
            for layer in layers.iter().rev() {
                let lx = x as f64 - layer.disparity * du;
                let ly = y as f64 - layer.disparity * dv;
                let inside = layer
                    .rect
                    .is_none_or(|(x0, x1, y0, y1)| lx >= x0 && lx < x1 && ly >= y0 && ly < y1);
                if inside {
                    return layer.texture.at(lx, ly);
                }
            }
            unreachable!("the back layer covers the whole plane")
        });
        Image::from_fn_clamped(plane.width(), plane.height(), |x, y| plane.get(x, y))
    })?;
    Ok(lf)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistortionKind {
    /// Views dropped on a stride and replaced by the nearest kept view.
    Nn,
    /// Same drops, filled by linear interpolation between kept views.
    Linear,
    /// Per-view Gaussian blur.
    Gauss,
    /// Per-view 8x8 DCT coefficient quantisation.
    Quant,
}

impl DistortionKind {
    pub const ALL: [DistortionKind; 4] = [
        DistortionKind::Nn,
        DistortionKind::Linear,
        DistortionKind::Gauss,
        DistortionKind::Quant,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            DistortionKind::Nn => "nn",
            DistortionKind::Linear => "linear",
            DistortionKind::Gauss => "gauss",
            DistortionKind::Quant => "quant",
        }
    }

    pub fn is_angular(self) -> bool {
        matches!(self, DistortionKind::Nn | DistortionKind::Linear)
    }
}

impl fmt::Display for DistortionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for DistortionKind {
    type Err = SynthError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        DistortionKind::ALL
            .into_iter()
            .find(|k| k.tag() == s)
            .ok_or_else(|| SynthError::InvalidSpec(format!("unknown distortion kind {s:?}")))
    }
}

pub const MAX_LEVEL: u32 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistortionSpec {
    pub kind: DistortionKind,
    /// 0 is the identity; 1..=5 increase in severity.
    pub level: u32,
}

/// Indices kept when every `stride`-th view survives; the last view is
/// always kept so interpolation never extrapolates.
pub fn kept_views(count: usize, stride: usize) -> Vec<usize> {
    let mut kept: Vec<usize> = (0..count).step_by(stride.max(1)).collect();
    if kept.last() != Some(&(count - 1)) {
        kept.push(count - 1);
    }
    kept
}

/// For each index, the bracketing kept views and the weight of the upper one.
fn brackets(count: usize, kept: &[usize]) -> Vec<(usize, usize, f64)> {
    (0..count)
        .map(|i| {
            let hi_pos = kept.partition_point(|&k| k < i);
            let hi = kept[hi_pos];
            if hi == i {
                return (i, i, 0.0);
            }
            let lo = kept[hi_pos - 1];
            (lo, hi, (i - lo) as f64 / (hi - lo) as f64)
        })
        .collect()
}

/// Nearest kept view; ties go to the lower index.
fn nearest(count: usize, kept: &[usize]) -> Vec<usize> {
    brackets(count, kept)
        .into_iter()
        .map(|(lo, hi, w)| if w <= 0.5 { lo } else { hi })
        .collect()
}

fn angular(lf: &LightField, stride: usize, linear: bool) -> Result<LightField, SynthError> {
    let (nu, nv) = (lf.u_count(), lf.v_count());
    let (ku, kv) = (kept_views(nu, stride), kept_views(nv, stride));
    if !linear {
        let (mu, mv) = (nearest(nu, &ku), nearest(nv, &kv));
        return Ok(LightField::from_fn(nu, nv, |u, v| lf.view(mu[u], mv[v]).clone())?);
    }
    let (bu, bv) = (brackets(nu, &ku), brackets(nv, &kv));
    Ok(LightField::from_fn(nu, nv, |u, v| {
        let (u0, u1, wu) = bu[u];
        let (v0, v1, wv) = bv[v];
        if wu == 0.0 && wv == 0.0 {
            return lf.view(u, v).clone();
        }
        let taps = [
            (u0, v0, (1.0 - wu) * (1.0 - wv)),
            (u1, v0, wu * (1.0 - wv)),
            (u0, v1, (1.0 - wu) * wv),
            (u1, v1, wu * wv),
        ];
        Image::from_fn_clamped(lf.width(), lf.height(), |x, y| {
            taps.iter()
                .filter(|t| t.2 != 0.0)
                .map(|&(a, b, w)| w * lf.view(a, b).pixel(x, y))
                .sum()
        })
    })?)
}

fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    let r = (3.0 * sigma).ceil() as isize;
    let mut k: Vec<f64> = (-r..=r)
        .map(|i| (-(i * i) as f64 / (2.0 * sigma * sigma)).exp())
        .collect();
    let sum: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= sum);
    k
}

/// Separable Gaussian blur with edge clamping.
pub fn gaussian_blur(img: &Image, sigma: f64) -> Image {
    let k = gaussian_kernel(sigma);
    let r = (k.len() / 2) as isize;
    let p = img.as_plane();
    let h = Plane::from_fn(p.width(), p.height(), |x, y| {
        k.iter()
            .enumerate()
            .map(|(i, w)| w * p.get_clamped(x as isize + i as isize - r, y as isize))
            .sum()
    });
    Image::from_fn_clamped(p.width(), p.height(), |x, y| {
        k.iter()
            .enumerate()
            .map(|(i, w)| w * h.get_clamped(x as isize, y as isize + i as isize - r))
            .sum()
    })
}

fn dct8_matrix() -> [[f64; 8]; 8] {
    let mut m = [[0.0; 8]; 8];
    for (k, row) in m.iter_mut().enumerate() {
        let scale = if k == 0 { (1.0f64 / 8.0).sqrt() } else { (2.0f64 / 8.0).sqrt() };
        for (n, v) in row.iter_mut().enumerate() {
            *v = scale * (PI * (2 * n + 1) as f64 * k as f64 / 16.0).cos();
        }
    }
    m
}

/// Orthonormal 8x8 DCT, uniform quantisation of every coefficient with the
/// given step, inverse DCT. Partial border blocks are edge-padded.
pub fn block_quantize(img: &Image, step: f64) -> Image {
    let d = dct8_matrix();
    let p = img.as_plane();
    let (w, h) = (p.width(), p.height());
    let mut out = Plane::filled(w, h, 0.0);
    for by in (0..h).step_by(8) {
        for bx in (0..w).step_by(8) {
            let mut block = [[0.0; 8]; 8];
            for (y, row) in block.iter_mut().enumerate() {
                for (x, v) in row.iter_mut().enumerate() {
                    *v = p.get_clamped((bx + x) as isize, (by + y) as isize);
                }
            }
            // C = D B D^T
            let mut tmp = [[0.0; 8]; 8];
            for i in 0..8 {
                for j in 0..8 {
                    tmp[i][j] = (0..8).map(|k| d[i][k] * block[k][j]).sum();
                }
            }
            let mut coef = [[0.0; 8]; 8];
            for i in 0..8 {
                for j in 0..8 {
                    let c: f64 = (0..8).map(|k| tmp[i][k] * d[j][k]).sum();
                    coef[i][j] = (c / step).round() * step;
                }
            }
            // B = D^T C D
            for i in 0..8 {
                for j in 0..8 {
                    tmp[i][j] = (0..8).map(|k| d[k][i] * coef[k][j]).sum();
                }
            }
            for y in 0..8 {
                for x in 0..8 {
                    if by + y < h && bx + x < w {
                        let v: f64 = (0..8).map(|k| tmp[y][k] * d[k][x]).sum();
                        out.set(bx + x, by + y, v);
                    }
                }
            }
        }
    }
    Image::from_fn_clamped(w, h, |x, y| out.get(x, y))
}

pub fn apply_distortion(lf: &LightField, d: DistortionSpec) -> Result<LightField, SynthError> {
    if d.level > MAX_LEVEL {
        return Err(SynthError::InvalidSpec(format!(
            "level {} above {MAX_LEVEL}",
            d.level
        )));
    }
    if d.level == 0 {
        return Ok(lf.clone());
    }
    let level = d.level as f64;
    let per_view = |f: &dyn Fn(&Image) -> Image| -> Result<LightField, SynthError> {
        Ok(LightField::from_fn(lf.u_count(), lf.v_count(), |u, v| f(lf.view(u, v)))?)
    };
    match d.kind {
        DistortionKind::Nn => angular(lf, d.level as usize + 1, false),
        DistortionKind::Linear => angular(lf, d.level as usize + 1, true),
        DistortionKind::Gauss => per_view(&|img| gaussian_blur(img, 0.5 * level)),
        DistortionKind::Quant => per_view(&|img| block_quantize(img, 4.0 * level)),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BenchmarkConfig {
    pub seed: u64,
    pub n_scenes: usize,
    pub kinds: Vec<DistortionKind>,
    pub levels: Vec<u32>,
    pub u: usize,
    pub v: usize,
    pub s: usize,
    pub t: usize,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        BenchmarkConfig {
            seed: 0,
            n_scenes: 8,
            kinds: DistortionKind::ALL.to_vec(),
            levels: (1..=MAX_LEVEL).collect(),
            u: 7,
            v: 7,
            s: 64,
            t: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchItem {
    pub id: String,
    pub scene: usize,
    /// `None` for the pristine reference.
    pub kind: Option<DistortionKind>,
    pub level: u32,
    pub mos: f64,
}

impl BenchItem {
    pub fn scene_tag(&self) -> String {
        format!("scene{:02}", self.scene)
    }

    pub fn distortion_tag(&self) -> &'static str {
        self.kind.map_or("pristine", DistortionKind::tag)
    }
}

/// Ordinal quality label: 5 for pristine, one point lost per level.
pub fn pseudo_mos(level: u32) -> f64 {
    5.0 - level as f64
}

/// Benchmark description; light fields are rendered on demand.
#[derive(Debug, Clone, PartialEq)]
pub struct Benchmark {
    pub scenes: Vec<SceneSpec>,
    pub items: Vec<BenchItem>,
}

const LAYER_DISPARITIES: [f64; 9] = [-2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0];

fn random_scene(cfg: &BenchmarkConfig, index: usize) -> SceneSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index as u64);
    let n_layers = rng.gen_range(2..=3);
    let views = cfg.u.max(cfg.v) as f64;
    let bound = cfg.s.min(cfg.t) as f64 / 4.0;
    let mut pool: Vec<f64> = LAYER_DISPARITIES
        .iter()
        .copied()
        .filter(|d| d.abs() * views < bound)
        .collect();
    pool.shuffle(&mut rng);
    pool.truncate(n_layers);
    SceneSpec {
        seed: rng.gen(),
        u: cfg.u,
        v: cfg.v,
        s: cfg.s,
        t: cfg.t,
        richness: rng.gen_range(0.3..1.0),
        disparities: pool,
    }
}

pub fn build_benchmark(cfg: &BenchmarkConfig) -> Result<Benchmark, SynthError> {
    if cfg.n_scenes < 2 {
        return Err(SynthError::InvalidSpec("need at least two scenes".into()));
    }
    if let Some(&l) = cfg.levels.iter().find(|&&l| l == 0 || l > MAX_LEVEL) {
        return Err(SynthError::InvalidSpec(format!("level {l} outside 1..={MAX_LEVEL}")));
    }
    let scenes: Vec<SceneSpec> = (0..cfg.n_scenes).map(|i| random_scene(cfg, i)).collect();
    for s in &scenes {
        s.validate()?;
    }
    let mut items = Vec::new();
    for scene in 0..cfg.n_scenes {
        items.push(BenchItem {
            id: format!("scene{scene:02}_pristine"),
            scene,
            kind: None,
            level: 0,
            mos: pseudo_mos(0),
        });
        for &kind in &cfg.kinds {
            for &level in &cfg.levels {
                items.push(BenchItem {
                    id: format!("scene{scene:02}_{kind}_{level}"),
                    scene,
                    kind: Some(kind),
                    level,
                    mos: pseudo_mos(level),
                });
            }
        }
    }
    Ok(Benchmark { scenes, items })
}

pub const VIEW_PATTERN: &str = "r{v}_c{u}.png";

impl Benchmark {
    pub fn render(&self, item: &BenchItem) -> Result<LightField, SynthError> {
        let pristine = generate_scene(&self.scenes[item.scene])?;
        match item.kind {
            None => Ok(pristine),
            Some(kind) => apply_distortion(
                &pristine,
                DistortionSpec {
                    kind,
                    level: item.level,
                },
            ),
        }
    }

    /// Write every item under `dir/<id>/` as 8-bit PNG views, plus
    /// `dir/manifest.csv` with `id,scene,distortion,level,mos,path`.
    pub fn write(&self, dir: &Path) -> Result<(), SynthError> {
        std::fs::create_dir_all(dir).map_err(|e| SynthError::Manifest(e.to_string()))?;
        let mut pristine_cache: Vec<Option<LightField>> = vec![None; self.scenes.len()];
        let mut w = csv::Writer::from_path(dir.join("manifest.csv"))
            .map_err(|e| SynthError::Manifest(e.to_string()))?;
        let m = |e: csv::Error| SynthError::Manifest(e.to_string());
        w.write_record(["id", "scene", "distortion", "level", "mos", "path"])
            .map_err(m)?;
        for item in &self.items {
            let base = match &pristine_cache[item.scene] {
                Some(lf) => lf.clone(),
                None => {
                    let lf = generate_scene(&self.scenes[item.scene])?;
                    pristine_cache[item.scene] = Some(lf.clone());
                    lf
                }
            };
            let lf = match item.kind {
                None => base,
                Some(kind) => apply_distortion(&base, DistortionSpec { kind, level: item.level })?,
            };
            save_lightfield(&lf, &dir.join(&item.id), VIEW_PATTERN)?;
            w.write_record([
                item.id.clone(),
                item.scene_tag(),
                item.distortion_tag().to_string(),
                item.level.to_string(),
                item.mos.to_string(),
                item.id.clone(),
            ])
            .map_err(m)?;
        }
        w.flush().map_err(|e| SynthError::Manifest(e.to_string()))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lightfield::Orientation;

    fn spec(disparities: Vec<f64>) -> SceneSpec {
        SceneSpec {
            seed: 11,
            u: 7,
            v: 7,
            s: 64,
            t: 64,
            richness: 0.7,
            disparities,
        }
    }

    fn mse(a: &LightField, b: &LightField) -> f64 {
        let n = a.views().len() as f64;
        a.views()
            .iter()
            .zip(b.views())
            .map(|(x, y)| {
                x.data()
                    .iter()
                    .zip(y.data())
                    .map(|(p, q)| (p - q) * (p - q))
                    .sum::<f64>()
                    / x.data().len() as f64
            })
            .sum::<f64>()
            / n
    }

    #[test]
    fn same_seed_same_scene() {
        let a = generate_scene(&spec(vec![0.0, 1.5])).unwrap();
        let b = generate_scene(&spec(vec![0.0, 1.5])).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn single_layer_is_a_shear() {
        for k in [1i64, 2, -1] {
            let lf = generate_scene(&spec(vec![k as f64])).unwrap();
            for index in 0..lf.epi_count(Orientation::Horizontal) {
                let epi = lf.epi(Orientation::Horizontal, index).pixels;
                for u in 1..7 {
                    for s in 0..64i64 {
                        let src = s - k;
                        if (0..64).contains(&src) {
                            assert_eq!(
                                epi.pixel(s as usize, u),
                                epi.pixel(src as usize, u - 1),
                                "k={k} u={u} s={s}"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn frame_bound_is_enforced() {
        assert!(matches!(
            generate_scene(&spec(vec![2.5])),
            Err(SynthError::InvalidSpec(_))
        ));
        assert!(generate_scene(&spec(vec![])).is_err());
    }

    #[test]
    fn level_zero_is_identity() {
        let lf = generate_scene(&spec(vec![0.0, 1.0])).unwrap();
        for kind in DistortionKind::ALL {
            assert_eq!(apply_distortion(&lf, DistortionSpec { kind, level: 0 }).unwrap(), lf);
        }
        assert!(apply_distortion(&lf, DistortionSpec { kind: DistortionKind::Nn, level: 6 }).is_err());
    }

    #[test]
    fn nn_replicates_kept_views() {
        let lf = generate_scene(&spec(vec![0.0, 1.0])).unwrap();
        let out = apply_distortion(&lf, DistortionSpec { kind: DistortionKind::Nn, level: 2 }).unwrap();
        // Stride 3 keeps 0, 3, 6; view 1 copies 0, view 2 copies 3.
        assert_eq!(kept_views(7, 3), vec![0, 3, 6]);
        assert_eq!(out.view(1, 4).data(), lf.view(0, 3).data());
        assert_eq!(out.view(2, 0).data(), lf.view(3, 0).data());
        assert_eq!(out.view(3, 6).data(), lf.view(3, 6).data());
    }

    #[test]
    fn linear_interpolates_between_kept_views() {
        let lf = generate_scene(&spec(vec![1.0])).unwrap();
        let out = apply_distortion(&lf, DistortionSpec { kind: DistortionKind::Linear, level: 1 }).unwrap();
        let (a, b, c) = (lf.view(0, 0), lf.view(2, 0), out.view(1, 0));
        for i in 0..c.data().len() {
            assert!((c.data()[i] - 0.5 * (a.data()[i] + b.data()[i])).abs() < 1e-9);
        }
    }

    #[test]
    fn distortion_ladder_is_monotone() {
        let lf = generate_scene(&spec(vec![-1.0, 0.5, 1.5])).unwrap();
        for kind in DistortionKind::ALL {
            let errs: Vec<f64> = (0..=MAX_LEVEL)
                .map(|level| mse(&lf, &apply_distortion(&lf, DistortionSpec { kind, level }).unwrap()))
                .collect();
            assert_eq!(errs[0], 0.0);
            for w in errs.windows(2) {
                assert!(w[1] >= w[0], "{kind}: {errs:?}");
            }
        }
    }

    #[test]
    fn shapes_are_preserved() {
        let lf = generate_scene(&spec(vec![0.0, 1.0])).unwrap();
        for kind in DistortionKind::ALL {
            let out = apply_distortion(&lf, DistortionSpec { kind, level: 3 }).unwrap();
            assert_eq!((out.u_count(), out.v_count(), out.width(), out.height()), (7, 7, 64, 64));
        }
    }

    #[test]
    fn quantisation_with_tiny_step_is_near_identity() {
        let img = Image::from_fn_clamped(13, 9, |x, y| ((x * 37 + y * 11) % 256) as f64);
        let q = block_quantize(&img, 1e-9);
        for (a, b) in img.data().iter().zip(q.data()) {
            assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn benchmark_counts_and_labels() {
        let b = build_benchmark(&BenchmarkConfig::default()).unwrap();
        assert_eq!(b.items.len(), 168);
        assert_eq!(b, build_benchmark(&BenchmarkConfig::default()).unwrap());
        for scene in 0..8 {
            for kind in DistortionKind::ALL {
                let mos: Vec<f64> = b
                    .items
                    .iter()
                    .filter(|i| i.scene == scene && (i.kind == Some(kind) || i.kind.is_none()))
                    .map(|i| i.mos)
                    .collect();
                assert_eq!(mos, vec![5.0, 4.0, 3.0, 2.0, 1.0, 0.0]);
            }
        }
        assert!(build_benchmark(&BenchmarkConfig { n_scenes: 1, ..Default::default() }).is_err());
    }
}
