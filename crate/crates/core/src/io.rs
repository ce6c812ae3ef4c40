//! Reading and writing light fields as directories of sub-aperture images.
//!
//! A layout pattern is literal text with `{u}` and optionally `{v}` decimal
//! placeholders, e.g. `r{v}_c{u}.png`. Indices are taken relative to the
//! smallest index found, so both 0- and 1-based grids load.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use image::{DynamicImage, GrayImage};
use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::image::Image;
use crate::lightfield::{LfError, LightField};

/// BT.601 luma, unrounded.
#[inline]
pub fn luma(r: f64, g: f64, b: f64) -> f64 {
    0.299 * r + 0.587 * g + 0.114 * b
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColorPolicy {
    /// BT.601 weighted luma.
    #[default]
    Bt601,
    /// Unweighted channel mean.
    Mean,
}

impl ColorPolicy {
    fn apply(self, r: f64, g: f64, b: f64) -> f64 {
        match self {
            ColorPolicy::Bt601 => luma(r, g, b),
            ColorPolicy::Mean => (r + g + b) / 3.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LoadOptions {
    pub color: ColorPolicy,
    /// Significant bits in 16-bit containers (e.g. 10 for 10-bit video data
    /// stored in 16-bit PNG). `None` means the full 16 bits.
    pub source_bits: Option<u8>,
}

struct LayoutPattern {
    regex: Regex,
    u_group: usize,
    v_group: Option<usize>,
}

impl LayoutPattern {
    fn parse(pattern: &str) -> Result<Self, LfError> {
        let bad = || LfError::BadPattern(pattern.to_string());
        let mut re = String::from("^");
        let mut rest = pattern;
        let mut groups = Vec::new();
        while let Some(open) = rest.find('{') {
            re.push_str(&regex::escape(&rest[..open]));
            let close = rest[open..].find('}').ok_or_else(bad)? + open;
            match &rest[open + 1..close] {
                name @ ("u" | "v") if !groups.contains(&name) => groups.push(name),
                _ => return Err(bad()),
            }
            re.push_str(r"(\d+)");
            rest = &rest[close + 1..];
        }
        if rest.contains('}') {
            return Err(bad());
        }
        re.push_str(&regex::escape(rest));
        re.push('$');
        let u_group = groups.iter().position(|g| *g == "u").ok_or_else(bad)? + 1;
        let v_group = groups.iter().position(|g| *g == "v").map(|p| p + 1);
        Ok(LayoutPattern {
            regex: Regex::new(&re).map_err(|_| bad())?,
            u_group,
            v_group,
        })
    }

    fn indices(&self, name: &str) -> Option<(usize, usize)> {
        let caps = self.regex.captures(name)?;
        let u = caps[self.u_group].parse().ok()?;
        let v = match self.v_group {
            Some(g) => caps[g].parse().ok()?,
            None => 0,
        };
        Some((u, v))
    }

    fn render(pattern: &str, u: usize, v: usize) -> String {
        pattern
            .replace("{u}", &u.to_string())
            .replace("{v}", &v.to_string())
    }
}

/// Load a light field from `dir`, one file per view matching `pattern`.
pub fn load_lightfield(
    dir: &Path,
    pattern: &str,
    opts: LoadOptions,
) -> Result<LightField, LfError> {
    let layout = LayoutPattern::parse(pattern)?;
    let io_err = |source| LfError::Io {
        path: dir.display().to_string(),
        source,
    };
    let mut found: BTreeMap<(usize, usize), std::path::PathBuf> = BTreeMap::new();
    for entry in fs::read_dir(dir).map_err(io_err)? {
        let entry = entry.map_err(io_err)?;
        let name = entry.file_name();
        if let Some((u, v)) = name.to_str().and_then(|n| layout.indices(n)) {
            found.insert((v, u), entry.path());
        }
    }
    if found.is_empty() {
        return Err(LfError::NoMatches {
            dir: dir.display().to_string(),
            pattern: pattern.to_string(),
        });
    }
    let u_min = found.keys().map(|k| k.1).min().unwrap_or(0);
    let u_max = found.keys().map(|k| k.1).max().unwrap_or(0);
    let v_min = found.keys().map(|k| k.0).min().unwrap_or(0);
    let v_max = found.keys().map(|k| k.0).max().unwrap_or(0);
    let (u_count, v_count) = (u_max - u_min + 1, v_max - v_min + 1);

    let mut views = Vec::with_capacity(u_count * v_count);
    for v in 0..v_count {
        for u in 0..u_count {
            let path = found
                .get(&(v + v_min, u + u_min))
                .ok_or(LfError::MissingView { u, v })?;
            views.push(decode_view(path, opts)?);
        }
    }
    LightField::new(u_count, v_count, views)
}

fn decode_view(path: &Path, opts: LoadOptions) -> Result<Image, LfError> {
    let decode_err = |message: String| LfError::DecodeError {
        path: path.display().to_string(),
        message,
    };
    let img = image::open(path).map_err(|e| decode_err(e.to_string()))?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    let color = opts.color;
    let data: Vec<f64> = match &img {
        DynamicImage::ImageLuma8(g) => g.as_raw().iter().map(|&p| p as f64).collect(),
        DynamicImage::ImageLumaA8(_) => img
            .to_luma8()
            .as_raw()
            .iter()
            .map(|&p| p as f64)
            .collect(),
        DynamicImage::ImageRgb8(_) | DynamicImage::ImageRgba8(_) => img
            .to_rgb8()
            .as_raw()
            .chunks_exact(3)
            .map(|c| color.apply(c[0] as f64, c[1] as f64, c[2] as f64))
            .collect(),
        DynamicImage::ImageLuma16(_)
        | DynamicImage::ImageLumaA16(_)
        | DynamicImage::ImageRgb16(_)
        | DynamicImage::ImageRgba16(_) => {
            let bits = opts.source_bits.unwrap_or(16).clamp(1, 16) as u32;
            let full = ((1u32 << bits) - 1) as f64;
            let scale = 255.0 / full;
            let gray = matches!(
                img,
                DynamicImage::ImageLuma16(_) | DynamicImage::ImageLumaA16(_)
            );
            let raw: Vec<f64> = if gray {
                img.to_luma16().as_raw().iter().map(|&p| p as f64).collect()
            } else {
                img.to_rgb16()
                    .as_raw()
                    .chunks_exact(3)
                    .map(|c| color.apply(c[0] as f64, c[1] as f64, c[2] as f64))
                    .collect()
            };
            if let Some(&over) = raw.iter().find(|&&p| p > full + 1e-9) {
                return Err(decode_err(format!(
                    "sample {over} exceeds declared {bits}-bit range"
                )));
            }
            raw.into_iter().map(|p| p * scale).collect()
        }
        _ => img
            .to_rgb32f()
            .as_raw()
            .chunks_exact(3)
            .map(|c| {
                let y = color.apply(c[0] as f64, c[1] as f64, c[2] as f64) * 255.0;
                y.clamp(0.0, 255.0)
            })
            .collect(),
    };
    Image::new(w, h, data).map_err(|e| decode_err(e.to_string()))
}

/// Write every view as an 8-bit grayscale image (samples rounded).
pub fn save_lightfield(lf: &LightField, dir: &Path, pattern: &str) -> Result<(), LfError> {
    LayoutPattern::parse(pattern)?;
    fs::create_dir_all(dir).map_err(|source| LfError::Io {
        path: dir.display().to_string(),
        source,
    })?;
    for v in 0..lf.v_count() {
        for u in 0..lf.u_count() {
            let view = lf.view(u, v);
            let bytes = view.data().iter().map(|&p| p.round() as u8).collect();
            let gray = GrayImage::from_raw(view.width() as u32, view.height() as u32, bytes)
                .expect("buffer sized from view");
            let path = dir.join(LayoutPattern::render(pattern, u, v));
            gray.save(&path).map_err(|e| LfError::DecodeError {
                path: path.display().to_string(),
                message: e.to_string(),
            })?;
        }
    }
    Ok(())
}
