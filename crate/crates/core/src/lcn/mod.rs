//! Spatial naturalness of the cyclopean image array.
//!
//! Adjacent horizontal views are fused into sub-cyclopean images, their MSCN
//! coefficients pooled, and an AGGD fitted per scale.

pub mod aggd;
pub mod cyclopean;
pub mod disparity;
pub mod mscn;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use aggd::{fit_aggd, AggdParams};
pub use cyclopean::{spatial_activity, synthesize_cyclopean, ActivityConfig, CyclopeanArray};
pub use disparity::{estimate_disparity, DisparityConfig, DisparityMap};
pub use mscn::{mscn, mscn_window};

use crate::image::Plane;
use crate::lightfield::LightField;

#[derive(Debug, Error)]
pub enum LcnError {
    #[error("left/right inputs differ in size")]
    SizeMismatch,
    #[error("cyclopean synthesis needs at least two horizontal views")]
    NeedsTwoViews,
    #[error("image {width}x{height} is too small (need {min}x{min})")]
    TooSmall {
        width: usize,
        height: usize,
        min: usize,
    },
    #[error("degenerate samples: {0}")]
    DegenerateSamples(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LcnConfig {
    pub disparity: DisparityConfig,
    pub activity: ActivityConfig,
    /// Pyramid levels to pool; 1 is full resolution, each further level
    /// halves the sub-cyclopean images once more.
    pub scales: Vec<u32>,
}

impl Default for LcnConfig {
    fn default() -> Self {
        LcnConfig {
            disparity: DisparityConfig::default(),
            activity: ActivityConfig::default(),
            scales: vec![1, 2],
        }
    }
}

impl LcnConfig {
    pub fn feature_names(&self) -> Vec<String> {
        self.scales
            .iter()
            .flat_map(|s| AggdParams::NAMES.iter().map(move |n| format!("lcn.s{s}.{n}")))
            .collect()
    }

    fn validate(&self) -> Result<(), LcnError> {
        if self.scales.is_empty() || self.scales.contains(&0) {
            return Err(LcnError::InvalidConfig(
                "scales must be a non-empty list of levels >= 1".into(),
            ));
        }
        self.disparity.validate()?;
        self.activity.validate()
    }
}

fn at_scale(img: &Plane, level: u32) -> Result<Plane, LcnError> {
    let mut out = img.clone();
    for _ in 1..level {
        out = out.downsample2().map_err(|_| LcnError::TooSmall {
            width: out.width(),
            height: out.height(),
            min: 2,
        })?;
    }
    Ok(out)
}

/// Pooled MSCN coefficients of every sub-cyclopean image at one level, in
/// ascending `(v, u)` pair order, row-major within each image.
pub fn pooled_mscn(array: &CyclopeanArray, level: u32) -> Result<Vec<f64>, LcnError> {
    let per_image = array
        .images()
        .par_iter()
        .map(|img| mscn(&at_scale(img, level)?).map(Plane::into_data))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(per_image.concat())
}

/// Six AGGD statistics per configured scale, scales in configured order.
pub fn lcn_features(lf: &LightField, cfg: &LcnConfig) -> Result<Vec<f64>, LcnError> {
    cfg.validate()?;
    let array = CyclopeanArray::build(lf, &cfg.disparity, &cfg.activity)?;
    let mut out = Vec::with_capacity(6 * cfg.scales.len());
    for &level in &cfg.scales {
        let samples = pooled_mscn(&array, level)?;
        out.extend(fit_aggd(&samples)?.to_array());
    }
    Ok(out)
}
