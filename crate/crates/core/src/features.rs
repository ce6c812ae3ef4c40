//! The final feature vector: LCN, GDD and WLBP segments concatenated under
//! a named, versioned layout.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gdd::{self, GddError};
use crate::lcn::{lcn_features, LcnConfig, LcnError};
use crate::lightfield::{LfError, LightField};
use crate::wlbp::{self, LbpConfig, WlbpError};

pub const LAYOUT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("LCN: {0}")]
    Lcn(#[from] LcnError),
    #[error("GDD: {0}")]
    Gdd(#[from] GddError),
    #[error("WLBP: {0}")]
    Wlbp(#[from] WlbpError),
    #[error(transparent)]
    Lf(#[from] LfError),
    #[error("no feature family enabled")]
    NothingEnabled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Families {
    pub lcn: bool,
    pub gdd: bool,
    pub wlbp: bool,
}

impl Default for Families {
    fn default() -> Self {
        Families {
            lcn: true,
            gdd: true,
            wlbp: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FeatureConfig {
    pub families: Families,
    pub lcn: LcnConfig,
    pub lbp: LbpConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureLayout {
    pub version: u32,
    pub names: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub layout: FeatureLayout,
    pub values: Vec<f64>,
}

/// Compute every enabled family, LCN first, then GDD, then WLBP.
pub fn extract_features(lf: &LightField, cfg: &FeatureConfig) -> Result<FeatureVector, FeatureError> {
    let f = cfg.families;
    if !(f.lcn || f.gdd || f.wlbp) {
        return Err(FeatureError::NothingEnabled);
    }
    let mut names = Vec::new();
    let mut values = Vec::new();
    if f.lcn {
        values.extend(lcn_features(lf, &cfg.lcn)?);
        names.extend(cfg.lcn.feature_names());
    }
    if f.gdd {
        let (orients, v) = gdd::gdd_features(lf)?;
        values.extend(v);
        names.extend(gdd::feature_names(&orients));
    }
    if f.wlbp {
        let (orients, v) = wlbp::wlbp_features(lf, &cfg.lbp)?;
        values.extend(v);
        names.extend(wlbp::feature_names(&orients, &cfg.lbp));
    }
    debug_assert_eq!(names.len(), values.len());
    Ok(FeatureVector {
        layout: FeatureLayout {
            version: LAYOUT_VERSION,
            names,
        },
        values,
    })
}
