//! Run configuration: one document holding every tunable, with defaults
//! for anything omitted and unknown keys rejected.

use serde::{Deserialize, Serialize};

use crate::eval::ProtocolConfig;
use crate::features::FeatureConfig;
use crate::svr::SvrGrid;
use crate::synth::BenchmarkConfig;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub features: FeatureConfig,
    pub svr: SvrGrid,
    pub protocol: ProtocolConfig,
    pub synth: BenchmarkConfig,
}
