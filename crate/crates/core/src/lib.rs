//! No-reference light-field image quality assessment.
//!
//! Three feature families are computed from a 4D light field:
//!
//! * [`lcn`]: naturalness statistics of the cyclopean image array built from
//!   horizontally adjacent views,
//! * [`gdd`]: global distribution of gradient directions on epipolar-plane
//!   images,
//! * [`wlbp`]: entropy-weighted local binary pattern histograms of EPIs.
//!
//! [`svr`] maps the concatenated features to quality scores and [`eval`]
//! runs the random-split evaluation protocol. [`synth`] generates a
//! desk-scale benchmark with controlled distortions.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod config;
pub mod eval;
pub mod features;
pub mod gdd;
pub mod image;
pub mod io;
pub mod lcn;
pub mod lightfield;
pub mod svr;
pub mod synth;
pub mod wlbp;

pub use image::{downsample2, Image, ImageError, Plane};
pub use lightfield::{extract_epis, EpiSlice, LfError, LightField, Orientation};
pub use config::RunConfig;
pub use features::{extract_features, FeatureConfig, FeatureError, FeatureLayout, FeatureVector};
