//! Quality-metric evaluation: correlation metrics, logistic remapping and
//! the repeated random-split protocol.

mod dataset;
mod logistic;
mod metrics;
mod protocol;
mod significance;

use thiserror::Error;

pub use dataset::{
    is_feature_column, FeatureRecord, FeatureTable, LabeledDataset, LabeledRow, Polarity,
};
pub use logistic::{linear_fit, logistic_fit, Logistic5, LogisticFit};
pub use metrics::{average_ranks, lcc, outlier_ratio, rmse, srcc};
pub use protocol::{
    cross_dataset, median, run_protocol, split_indices, CrossReport, EvalReport, Metrics,
    ProtocolConfig, SplitUnit, TrialResult, OUTLIER_DEFINITION,
};
pub use significance::{significance_matrix, welch_sign};

use crate::svr::SvrError;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("need at least {min} values, got {len}")]
    TooShort { len: usize, min: usize },
    #[error("zero variance")]
    ZeroVariance,
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("need at least two samples per method")]
    InsufficientSamples,
    #[error("layout mismatch: {0}")]
    LayoutMismatch(String),
    #[error("duplicate item id `{0}`")]
    DuplicateId(String),
    #[error("CSV: {0}")]
    Csv(String),
    #[error(transparent)]
    Svr(#[from] SvrError),
}

impl From<csv::Error> for EvalError {
    fn from(e: csv::Error) -> Self {
        EvalError::Csv(e.to_string())
    }
}
