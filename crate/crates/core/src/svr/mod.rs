//! Epsilon-SVR with an RBF kernel.

mod grid;
mod scaling;
pub mod smo;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use grid::{grid_search, GridResult, SvrGrid};
pub use scaling::{scale_apply, scale_fit_apply, ScalingParams, TargetScaling};
pub use smo::{KernelMatrix, SolverReport};

pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum SvrError {
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("training data contains non-finite values")]
    NonFiniteInput,
    #[error("{rows} feature rows but {targets} targets")]
    LengthMismatch { rows: usize, targets: usize },
    #[error("feature layout mismatch: {0}")]
    LayoutMismatch(String),
    #[error("invalid hyperparameter: {0}")]
    InvalidParams(String),
    #[error("model JSON: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SvrParams {
    pub c: f64,
    pub gamma: f64,
    /// Tube half-width on targets scaled to `[0, 1]`.
    pub epsilon: f64,
    /// Stop when the maximal KKT violation drops to this.
    pub tol: f64,
    pub max_iter: u64,
}

impl Default for SvrParams {
    fn default() -> Self {
        SvrParams {
            c: 1.0,
            gamma: 1.0,
            epsilon: 0.1,
            tol: 1e-3,
            max_iter: 10_000_000,
        }
    }
}

impl SvrParams {
    fn validate(&self) -> Result<(), SvrError> {
        if !(self.c > 0.0) || !(self.gamma > 0.0) || !(self.epsilon >= 0.0) || !(self.tol > 0.0) {
            return Err(SvrError::InvalidParams(format!(
                "need C > 0, gamma > 0, epsilon >= 0, tol > 0 (got {self:?})"
            )));
        }
        Ok(())
    }
}

/// Trained regressor, self-contained for prediction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvrModel {
    pub version: u32,
    /// Feature names, in column order.
    pub layout: Vec<String>,
    pub scaling: ScalingParams,
    pub target: TargetScaling,
    pub gamma: f64,
    pub c: f64,
    pub epsilon: f64,
    /// Scaled feature rows with non-zero dual coefficients.
    pub support_vectors: Vec<Vec<f64>>,
    /// `alpha - alpha*` per support vector, on the scaled target.
    pub coefficients: Vec<f64>,
    pub bias: f64,
    pub solver: SolverReport,
}

pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub(crate) fn distance_matrix(rows: &[Vec<f64>]) -> Vec<f64> {
    let n = rows.len();
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let v = squared_distance(&rows[i], &rows[j]);
            d[i * n + j] = v;
            d[j * n + i] = v;
        }
    }
    d
}

pub(crate) fn rbf_from_distances(d: &[f64], gamma: f64) -> Vec<f64> {
    d.iter().map(|&v| (-gamma * v).exp()).collect()
}

fn check_inputs(x: &[Vec<f64>], y: &[f64]) -> Result<(), SvrError> {
    if x.is_empty() {
        return Err(SvrError::EmptyTrainingSet);
    }
    if x.len() != y.len() {
        return Err(SvrError::LengthMismatch {
            rows: x.len(),
            targets: y.len(),
        });
    }
    let dim = x[0].len();
    if x.iter().any(|r| r.len() != dim) {
        return Err(SvrError::LayoutMismatch("ragged feature rows".into()));
    }
    if x.iter().flatten().chain(y).any(|v| !v.is_finite()) {
        return Err(SvrError::NonFiniteInput);
    }
    Ok(())
}

/// Fit from rows already scaled by `scaling`, with their squared-distance
/// matrix precomputed.
pub(crate) fn train_prepared(
    scaled: &[Vec<f64>],
    distances: &[f64],
    y: &[f64],
    scaling: ScalingParams,
    layout: Vec<String>,
    params: &SvrParams,
) -> SvrModel {
    let target = TargetScaling::fit(y);
    let z: Vec<f64> = y.iter().map(|&v| target.forward(v)).collect();
    let kernel = rbf_from_distances(distances, params.gamma);
    let km = KernelMatrix {
        n: scaled.len(),
        values: &kernel,
    };
    let sol = smo::solve(&km, &z, params.c, params.epsilon, params.tol, params.max_iter);
    let (support_vectors, coefficients) = scaled
        .iter()
        .zip(&sol.coef)
        .filter(|(_, &c)| c != 0.0)
        .map(|(r, &c)| (r.clone(), c))
        .unzip();
    SvrModel {
        version: MODEL_VERSION,
        layout,
        scaling,
        target,
        gamma: params.gamma,
        c: params.c,
        epsilon: params.epsilon,
        support_vectors,
        coefficients,
        bias: sol.bias,
        solver: sol.report,
    }
}

/// Train on raw feature rows. Features are range-scaled to `[-1, 1]` and
/// targets to `[0, 1]`; both maps are stored in the model.
pub fn svr_train(
    x: &[Vec<f64>],
    y: &[f64],
    params: &SvrParams,
    layout: Vec<String>,
) -> Result<SvrModel, SvrError> {
    params.validate()?;
    check_inputs(x, y)?;
    if !layout.is_empty() && layout.len() != x[0].len() {
        return Err(SvrError::LayoutMismatch(format!(
            "{} layout names for {} features",
            layout.len(),
            x[0].len()
        )));
    }
    let (scaling, scaled) = scale_fit_apply(x);
    let d = distance_matrix(&scaled);
    Ok(train_prepared(&scaled, &d, y, scaling, layout, params))
}

impl SvrModel {
    /// Decision value on the scaled target for an already-scaled row.
    fn decision(&self, scaled: &[f64]) -> f64 {
        self.support_vectors
            .iter()
            .zip(&self.coefficients)
            .map(|(sv, &c)| c * (-self.gamma * squared_distance(sv, scaled)).exp())
            .sum::<f64>()
            + self.bias
    }

    pub fn predict(&self, row: &[f64]) -> Result<f64, SvrError> {
        if row.len() != self.scaling.dim() {
            return Err(SvrError::LayoutMismatch(format!(
                "model expects {} features, got {}",
                self.scaling.dim(),
                row.len()
            )));
        }
        Ok(self.target.inverse(self.decision(&self.scaling.apply(row))))
    }

    /// Predict after checking the caller's column names against the model's.
    pub fn predict_named(&self, names: &[String], row: &[f64]) -> Result<f64, SvrError> {
        if !self.layout.is_empty() && names != self.layout.as_slice() {
            return Err(SvrError::LayoutMismatch(
                "feature columns differ from the model layout".into(),
            ));
        }
        self.predict(row)
    }

    pub fn to_json(&self) -> Result<String, SvrError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self, SvrError> {
        let m: SvrModel = serde_json::from_str(s)?;
        if m.version != MODEL_VERSION {
            return Err(SvrError::LayoutMismatch(format!(
                "unsupported model version {}",
                m.version
            )));
        }
        Ok(m)
    }
}

pub fn svr_predict(model: &SvrModel, row: &[f64]) -> Result<f64, SvrError> {
    model.predict(row)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(c: f64, gamma: f64, epsilon: f64) -> SvrParams {
        SvrParams {
            c,
            gamma,
            epsilon,
            ..Default::default()
        }
    }

    #[test]
    fn constant_targets_predict_constant() {
        let x: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64, (i * i) as f64]).collect();
        let y = vec![3.25; 10];
        let m = svr_train(&x, &y, &params(1.0, 0.5, 0.1), vec![]).unwrap();
        assert!(m.support_vectors.is_empty());
        for probe in [[0.0, 0.0], [100.0, -4.0]] {
            assert_eq!(m.predict(&probe).unwrap(), 3.25);
        }
    }

    #[test]
    fn single_point_within_tube() {
        let m = svr_train(&[vec![1.0, 2.0]], &[4.5], &params(1.0, 1.0, 0.1), vec![]).unwrap();
        assert!((m.predict(&[1.0, 2.0]).unwrap() - 4.5).abs() <= 0.1);
    }

    #[test]
    fn no_support_vectors_predicts_bias() {
        let mut m = svr_train(&[vec![0.0]], &[0.0], &params(1.0, 1.0, 0.1), vec![]).unwrap();
        m.bias = 0.7;
        m.target = TargetScaling { min: 0.0, span: 1.0 };
        assert_eq!(m.predict(&[123.0]).unwrap(), 0.7);
    }

    #[test]
    fn smooth_function_fits_tube() {
        let x: Vec<Vec<f64>> = (0..200).map(|i| vec![i as f64 / 199.0 * 6.0]).collect();
        let y: Vec<f64> = x.iter().map(|r| r[0].sin()).collect();
        let m = svr_train(&x, &y, &params(10.0, 1.0, 0.01), vec![]).unwrap();
        assert!(m.solver.converged);
        let rmse = (x
            .iter()
            .zip(&y)
            .map(|(r, t)| (m.predict(r).unwrap() - t).powi(2))
            .sum::<f64>()
            / 200.0)
            .sqrt();
        // Tube half-width in target units is 0.01 * span(y) = 0.02.
        assert!(rmse <= 0.01 + 0.05, "rmse {rmse}");
        assert!(m.coefficients.iter().all(|c| c.abs() <= 10.0));
    }

    #[test]
    fn far_point_decays_to_bias() {
        let x = vec![vec![0.0], vec![1.0], vec![2.0]];
        let y = vec![0.0, 1.0, 0.5];
        let m = svr_train(&x, &y, &params(10.0, 50.0, 0.0), vec![]).unwrap();
        let far = m.predict(&[1000.0]).unwrap();
        assert_eq!(far, m.target.inverse(m.bias));
    }

    #[test]
    fn error_cases() {
        assert!(matches!(
            svr_train(&[], &[], &SvrParams::default(), vec![]),
            Err(SvrError::EmptyTrainingSet)
        ));
        assert!(matches!(
            svr_train(&[vec![f64::NAN]], &[1.0], &SvrParams::default(), vec![]),
            Err(SvrError::NonFiniteInput)
        ));
        let m = svr_train(&[vec![0.0, 1.0]], &[1.0], &SvrParams::default(), vec![]).unwrap();
        assert!(matches!(m.predict(&[1.0]), Err(SvrError::LayoutMismatch(_))));
    }

    #[test]
    fn json_roundtrip_is_bit_exact() {
        let x: Vec<Vec<f64>> = (0..30)
            .map(|i| vec![(i as f64 * 0.37).sin(), (i as f64 * 1.1).cos() / 3.0])
            .collect();
        let y: Vec<f64> = x.iter().map(|r| r[0] * 2.0 + r[1].exp()).collect();
        let m = svr_train(&x, &y, &params(4.0, 0.3, 0.05), vec!["a".into(), "b".into()]).unwrap();
        let back = SvrModel::from_json(&m.to_json().unwrap()).unwrap();
        assert_eq!(m, back);
        for r in &x {
            assert_eq!(m.predict(r).unwrap().to_bits(), back.predict(r).unwrap().to_bits());
        }
    }

    #[test]
    fn deterministic() {
        let x: Vec<Vec<f64>> = (0..40).map(|i| vec![(i as f64).sqrt(), (i % 7) as f64]).collect();
        let y: Vec<f64> = x.iter().map(|r| r[0] - r[1] * 0.3).collect();
        let a = svr_train(&x, &y, &params(2.0, 0.5, 0.1), vec![]).unwrap();
        let b = svr_train(&x, &y, &params(2.0, 0.5, 0.1), vec![]).unwrap();
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
    }
}
