use serde::{Deserialize, Serialize};

/// Per-dimension training range; maps `min -> -1`, `max -> +1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingParams {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl ScalingParams {
    pub fn fit(rows: &[Vec<f64>]) -> Self {
        let dim = rows.first().map_or(0, Vec::len);
        let mut min = vec![f64::INFINITY; dim];
        let mut max = vec![f64::NEG_INFINITY; dim];
        for row in rows {
            for (k, &v) in row.iter().enumerate() {
                min[k] = min[k].min(v);
                max[k] = max[k].max(v);
            }
        }
        ScalingParams { min, max }
    }

    pub fn dim(&self) -> usize {
        self.min.len()
    }

    /// Affine map without clipping; constant dimensions map to 0.
    pub fn apply(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(self.min.iter().zip(&self.max))
            .map(|(&v, (&lo, &hi))| {
                if hi > lo {
                    2.0 * (v - lo) / (hi - lo) - 1.0
                } else {
                    0.0
                }
            })
            .collect()
    }
}

/// Fit on `rows` and return the scaled rows alongside the parameters.
pub fn scale_fit_apply(rows: &[Vec<f64>]) -> (ScalingParams, Vec<Vec<f64>>) {
    let params = ScalingParams::fit(rows);
    let scaled = rows.iter().map(|r| params.apply(r)).collect();
    (params, scaled)
}

pub fn scale_apply(params: &ScalingParams, row: &[f64]) -> Vec<f64> {
    params.apply(row)
}

/// Targets mapped onto `[0, 1]` by their training range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TargetScaling {
    pub min: f64,
    pub span: f64,
}

impl TargetScaling {
    pub fn fit(y: &[f64]) -> Self {
        let min = y.iter().copied().fold(f64::INFINITY, f64::min);
        let max = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        TargetScaling {
            min,
            span: max - min,
        }
    }

    pub fn forward(&self, y: f64) -> f64 {
        if self.span > 0.0 {
            (y - self.min) / self.span
        } else {
            0.0
        }
    }

    pub fn inverse(&self, z: f64) -> f64 {
        self.min + z * self.span
    }
}
