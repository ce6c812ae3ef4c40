use statrs::distribution::{ContinuousCDF, StudentsT};

use super::metrics::mean;
use super::EvalError;

fn var_sample(x: &[f64]) -> f64 {
    let m = mean(x);
    x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (x.len() - 1) as f64
}

/// Welch two-sample t-test: `1` if `a` has the significantly larger mean,
/// `-1` if smaller, `0` otherwise.
pub fn welch_sign(a: &[f64], b: &[f64], confidence: f64) -> Result<i8, EvalError> {
    if a.len() < 2 || b.len() < 2 {
        return Err(EvalError::InsufficientSamples);
    }
    let (ma, mb) = (mean(a), mean(b));
    let (va, vb) = (var_sample(a) / a.len() as f64, var_sample(b) / b.len() as f64);
    let se2 = va + vb;
    let diff = ma - mb;
    if se2 == 0.0 {
        return Ok(if diff > 0.0 {
            1
        } else if diff < 0.0 {
            -1
        } else {
            0
        });
    }
    let t = diff / se2.sqrt();
    let df = se2 * se2
        / (va * va / (a.len() - 1) as f64 + vb * vb / (b.len() - 1) as f64);
    let dist = StudentsT::new(0.0, 1.0, df).map_err(|e| EvalError::DegenerateInput(e.to_string()))?;
    let p = 2.0 * dist.sf(t.abs());
    Ok(if p < 1.0 - confidence {
        if t > 0.0 {
            1
        } else {
            -1
        }
    } else {
        0
    })
}

/// Pairwise significance of per-trial samples for `k` methods. Entry
/// `[i][j]` compares row method `i` against column method `j`.
pub fn significance_matrix(samples: &[Vec<f64>], confidence: f64) -> Result<Vec<Vec<i8>>, EvalError> {
    if samples.iter().any(|s| s.len() < 2) {
        return Err(EvalError::InsufficientSamples);
    }
    let k = samples.len();
    let mut m = vec![vec![0i8; k]; k];
    for i in 0..k {
        for j in i + 1..k {
            let s = welch_sign(&samples[i], &samples[j], confidence)?;
            m[i][j] = s;
            m[j][i] = -s;
        }
    }
    Ok(m)
}
