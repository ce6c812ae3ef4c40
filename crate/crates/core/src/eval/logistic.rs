use serde::{Deserialize, Serialize};

use super::metrics::{mean, std_pop};
use super::EvalError;

/// Five-parameter logistic map with a linear term:
/// `b1 * (1/2 - 1/(1 + exp(b2 (q - b3)))) + b4 q + b5`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Logistic5(pub [f64; 5]);

impl Logistic5 {
    pub fn eval(&self, q: f64) -> f64 {
        let [b1, b2, b3, b4, b5] = self.0;
        let logistic = if b1 == 0.0 {
            0.0
        } else {
            b1 * (0.5 - 1.0 / (1.0 + (b2 * (q - b3)).exp()))
        };
        logistic + b4 * q + b5
    }

    pub fn sse(&self, q: &[f64], s: &[f64]) -> f64 {
        let v: f64 = q.iter().zip(s).map(|(&q, &s)| (self.eval(q) - s).powi(2)).sum();
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogisticFit {
    pub beta: Logistic5,
    pub remapped: Vec<f64>,
    pub sse: f64,
    /// SSE of the ordinary least-squares line through `(q, s)`.
    pub linear_sse: f64,
}

/// Ordinary least squares `s ~ slope * q + intercept`.
pub fn linear_fit(q: &[f64], s: &[f64]) -> (f64, f64) {
    let (mq, ms) = (mean(q), mean(s));
    let (mut sqs, mut sqq) = (0.0, 0.0);
    for (a, b) in q.iter().zip(s) {
        sqs += (a - mq) * (b - ms);
        sqq += (a - mq) * (a - mq);
    }
    let slope = if sqq > 0.0 { sqs / sqq } else { 0.0 };
    (slope, ms - slope * mq)
}

/// Downhill simplex minimisation of `f` from `x0`.
fn nelder_mead<const N: usize>(
    f: &dyn Fn(&[f64; N]) -> f64,
    x0: [f64; N],
    scale: [f64; N],
    max_evals: usize,
) -> ([f64; N], f64) {
    let mut simplex: Vec<([f64; N], f64)> = Vec::with_capacity(N + 1);
    simplex.push((x0, f(&x0)));
    for i in 0..N {
        let mut x = x0;
        x[i] += scale[i];
        simplex.push((x, f(&x)));
    }
    let mut evals = N + 1;
    let lerp = |a: &[f64; N], b: &[f64; N], t: f64| -> [f64; N] {
        let mut out = [0.0; N];
        for k in 0..N {
            out[k] = a[k] + t * (b[k] - a[k]);
        }
        out
    };
    while evals < max_evals {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (best, worst) = (simplex[0].1, simplex[N].1);
        if (worst - best).abs() <= 1e-15 * (best.abs() + 1e-300) {
            break;
        }
        let mut centroid = [0.0; N];
        for (x, _) in &simplex[..N] {
            for k in 0..N {
                centroid[k] += x[k] / N as f64;
            }
        }
        let xw = simplex[N].0;
        let xr = lerp(&centroid, &xw, -1.0);
        let fr = f(&xr);
        evals += 1;
        if fr < simplex[0].1 {
            let xe = lerp(&centroid, &xw, -2.0);
            let fe = f(&xe);
            evals += 1;
            simplex[N] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[N - 1].1 {
            simplex[N] = (xr, fr);
        } else {
            let (xc, fc) = if fr < simplex[N].1 {
                let x = lerp(&centroid, &xr, 0.5);
                (x, f(&x))
            } else {
                let x = lerp(&centroid, &xw, 0.5);
                (x, f(&x))
            };
            evals += 1;
            if fc < fr.min(simplex[N].1) {
                simplex[N] = (xc, fc);
            } else {
                let x0 = simplex[0].0;
                for entry in simplex.iter_mut().skip(1) {
                    let x = lerp(&x0, &entry.0, 0.5);
                    *entry = (x, f(&x));
                }
                evals += N;
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    simplex[0]
}

/// Least-squares fit of [`Logistic5`] mapping predictions `q` onto
/// subjective scores `s`.
///
/// Starts from `b1 = range(s)`, `b2 = 1/std(q)`, `b3 = mean(q)` and the
/// ordinary linear fit for `b4, b5`, then restarts the simplex from its own
/// optimum. The returned fit is never worse than the pure linear map, which
/// is the family member with `b1 = 0`.
pub fn logistic_fit(q: &[f64], s: &[f64]) -> Result<LogisticFit, EvalError> {
    if q.len() != s.len() {
        return Err(EvalError::LengthMismatch(q.len(), s.len()));
    }
    if q.len() < 5 {
        return Err(EvalError::DegenerateInput(format!(
            "logistic fit needs 5 points, got {}",
            q.len()
        )));
    }
    if q.iter().chain(s).any(|v| !v.is_finite()) {
        return Err(EvalError::DegenerateInput("non-finite input".into()));
    }
    let sq = std_pop(q);
    if sq == 0.0 {
        return Err(EvalError::DegenerateInput("constant predictions".into()));
    }
    let (slope, intercept) = linear_fit(q, s);
    let linear = Logistic5([0.0, 1.0 / sq, mean(q), slope, intercept]);
    let linear_sse = linear.sse(q, s);

    let s_min = s.iter().copied().fold(f64::INFINITY, f64::min);
    let s_max = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let init = [s_max - s_min, 1.0 / sq, mean(q), slope, intercept];
    let objective = |b: &[f64; 5]| Logistic5(*b).sse(q, s);
    let s_scale = (s_max - s_min).max(1e-3);
    let mut x = init;
    let mut fx = objective(&x);
    for _ in 0..4 {
        let scale = [
            0.5 * s_scale,
            0.5 / sq,
            sq,
            0.5 * slope.abs().max(0.1 * s_scale / sq),
            0.5 * s_scale,
        ];
        let (nx, nf) = nelder_mead(&objective, x, scale, 4000);
        let improved = nf < fx - 1e-12 * fx.abs();
        if nf < fx {
            x = nx;
            fx = nf;
        }
        if !improved {
            break;
        }
    }
    let beta = if fx <= linear_sse { Logistic5(x) } else { linear };
    let sse = beta.sse(q, s);
    Ok(LogisticFit {
        remapped: q.iter().map(|&v| beta.eval(v)).collect(),
        beta,
        sse,
        linear_sse,
    })
}
