//! Zero-mean asymmetric generalized Gaussian fit by moment matching.
//!
//! The density is
//!
//! ```text
//! f(x) = a / ((bl + br) G(1/a)) * exp(-(-x/bl)^a)   x < 0
//!        a / ((bl + br) G(1/a)) * exp(-( x/br)^a)   x >= 0
//! ```
//!
//! with `b = sigma * sqrt(G(1/a) / G(3/a))` on each side.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use super::LcnError;

pub const ALPHA_MIN: f64 = 0.2;
pub const ALPHA_MAX: f64 = 10.0;
pub const ALPHA_STEP: f64 = 0.001;
const MIN_SAMPLES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AggdParams {
    pub alpha: f64,
    pub sigma_l: f64,
    pub sigma_r: f64,
    pub eta: f64,
    pub skewness: f64,
    pub kurtosis: f64,
}

impl AggdParams {
    pub const NAMES: [&'static str; 6] = ["alpha", "sigma_l", "sigma_r", "eta", "skewness", "kurtosis"];

    pub fn beta_l(&self) -> f64 {
        self.sigma_l * scale_factor(self.alpha)
    }

    pub fn beta_r(&self) -> f64 {
        self.sigma_r * scale_factor(self.alpha)
    }

    pub fn to_array(&self) -> [f64; 6] {
        [
            self.alpha,
            self.sigma_l,
            self.sigma_r,
            self.eta,
            self.skewness,
            self.kurtosis,
        ]
    }
}

/// `sqrt(G(1/a) / G(3/a))`.
fn scale_factor(alpha: f64) -> f64 {
    (0.5 * (ln_gamma(1.0 / alpha) - ln_gamma(3.0 / alpha))).exp()
}

/// `G(2/a)^2 / (G(1/a) G(3/a))`, increasing in `a`.
pub fn gg_ratio(alpha: f64) -> f64 {
    (2.0 * ln_gamma(2.0 / alpha) - ln_gamma(1.0 / alpha) - ln_gamma(3.0 / alpha)).exp()
}

fn ratio_table() -> &'static [(f64, f64)] {
    static TABLE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let n = ((ALPHA_MAX - ALPHA_MIN) / ALPHA_STEP).round() as usize;
        (0..=n)
            .map(|k| {
                let a = ALPHA_MIN + k as f64 * ALPHA_STEP;
                (a, gg_ratio(a))
            })
            .collect()
    })
}

/// Fit the AGGD shape and side scales, plus `eta`, skewness and (plain)
/// kurtosis of the raw samples.
pub fn fit_aggd(samples: &[f64]) -> Result<AggdParams, LcnError> {
    let n = samples.len();
    if n < MIN_SAMPLES {
        return Err(LcnError::DegenerateSamples(format!(
            "need at least {MIN_SAMPLES} samples, got {n}"
        )));
    }
    let nf = n as f64;
    let mean = samples.iter().sum::<f64>() / nf;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &x in samples {
        let d = x - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    let (m2, m3, m4) = (m2 / nf, m3 / nf, m4 / nf);
    if !(m2 > 0.0) || !m2.is_finite() {
        return Err(LcnError::DegenerateSamples("zero sample variance".into()));
    }

    let (mut sum_l, mut n_l, mut sum_r, mut n_r, mut abs_sum, mut sq_sum) =
        (0.0, 0usize, 0.0, 0usize, 0.0, 0.0);
    for &x in samples {
        let x2 = x * x;
        if x < 0.0 {
            sum_l += x2;
            n_l += 1;
        } else {
            sum_r += x2;
            n_r += 1;
        }
        abs_sum += x.abs();
        sq_sum += x2;
    }
    if n_l == 0 || n_r == 0 || sum_l == 0.0 || sum_r == 0.0 {
        return Err(LcnError::DegenerateSamples(
            "samples do not populate both sides of zero".into(),
        ));
    }
    let sigma_l = (sum_l / n_l as f64).sqrt();
    let sigma_r = (sum_r / n_r as f64).sqrt();
    let gamma_hat = sigma_l / sigma_r;
    let r_hat = (abs_sum / nf).powi(2) / (sq_sum / nf);
    let r_norm = r_hat * (gamma_hat.powi(3) + 1.0) * (gamma_hat + 1.0)
        / (gamma_hat * gamma_hat + 1.0).powi(2);

    let alpha = ratio_table()
        .iter()
        .fold((f64::INFINITY, ALPHA_MIN), |best, &(a, rho)| {
            let err = (rho - r_norm).abs();
            if err < best.0 {
                (err, a)
            } else {
                best
            }
        })
        .1;

    let k = scale_factor(alpha);
    let (beta_l, beta_r) = (sigma_l * k, sigma_r * k);
    let eta = (beta_r - beta_l) * (ln_gamma(2.0 / alpha) - ln_gamma(1.0 / alpha)).exp();

    Ok(AggdParams {
        alpha,
        sigma_l,
        sigma_r,
        eta,
        skewness: m3 / m2.powf(1.5),
        kurtosis: m4 / (m2 * m2),
    })
}
