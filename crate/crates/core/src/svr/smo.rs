//! Sequential minimal optimization for the epsilon-SVR dual.
//!
//! The dual is written over `2n` variables as
//!
//! ```text
//! min 1/2 a^T Q a + p^T a   s.t.  y^T a = 0,  0 <= a_t <= C
//! ```
//!
//! with `y_t = +1, p_t = eps - z_t` for `t < n` and `y_t = -1,
//! p_t = eps + z_{t-n}` for `t >= n`, `Q_ts = y_t y_s K(t mod n, s mod n)`.
//! Each step updates the maximal violating pair.

use serde::{Deserialize, Serialize};

const TAU: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverReport {
    pub iterations: u64,
    /// `m(a) - M(a)` at exit.
    pub max_violation: f64,
    pub converged: bool,
    pub objective: f64,
}

#[derive(Debug, Clone)]
pub struct Solution {
    /// Full `2n` dual vector.
    pub alpha: Vec<f64>,
    /// `a_i - a_{i+n}` per training point.
    pub coef: Vec<f64>,
    /// Decision function offset: `f(x) = sum coef_i K(x_i, x) + bias`.
    pub bias: f64,
    pub report: SolverReport,
}

/// Row-major `n x n` symmetric kernel matrix.
pub struct KernelMatrix<'a> {
    pub n: usize,
    pub values: &'a [f64],
}

impl KernelMatrix<'_> {
    #[inline]
    fn k(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    #[inline]
    fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }
}

#[inline]
fn sign(t: usize, n: usize) -> f64 {
    if t < n {
        1.0
    } else {
        -1.0
    }
}

#[inline]
fn in_up(y: f64, a: f64, c: f64) -> bool {
    (y > 0.0 && a < c) || (y < 0.0 && a > 0.0)
}

#[inline]
fn in_low(y: f64, a: f64, c: f64) -> bool {
    (y > 0.0 && a > 0.0) || (y < 0.0 && a < c)
}

fn linear_term(z: &[f64], eps: f64) -> Vec<f64> {
    z.iter()
        .map(|&zi| eps - zi)
        .chain(z.iter().map(|&zi| eps + zi))
        .collect()
}

/// Maximal violating pair `(i, j, m - M)` for the given gradient.
fn select_pair(alpha: &[f64], grad: &[f64], n: usize, c: f64) -> Option<(usize, usize, f64)> {
    let mut up = (f64::NEG_INFINITY, usize::MAX);
    let mut low = (f64::INFINITY, usize::MAX);
    for t in 0..2 * n {
        let y = sign(t, n);
        let v = -y * grad[t];
        if in_up(y, alpha[t], c) && v > up.0 {
            up = (v, t);
        }
        if in_low(y, alpha[t], c) && v < low.0 {
            low = (v, t);
        }
    }
    if up.1 == usize::MAX || low.1 == usize::MAX {
        return None;
    }
    Some((up.1, low.1, up.0 - low.0))
}

/// Gradient `Q a + p` recomputed from scratch.
pub fn dual_gradient(kernel: &KernelMatrix<'_>, z: &[f64], eps: f64, alpha: &[f64]) -> Vec<f64> {
    let n = kernel.n;
    let coef: Vec<f64> = (0..n).map(|i| alpha[i] - alpha[i + n]).collect();
    let p = linear_term(z, eps);
    (0..2 * n)
        .map(|t| {
            let k: f64 = kernel
                .row(t % n)
                .iter()
                .zip(&coef)
                .map(|(a, b)| a * b)
                .sum();
            sign(t, n) * k + p[t]
        })
        .collect()
}

/// `1/2 a^T Q a + p^T a`.
pub fn dual_objective(kernel: &KernelMatrix<'_>, z: &[f64], eps: f64, alpha: &[f64]) -> f64 {
    let g = dual_gradient(kernel, z, eps, alpha);
    let p = linear_term(z, eps);
    alpha
        .iter()
        .zip(g.iter().zip(&p))
        .map(|(a, (g, p))| 0.5 * a * (g + p))
        .sum()
}

/// KKT gap `m(a) - M(a)` evaluated from scratch; at most `tol` at an
/// approximate optimum.
pub fn max_kkt_violation(
    kernel: &KernelMatrix<'_>,
    z: &[f64],
    eps: f64,
    c: f64,
    alpha: &[f64],
) -> f64 {
    let g = dual_gradient(kernel, z, eps, alpha);
    select_pair(alpha, &g, kernel.n, c).map_or(0.0, |(_, _, gap)| gap.max(0.0))
}

pub fn solve(
    kernel: &KernelMatrix<'_>,
    z: &[f64],
    c: f64,
    eps: f64,
    tol: f64,
    max_iter: u64,
) -> Solution {
    let n = kernel.n;
    let mut alpha = vec![0.0; 2 * n];
    let mut grad = linear_term(z, eps);
    let mut iterations = 0u64;
    let mut gap = f64::INFINITY;
    let mut converged = false;

    while iterations < max_iter {
        let Some((i, j, g)) = select_pair(&alpha, &grad, n, c) else {
            gap = 0.0;
            converged = true;
            break;
        };
        gap = g;
        if gap <= tol {
            converged = true;
            break;
        }
        iterations += 1;

        let (yi, yj) = (sign(i, n), sign(j, n));
        let (bi, bj) = (i % n, j % n);
        let qii = kernel.k(bi, bi);
        let qjj = kernel.k(bj, bj);
        let qij = yi * yj * kernel.k(bi, bj);
        let (old_i, old_j) = (alpha[i], alpha[j]);
        let (mut ai, mut aj) = (old_i, old_j);

        if yi != yj {
            let quad = (qii + qjj + 2.0 * qij).max(TAU);
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = ai - aj;
            ai += delta;
            aj += delta;
            if diff > 0.0 {
                if aj < 0.0 {
                    aj = 0.0;
                    ai = diff;
                }
            } else if ai < 0.0 {
                ai = 0.0;
                aj = -diff;
            }
            if diff > 0.0 {
                if ai > c {
                    ai = c;
                    aj = c - diff;
                }
            } else if aj > c {
                aj = c;
                ai = c + diff;
            }
        } else {
            let quad = (qii + qjj - 2.0 * qij).max(TAU);
            let delta = (grad[i] - grad[j]) / quad;
            let sum = ai + aj;
            ai -= delta;
            aj += delta;
            if sum > c {
                if ai > c {
                    ai = c;
                    aj = sum - c;
                }
            } else if aj < 0.0 {
                aj = 0.0;
                ai = sum;
            }
            if sum > c {
                if aj > c {
                    aj = c;
                    ai = sum - c;
                }
            } else if ai < 0.0 {
                ai = 0.0;
                aj = sum;
            }
        }
        ai = ai.clamp(0.0, c);
        aj = aj.clamp(0.0, c);
        alpha[i] = ai;
        alpha[j] = aj;

        let (di, dj) = (ai - old_i, aj - old_j);
        if di == 0.0 && dj == 0.0 {
            // No progress possible on the maximal pair.
            break;
        }
        let row_i = kernel.row(bi);
        let row_j = kernel.row(bj);
        for t in 0..2 * n {
            let yt = sign(t, n);
            let b = t % n;
            grad[t] += yt * (yi * row_i[b] * di + yj * row_j[b] * dj);
        }
    }

    let bias = -rho(&alpha, &grad, n, c);
    let coef = (0..n).map(|i| alpha[i] - alpha[i + n]).collect();
    let objective = alpha
        .iter()
        .zip(&grad)
        .zip(linear_term(z, eps))
        .map(|((a, g), p)| 0.5 * a * (g + p))
        .sum();
    Solution {
        alpha,
        coef,
        bias,
        report: SolverReport {
            iterations,
            max_violation: gap.max(0.0),
            converged,
            objective,
        },
    }
}

fn rho(alpha: &[f64], grad: &[f64], n: usize, c: f64) -> f64 {
    let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut free, mut sum_free) = (0usize, 0.0);
    for t in 0..2 * n {
        let y = sign(t, n);
        let yg = y * grad[t];
        if alpha[t] >= c {
            if y < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if y > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            free += 1;
            sum_free += yg;
        }
    }
    if free > 0 {
        sum_free / free as f64
    } else {
        (ub + lb) / 2.0
    }
}
