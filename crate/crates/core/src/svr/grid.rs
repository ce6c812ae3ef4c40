use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    check_inputs, distance_matrix, squared_distance, train_prepared, ScalingParams, SvrError,
    SvrParams,
};

/// Hyperparameter grid over powers of two, plus cross-validation settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SvrGrid {
    /// Exponents `k` for `C = 2^k`.
    pub log2_c: Vec<i32>,
    /// Exponents `k` for `gamma = 2^k`.
    pub log2_gamma: Vec<i32>,
    pub folds: usize,
    pub epsilon: f64,
    pub tol: f64,
    pub max_iter: u64,
}

impl Default for SvrGrid {
    fn default() -> Self {
        SvrGrid {
            log2_c: (-3..=7).collect(),
            log2_gamma: (-9..=3).collect(),
            folds: 5,
            epsilon: 0.1,
            tol: 1e-3,
            max_iter: 10_000_000,
        }
    }
}

impl SvrGrid {
    pub fn single(c: f64, gamma: f64) -> Self {
        SvrGrid {
            log2_c: vec![c.log2().round() as i32],
            log2_gamma: vec![gamma.log2().round() as i32],
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), SvrError> {
        if self.log2_c.is_empty() || self.log2_gamma.is_empty() {
            return Err(SvrError::InvalidParams("empty C or gamma grid".into()));
        }
        if self.folds < 2 {
            return Err(SvrError::InvalidParams("folds must be at least 2".into()));
        }
        self.params(self.log2_c[0], self.log2_gamma[0]).validate()
    }

    /// Cells in ascending `C`, then ascending `gamma`.
    fn cells(&self) -> Vec<(i32, i32)> {
        let mut cs = self.log2_c.clone();
        let mut gs = self.log2_gamma.clone();
        cs.sort_unstable();
        cs.dedup();
        gs.sort_unstable();
        gs.dedup();
        cs.iter()
            .flat_map(|&c| gs.iter().map(move |&g| (c, g)))
            .collect()
    }

    pub fn params(&self, log2_c: i32, log2_gamma: i32) -> SvrParams {
        SvrParams {
            c: 2f64.powi(log2_c),
            gamma: 2f64.powi(log2_gamma),
            epsilon: self.epsilon,
            tol: self.tol,
            max_iter: self.max_iter,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub params: SvrParams,
    /// Cross-validated RMSE of the chosen cell (NaN when no CV was possible).
    pub cv_rmse: f64,
}

struct Fold {
    train_rows: Vec<Vec<f64>>,
    train_y: Vec<f64>,
    train_dist: Vec<f64>,
    test_rows: Vec<Vec<f64>>,
    test_y: Vec<f64>,
    scaling: ScalingParams,
}

fn make_folds(x: &[Vec<f64>], y: &[f64], k: usize, seed: u64) -> Vec<Fold> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut assign = vec![0usize; x.len()];
    for (pos, &i) in order.iter().enumerate() {
        assign[i] = pos % k;
    }
    (0..k)
        .map(|f| {
            let (mut tr, mut te) = (Vec::new(), Vec::new());
            for i in 0..x.len() {
                if assign[i] == f {
                    te.push(i);
                } else {
                    tr.push(i);
                }
            }
            let raw: Vec<Vec<f64>> = tr.iter().map(|&i| x[i].clone()).collect();
            let scaling = ScalingParams::fit(&raw);
            let train_rows: Vec<Vec<f64>> = raw.iter().map(|r| scaling.apply(r)).collect();
            Fold {
                train_dist: distance_matrix(&train_rows),
                train_rows,
                train_y: tr.iter().map(|&i| y[i]).collect(),
                test_rows: te.iter().map(|&i| scaling.apply(&x[i])).collect(),
                test_y: te.iter().map(|&i| y[i]).collect(),
                scaling,
            }
        })
        .collect()
}

fn cv_rmse(folds: &[Fold], params: &SvrParams) -> f64 {
    let mut sse = 0.0;
    let mut count = 0usize;
    for f in folds {
        let m = train_prepared(
            &f.train_rows,
            &f.train_dist,
            &f.train_y,
            f.scaling.clone(),
            Vec::new(),
            params,
        );
        for (row, &t) in f.test_rows.iter().zip(&f.test_y) {
            let z: f64 = m
                .support_vectors
                .iter()
                .zip(&m.coefficients)
                .map(|(sv, &c)| c * (-m.gamma * squared_distance(sv, row)).exp())
                .sum::<f64>()
                + m.bias;
            sse += (m.target.inverse(z) - t).powi(2);
            count += 1;
        }
    }
    (sse / count as f64).sqrt()
}

/// k-fold cross-validated grid search. Folds come from a seeded shuffle;
/// ties on RMSE go to the smaller `C`, then the smaller `gamma`.
///
/// With fewer than two rows no validation is possible and the smallest
/// cell is returned.
pub fn grid_search(
    x: &[Vec<f64>],
    y: &[f64],
    grid: &SvrGrid,
    seed: u64,
) -> Result<GridResult, SvrError> {
    grid.validate()?;
    check_inputs(x, y)?;
    let cells = grid.cells();
    let k = grid.folds.min(x.len());
    if k < 2 {
        let (c, g) = cells[0];
        return Ok(GridResult {
            params: grid.params(c, g),
            cv_rmse: f64::NAN,
        });
    }
    let folds = make_folds(x, y, k, seed);
    let scores: Vec<f64> = cells
        .par_iter()
        .map(|&(c, g)| cv_rmse(&folds, &grid.params(c, g)))
        .collect();
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate() {
        if s < scores[best] || (scores[best].is_nan() && !s.is_nan()) {
            best = i;
        }
    }
    let (c, g) = cells[best];
    Ok(GridResult {
        params: grid.params(c, g),
        cv_rmse: scores[best],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data() -> (Vec<Vec<f64>>, Vec<f64>) {
        let x: Vec<Vec<f64>> = (0..40)
            .map(|i| vec![i as f64 / 10.0, ((i * 7) % 11) as f64])
            .collect();
        let y = x.iter().map(|r| r[0].sin() + 0.05 * r[1]).collect();
        (x, y)
    }

    #[test]
    fn single_cell_is_returned() {
        let (x, y) = data();
        let g = SvrGrid::single(4.0, 0.5);
        let r = grid_search(&x, &y, &g, 1).unwrap();
        assert_eq!((r.params.c, r.params.gamma), (4.0, 0.5));
        assert!(r.cv_rmse.is_finite());
    }

    #[test]
    fn same_seed_same_choice() {
        let (x, y) = data();
        let g = SvrGrid {
            log2_c: vec![-1, 1, 3],
            log2_gamma: vec![-3, -1, 1],
            ..Default::default()
        };
        let a = grid_search(&x, &y, &g, 9).unwrap();
        let b = grid_search(&x, &y, &g, 9).unwrap();
        assert_eq!(a.params, b.params);
        assert_eq!(a.cv_rmse.to_bits(), b.cv_rmse.to_bits());
    }

    #[test]
    fn ties_prefer_smaller_c_then_gamma() {
        // Constant targets make every cell score zero.
        let x: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64]).collect();
        let y = vec![2.0; 10];
        let g = SvrGrid {
            log2_c: vec![3, -2, 0],
            log2_gamma: vec![1, -4],
            ..Default::default()
        };
        let r = grid_search(&x, &y, &g, 0).unwrap();
        assert_eq!((r.params.c, r.params.gamma), (0.25, 1.0 / 16.0));
        assert_eq!(r.cv_rmse, 0.0);
    }

    #[test]
    fn tiny_sets() {
        let g = SvrGrid::default();
        let r = grid_search(&[vec![1.0]], &[3.0], &g, 0).unwrap();
        assert_eq!(r.params.c, 0.125);
        let r = grid_search(&[vec![1.0], vec![2.0], vec![4.0]], &[3.0, 1.0, 2.0], &g, 0).unwrap();
        assert!(r.cv_rmse.is_finite());
    }

    #[test]
    fn invalid_grid() {
        let (x, y) = data();
        let g = SvrGrid {
            folds: 1,
            ..Default::default()
        };
        assert!(matches!(
            grid_search(&x, &y, &g, 0),
            Err(SvrError::InvalidParams(_))
        ));
    }
}
