use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dataset::{LabeledDataset, Polarity};
use super::logistic::{logistic_fit, Logistic5};
use super::metrics::{lcc, mean, outlier_ratio, rmse, srcc};
use super::EvalError;
use crate::svr::{grid_search, svr_train, SvrGrid, SvrParams};

pub const OUTLIER_DEFINITION: &str =
    "fraction of items with |remapped prediction - score| > 2 * population std of test scores";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitUnit {
    /// Items are assigned independently.
    #[default]
    Item,
    /// Whole scenes go to one side, so no content is shared across the split.
    Scene,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProtocolConfig {
    pub n_trials: usize,
    pub train_frac: f64,
    pub split_unit: SplitUnit,
    pub seed: u64,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        ProtocolConfig {
            n_trials: 1000,
            train_frac: 0.8,
            split_unit: SplitUnit::Item,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub srcc: f64,
    pub lcc: f64,
    pub rmse: f64,
    pub or: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub trial: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub c: f64,
    pub gamma: f64,
    pub metrics: Metrics,
    pub beta: [f64; 5],
    /// True when the regressor produced a constant output on the test split.
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub split_unit: SplitUnit,
    pub polarity: Polarity,
    pub outlier_definition: String,
    pub config: ProtocolConfig,
    pub grid: SvrGrid,
    pub n_items: usize,
    pub n_features: usize,
    pub median: Metrics,
    pub trials: Vec<TrialResult>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub elapsed_secs: Option<f64>,
}

/// 50th percentile; the mean of the two middle values for even counts.
pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

/// Train/test index sets for one trial.
pub fn split_indices(
    ds: &LabeledDataset,
    cfg: &ProtocolConfig,
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<usize>, Vec<usize>), EvalError> {
    let n = ds.len();
    let take = |total: usize| -> usize {
        ((cfg.train_frac * total as f64).round() as usize).clamp(1, total.saturating_sub(1))
    };
    let (mut train, mut test) = match cfg.split_unit {
        SplitUnit::Item => {
            if n < 2 {
                return Err(EvalError::InsufficientData("need at least two items".into()));
            }
            let mut idx: Vec<usize> = (0..n).collect();
            idx.shuffle(rng);
            let k = take(n);
            (idx[..k].to_vec(), idx[k..].to_vec())
        }
        SplitUnit::Scene => {
            let scenes: Vec<&str> = ds
                .rows
                .iter()
                .map(|r| r.scene.as_str())
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect();
            if scenes.len() < 2 {
                return Err(EvalError::InsufficientData(
                    "scene split needs at least two scenes".into(),
                ));
            }
            let mut order = scenes.clone();
            order.shuffle(rng);
            let chosen: BTreeSet<&str> = order[..take(scenes.len())].iter().copied().collect();
            (0..n).partition(|&i| chosen.contains(ds.rows[i].scene.as_str()))
        }
    };
    train.sort_unstable();
    test.sort_unstable();
    if test.len() < 5 {
        return Err(EvalError::InsufficientData(format!(
            "test split has {} items; the logistic remap needs 5",
            test.len()
        )));
    }
    Ok((train, test))
}

/// Metrics of raw predictions against scores, after the logistic remap.
/// Constant predictions carry no ranking; they score zero correlation and
/// are remapped to the mean score.
pub(crate) fn score_predictions(
    pred: &[f64],
    truth: &[f64],
) -> Result<(Metrics, [f64; 5], bool), EvalError> {
    let constant = pred.iter().all(|&p| p == pred[0]);
    if constant {
        let m = mean(truth);
        let remapped = vec![m; truth.len()];
        let metrics = Metrics {
            srcc: 0.0,
            lcc: 0.0,
            rmse: rmse(&remapped, truth)?,
            or: outlier_ratio(&remapped, truth)?,
        };
        return Ok((metrics, [0.0, 0.0, 0.0, 0.0, m], true));
    }
    let fit = logistic_fit(pred, truth)?;
    let Logistic5(beta) = fit.beta;
    let metrics = Metrics {
        srcc: srcc(pred, truth)?,
        lcc: lcc(&fit.remapped, truth)?,
        rmse: rmse(&fit.remapped, truth)?,
        or: outlier_ratio(&fit.remapped, truth)?,
    };
    Ok((metrics, beta, false))
}

fn run_trial(
    ds: &LabeledDataset,
    cfg: &ProtocolConfig,
    grid: &SvrGrid,
    trial: usize,
) -> Result<TrialResult, EvalError> {
    let mut rng = trial_rng(cfg.seed, trial);
    let (train, test) = split_indices(ds, cfg, &mut rng)?;
    let cv_seed: u64 = rng.gen();
    let pol = ds.polarity;
    let x: Vec<Vec<f64>> = train.iter().map(|&i| ds.rows[i].features.clone()).collect();
    let y: Vec<f64> = train.iter().map(|&i| pol.orient(ds.rows[i].score)).collect();
    let best = grid_search(&x, &y, grid, cv_seed)?;
    let model = svr_train(&x, &y, &best.params, ds.layout.clone())?;
    let mut pred = Vec::with_capacity(test.len());
    for &i in &test {
        pred.push(pol.orient(model.predict(&ds.rows[i].features)?));
    }
    let truth: Vec<f64> = test.iter().map(|&i| ds.rows[i].score).collect();
    let (metrics, beta, degenerate) = score_predictions(&pred, &truth)?;
    Ok(TrialResult {
        trial,
        n_train: train.len(),
        n_test: test.len(),
        c: best.params.c,
        gamma: best.params.gamma,
        metrics,
        beta,
        degenerate,
    })
}

/// Repeated random-split evaluation. Each trial draws its split from a
/// generator keyed by `(seed, trial)`, so the report does not depend on the
/// thread count.
pub fn run_protocol(
    ds: &LabeledDataset,
    cfg: &ProtocolConfig,
    grid: &SvrGrid,
) -> Result<EvalReport, EvalError> {
    if cfg.n_trials == 0 {
        return Err(EvalError::InsufficientData("n_trials must be positive".into()));
    }
    if !(cfg.train_frac > 0.0 && cfg.train_frac < 1.0) {
        return Err(EvalError::DegenerateInput(format!(
            "train_frac must lie in (0, 1), got {}",
            cfg.train_frac
        )));
    }
    grid.validate()?;
    let trials = (0..cfg.n_trials)
        .into_par_iter()
        .map(|t| run_trial(ds, cfg, grid, t))
        .collect::<Result<Vec<_>, _>>()?;
    let pick = |f: fn(&Metrics) -> f64| median(&trials.iter().map(|t| f(&t.metrics)).collect::<Vec<_>>());
    Ok(EvalReport {
        split_unit: cfg.split_unit,
        polarity: ds.polarity,
        outlier_definition: OUTLIER_DEFINITION.into(),
        config: cfg.clone(),
        grid: grid.clone(),
        n_items: ds.len(),
        n_features: ds.layout.len(),
        median: Metrics {
            srcc: pick(|m| m.srcc),
            lcc: pick(|m| m.lcc),
            rmse: pick(|m| m.rmse),
            or: pick(|m| m.or),
        },
        trials,
        elapsed_secs: None,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossReport {
    pub n_train: usize,
    pub n_test: usize,
    pub distortions: Option<Vec<String>>,
    pub params: SvrParams,
    pub metrics: Metrics,
    pub beta: [f64; 5],
    pub degenerate: bool,
}

/// Train once on all of `train` and score all of `test`. When `distortions`
/// is given, both sets are restricted to those tags first.
pub fn cross_dataset(
    train: &LabeledDataset,
    test: &LabeledDataset,
    distortions: Option<&[String]>,
    grid: &SvrGrid,
    seed: u64,
) -> Result<CrossReport, EvalError> {
    if train.layout != test.layout {
        return Err(EvalError::LayoutMismatch(
            "train and test feature layouts differ".into(),
        ));
    }
    let (train, test) = match distortions {
        Some(keep) => (train.filter_distortions(keep), test.filter_distortions(keep)),
        None => (train.clone(), test.clone()),
    };
    if train.is_empty() {
        return Err(EvalError::InsufficientData("no training rows left".into()));
    }
    if test.len() < 5 {
        return Err(EvalError::InsufficientData(format!(
            "{} test rows left; need 5",
            test.len()
        )));
    }
    let x = train.features();
    let y: Vec<f64> = train.rows.iter().map(|r| train.polarity.orient(r.score)).collect();
    let best = grid_search(&x, &y, grid, seed)?;
    let model = svr_train(&x, &y, &best.params, train.layout.clone())?;
    let mut pred = Vec::with_capacity(test.len());
    for r in &test.rows {
        pred.push(test.polarity.orient(model.predict(&r.features)?));
    }
    let (metrics, beta, degenerate) = score_predictions(&pred, &test.scores())?;
    Ok(CrossReport {
        n_train: train.len(),
        n_test: test.len(),
        distortions: distortions.map(<[String]>::to_vec),
        params: best.params,
        metrics,
        beta,
        degenerate,
    })
}
