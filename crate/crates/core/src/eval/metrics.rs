use super::EvalError;

fn check_pair(a: &[f64], b: &[f64]) -> Result<(), EvalError> {
    if a.len() != b.len() {
        return Err(EvalError::LengthMismatch(a.len(), b.len()));
    }
    if a.len() < 3 {
        return Err(EvalError::TooShort { len: a.len(), min: 3 });
    }
    Ok(())
}

pub(crate) fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Population standard deviation.
pub(crate) fn std_pop(x: &[f64]) -> f64 {
    let m = mean(x);
    (x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / x.len() as f64).sqrt()
}

fn pearson(a: &[f64], b: &[f64]) -> Result<f64, EvalError> {
    let (ma, mb) = (mean(a), mean(b));
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        return Err(EvalError::ZeroVariance);
    }
    Ok((sab / (saa * sbb).sqrt()).clamp(-1.0, 1.0))
}

/// 1-based ranks with ties replaced by their average rank.
pub fn average_ranks(x: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&i, &j| x[i].total_cmp(&x[j]));
    let mut ranks = vec![0.0; x.len()];
    let mut start = 0;
    while start < idx.len() {
        let mut end = start + 1;
        while end < idx.len() && x[idx[end]] == x[idx[start]] {
            end += 1;
        }
        let r = (start + end + 1) as f64 / 2.0;
        for &i in &idx[start..end] {
            ranks[i] = r;
        }
        start = end;
    }
    ranks
}

/// Spearman rank-order correlation.
pub fn srcc(a: &[f64], b: &[f64]) -> Result<f64, EvalError> {
    check_pair(a, b)?;
    pearson(&average_ranks(a), &average_ranks(b))
}

/// Pearson linear correlation.
pub fn lcc(a: &[f64], b: &[f64]) -> Result<f64, EvalError> {
    check_pair(a, b)?;
    pearson(a, b)
}

pub fn rmse(pred: &[f64], truth: &[f64]) -> Result<f64, EvalError> {
    check_pair(pred, truth)?;
    Ok((pred
        .iter()
        .zip(truth)
        .map(|(p, t)| (p - t) * (p - t))
        .sum::<f64>()
        / pred.len() as f64)
        .sqrt())
}

/// Fraction of predictions off by more than twice the (population) standard
/// deviation of the subjective scores.
pub fn outlier_ratio(pred: &[f64], truth: &[f64]) -> Result<f64, EvalError> {
    check_pair(pred, truth)?;
    let bound = 2.0 * std_pop(truth);
    let n = pred
        .iter()
        .zip(truth)
        .filter(|(p, t)| (*p - *t).abs() > bound)
        .count();
    Ok(n as f64 / pred.len() as f64)
}
