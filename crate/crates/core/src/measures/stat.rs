//! Pearson, Spearman and distance correlation.

use super::{check_same_len, MeasureId, MeasureResult};
use crate::error::{Error, Result};

fn check_pairwise(x: &[f64], y: &[f64]) -> Result<()> {
    check_same_len(x.len(), y.len())?;
    if x.len() < 2 {
        return Err(Error::SampleSize { required: 2, actual: x.len() });
    }
    Ok(())
}

fn is_constant(values: &[f64]) -> bool {
    values.iter().all(|v| *v == values[0])
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample correlation. The `n - 1` factors of covariance and standard
/// deviations cancel, so the ratio is taken on raw sums; identical inputs then
/// give exactly 1.
fn correlation(x: &[f64], y: &[f64]) -> f64 {
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0)
}

pub fn pearson(x: &[f64], y: &[f64]) -> Result<MeasureResult> {
    check_pairwise(x, y)?;
    if is_constant(x) || is_constant(y) {
        return Ok(MeasureResult::degenerate(MeasureId::Pearson, x.len(), "zero variance input"));
    }
    Ok(MeasureResult::new(MeasureId::Pearson, correlation(x, y), x.len()))
}

/// One-based ranks; tied values share the average of the ranks they span.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start;
        while end + 1 < order.len() && values[order[end + 1]] == values[order[start]] {
            end += 1;
        }
        let rank = (start + end) as f64 / 2.0 + 1.0;
        for &idx in &order[start..=end] {
            ranks[idx] = rank;
        }
        start = end + 1;
    }
    ranks
}

pub fn spearman(x: &[f64], y: &[f64]) -> Result<MeasureResult> {
    check_pairwise(x, y)?;
    if is_constant(x) || is_constant(y) {
        return Ok(MeasureResult::degenerate(MeasureId::Spearman, x.len(), "all ranks tied"));
    }
    let value = correlation(&average_ranks(x), &average_ranks(y));
    Ok(MeasureResult::new(MeasureId::Spearman, value, x.len()))
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt()
}

/// Pairwise distance matrix, double-centred in place.
fn centred_distances(points: &[Vec<f64>]) -> Vec<f64> {
    let n = points.len();
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let v = euclidean(&points[i], &points[j]);
            d[i * n + j] = v;
            d[j * n + i] = v;
        }
    }
    let row_means: Vec<f64> = (0..n).map(|i| d[i * n..(i + 1) * n].iter().sum::<f64>() / n as f64).collect();
    let grand = row_means.iter().sum::<f64>() / n as f64;
    // symmetric, so column means equal row means
    for i in 0..n {
        for j in 0..n {
            d[i * n + j] += grand - row_means[i] - row_means[j];
        }
    }
    d
}

/// Sample distance correlation (V-statistic form). Rows of `x` and `y` may
/// have any dimension.
pub fn distance_correlation(x: &[Vec<f64>], y: &[Vec<f64>]) -> Result<MeasureResult> {
    check_same_len(x.len(), y.len())?;
    let n = x.len();
    if n < 2 {
        return Err(Error::SampleSize { required: 2, actual: n });
    }
    if x.iter().all(|r| r == &x[0]) || y.iter().all(|r| r == &y[0]) {
        return Ok(MeasureResult::degenerate(
            MeasureId::DistanceCorrelation,
            n,
            "zero distance variance",
        ));
    }
    let a = centred_distances(x);
    let b = centred_distances(y);
    let nn = (n * n) as f64;
    let dcov2 = a.iter().zip(&b).map(|(p, q)| p * q).sum::<f64>() / nn;
    let dvar_x = a.iter().map(|p| p * p).sum::<f64>() / nn;
    let dvar_y = b.iter().map(|q| q * q).sum::<f64>() / nn;
    let ratio = (dcov2 / (dvar_x * dvar_y).sqrt()).max(0.0);
    let value = ratio.sqrt().min(1.0);
    Ok(MeasureResult::new(MeasureId::DistanceCorrelation, value, n).with_param("dcov2", dcov2))
}

/// Wrap a scalar series as one-dimensional points.
pub fn as_points(values: &[f64]) -> Vec<Vec<f64>> {
    values.iter().map(|v| vec![*v]).collect()
}
