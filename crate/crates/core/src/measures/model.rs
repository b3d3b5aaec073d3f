//! Predictive power score backed by a CART regression tree.

use serde::{Deserialize, Serialize};

use super::{check_same_len, MeasureId, MeasureResult};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeParams {
    pub max_depth: usize,
    pub min_samples_leaf: usize,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams { max_depth: 4, min_samples_leaf: 5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Leaf {
        value: f64,
        samples: usize,
    },
    /// Rows with `x[feature] <= threshold` go left.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionTree {
    nodes: Vec<Node>,
    params: TreeParams,
}

impl RegressionTree {
    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut idx = 0;
        loop {
            match &self.nodes[idx] {
                Node::Leaf { value, .. } => return *value,
                Node::Split { feature, threshold, left, right } => {
                    idx = if x[*feature] <= *threshold { *left } else { *right };
                }
            }
        }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn params(&self) -> TreeParams {
        self.params
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf { .. })).count()
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], idx: usize) -> usize {
            match &nodes[idx] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }
}

struct SplitCandidate {
    feature: usize,
    threshold: f64,
    sse: f64,
}

struct Builder<'a> {
    x: &'a [Vec<f64>],
    y: &'a [f64],
    params: TreeParams,
    nodes: Vec<Node>,
}

impl Builder<'_> {
    fn build(&mut self, rows: Vec<usize>, depth: usize) -> usize {
        let idx = self.nodes.len();
        let mean = rows.iter().map(|&r| self.y[r]).sum::<f64>() / rows.len() as f64;
        self.nodes.push(Node::Leaf { value: mean, samples: rows.len() });

        if depth >= self.params.max_depth || rows.len() < 2 * self.params.min_samples_leaf {
            return idx;
        }
        let Some(split) = self.best_split(&rows, mean) else {
            return idx;
        };
        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) =
            rows.iter().partition(|&&r| self.x[r][split.feature] <= split.threshold);
        let left = self.build(left_rows, depth + 1);
        let right = self.build(right_rows, depth + 1);
        self.nodes[idx] = Node::Split {
            feature: split.feature,
            threshold: split.threshold,
            left,
            right,
        };
        idx
    }

    /// Variance-reduction split; ties keep the lowest feature index and then
    /// the lowest threshold.
    fn best_split(&self, rows: &[usize], mean: f64) -> Option<SplitCandidate> {
        let n = rows.len();
        let min_leaf = self.params.min_samples_leaf;
        // centre targets to keep the prefix-sum SSE well conditioned
        let centred: Vec<f64> = rows.iter().map(|&r| self.y[r] - mean).collect();
        let parent_sse: f64 = centred.iter().map(|v| v * v).sum();
        if parent_sse <= 0.0 {
            return None;
        }
        let tol = parent_sse * 1e-12;

        let mut best: Option<SplitCandidate> = None;
        let features = self.x[rows[0]].len();
        for feature in 0..features {
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| {
                self.x[rows[a]][feature]
                    .total_cmp(&self.x[rows[b]][feature])
                    .then(a.cmp(&b))
            });
            let total: f64 = centred.iter().sum();
            let total_sq = parent_sse;
            let (mut sum, mut sum_sq) = (0.0, 0.0);
            for i in 0..n - 1 {
                let v = centred[order[i]];
                sum += v;
                sum_sq += v * v;
                let left_n = i + 1;
                let right_n = n - left_n;
                if left_n < min_leaf || right_n < min_leaf {
                    continue;
                }
                let lo = self.x[rows[order[i]]][feature];
                let hi = self.x[rows[order[i + 1]]][feature];
                if lo == hi {
                    continue;
                }
                let left_sse = sum_sq - sum * sum / left_n as f64;
                let right_sum = total - sum;
                let right_sse = (total_sq - sum_sq) - right_sum * right_sum / right_n as f64;
                let sse = left_sse.max(0.0) + right_sse.max(0.0);
                if sse >= parent_sse - tol {
                    continue;
                }
                if best.as_ref().map_or(true, |b| sse < b.sse - tol) {
                    let mid = lo + (hi - lo) / 2.0;
                    let threshold = if mid < hi { mid } else { lo };
                    best = Some(SplitCandidate { feature, threshold, sse });
                }
            }
        }
        best
    }
}

/// Greedy CART fit minimising within-node squared error. Leaves predict the
/// mean target of their rows.
pub fn fit_regression_tree(x: &[Vec<f64>], y: &[f64], params: TreeParams) -> Result<RegressionTree> {
    check_same_len(x.len(), y.len())?;
    if y.is_empty() {
        return Err(Error::InsufficientData("cannot fit a tree on zero rows".into()));
    }
    let width = x[0].len();
    if x.iter().any(|r| r.len() != width) {
        return Err(Error::Parameter("feature rows have differing widths".into()));
    }
    let params = TreeParams {
        max_depth: params.max_depth,
        min_samples_leaf: params.min_samples_leaf.max(1),
    };
    let mut builder = Builder { x, y, params, nodes: Vec::new() };
    builder.build((0..y.len()).collect(), 0);
    Ok(RegressionTree { nodes: builder.nodes, params })
}

/// Median, averaging the two middle values for even lengths.
pub fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

pub fn mean_absolute_error(y: &[f64], predictions: &[f64]) -> f64 {
    y.iter().zip(predictions).map(|(a, b)| (a - b).abs()).sum::<f64>() / y.len() as f64
}

/// Mean absolute error of the constant median predictor.
pub fn naive_median_mae(y: &[f64]) -> f64 {
    if y.is_empty() {
        return 0.0;
    }
    let m = median(y);
    mean_absolute_error(y, &vec![m; y.len()])
}

/// Score arbitrary predictions against the naive median baseline:
/// `max(0, 1 - MAE(model) / MAE(median))`. The unclipped ratio is kept in
/// `params["raw"]`.
pub fn pps_from_predictions(y: &[f64], predictions: &[f64]) -> Result<MeasureResult> {
    check_same_len(y.len(), predictions.len())?;
    if y.is_empty() {
        return Err(Error::InsufficientData("empty target".into()));
    }
    let naive = naive_median_mae(y);
    if naive == 0.0 {
        return Ok(MeasureResult::degenerate(MeasureId::Pps, y.len(), "naive median MAE is zero")
            .with_param("mae_naive", 0.0));
    }
    let model = mean_absolute_error(y, predictions);
    let raw = 1.0 - model / naive;
    Ok(MeasureResult::new(MeasureId::Pps, raw.max(0.0), y.len())
        .with_param("raw", raw)
        .with_param("mae_model", model)
        .with_param("mae_naive", naive))
}

/// Predictive power score of `x` for `y`.
///
/// With `folds >= 2` the rows are cut into contiguous, time-ordered blocks;
/// each block is predicted by a tree fitted on the others. `folds == 1`
/// fits and scores in-sample. Folds are never shuffled, so `seed` is only
/// recorded.
pub fn pps(
    x: &[Vec<f64>],
    y: &[f64],
    folds: usize,
    seed: u64,
    params: TreeParams,
) -> Result<MeasureResult> {
    check_same_len(x.len(), y.len())?;
    let n = y.len();
    if folds == 0 {
        return Err(Error::Parameter("folds must be >= 1".into()));
    }
    if n == 0 {
        return Err(Error::InsufficientData("empty target".into()));
    }
    if folds >= 2 && n < 4 * folds {
        return Err(Error::SampleSize { required: 4 * folds, actual: n });
    }

    let predictions = if folds == 1 {
        let tree = fit_regression_tree(x, y, params)?;
        x.iter().map(|r| tree.predict(r)).collect::<Vec<_>>()
    } else {
        let mut out = vec![0.0; n];
        for k in 0..folds {
            let (start, end) = (k * n / folds, (k + 1) * n / folds);
            let train: Vec<usize> = (0..start).chain(end..n).collect();
            let tx: Vec<Vec<f64>> = train.iter().map(|&i| x[i].clone()).collect();
            let ty: Vec<f64> = train.iter().map(|&i| y[i]).collect();
            let tree = fit_regression_tree(&tx, &ty, params)?;
            for i in start..end {
                out[i] = tree.predict(&x[i]);
            }
        }
        out
    };

    Ok(pps_from_predictions(y, &predictions)?
        .with_param("folds", folds as f64)
        .with_param("seed", seed as f64)
        .with_param("max_depth", params.max_depth as f64)
        .with_param("min_samples_leaf", params.min_samples_leaf as f64))
}
