//! Entropy, mutual information, MIC, redundancy-synergy index and
//! information gain over exact empirical distributions. All quantities are
//! in bits.
//!
//! Symbols are integer tuples so that a set of variables can be treated as
//! one vector-valued variable. Tables are `BTreeMap`s: summation order, and
//! therefore every floating-point result, is reproducible.

use std::collections::BTreeMap;

use super::{check_same_len, MeasureId, MeasureResult};
use crate::error::{Error, Result};
use crate::shaping::equal_frequency_symbols;

pub type Symbol = Vec<i64>;

/// Default cap on the number of variables in a redundancy-synergy set.
pub const DEFAULT_MAX_SET_SIZE: usize = 3;
/// Default cap on configured bins per histogram axis.
pub const MAX_BINS_PER_AXIS: usize = 16;
pub const DEFAULT_MIC_ALPHA: f64 = 0.6;
pub const MIC_MIN_SAMPLES: usize = 8;

fn plogp_bits(p: f64) -> f64 {
    if p > 0.0 {
        p * p.log2()
    } else {
        0.0
    }
}

/// Entropy of a count vector. Counts are summed in sorted order so the result
/// does not depend on how the cells were enumerated.
fn entropy_of_counts<'a>(counts: impl IntoIterator<Item = &'a u64>, n: u64) -> f64 {
    let n = n as f64;
    let mut sorted: Vec<u64> = counts.into_iter().copied().collect();
    sorted.sort_unstable();
    -sorted.iter().map(|&c| plogp_bits(c as f64 / n)).sum::<f64>()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDistribution {
    probabilities: BTreeMap<Symbol, f64>,
}

impl DiscreteDistribution {
    pub fn new(probabilities: BTreeMap<Symbol, f64>) -> Result<Self> {
        if probabilities.values().any(|p| !(*p >= 0.0)) {
            return Err(Error::Parameter("probabilities must be non-negative".into()));
        }
        let total: f64 = probabilities.values().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Parameter(format!("probabilities sum to {total}, not 1")));
        }
        Ok(DiscreteDistribution { probabilities })
    }

    /// Probabilities listed in order for symbols `0, 1, 2, ...`.
    pub fn from_probs(probs: &[f64]) -> Result<Self> {
        Self::new(probs.iter().enumerate().map(|(i, p)| (vec![i as i64], *p)).collect())
    }

    pub fn from_counts(counts: &BTreeMap<Symbol, u64>) -> Result<Self> {
        let n: u64 = counts.values().sum();
        if n == 0 {
            return Err(Error::InsufficientData("empty histogram".into()));
        }
        Ok(DiscreteDistribution {
            probabilities: counts.iter().map(|(s, c)| (s.clone(), *c as f64 / n as f64)).collect(),
        })
    }

    pub fn from_symbols(symbols: &[i64]) -> Result<Self> {
        let mut counts = BTreeMap::new();
        for s in symbols {
            *counts.entry(vec![*s]).or_insert(0u64) += 1;
        }
        Self::from_counts(&counts)
    }

    pub fn probabilities(&self) -> &BTreeMap<Symbol, f64> {
        &self.probabilities
    }
}

/// Shannon entropy `H = -sum p log2 p`, with `0 log 0 = 0`.
pub fn entropy(dist: &DiscreteDistribution) -> f64 {
    -dist.probabilities.values().map(|&p| plogp_bits(p)).sum::<f64>()
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct JointHistogram {
    counts: BTreeMap<(Symbol, Symbol), u64>,
    n: u64,
}

impl JointHistogram {
    pub fn from_counts(counts: impl IntoIterator<Item = ((Symbol, Symbol), u64)>) -> Self {
        let mut h = JointHistogram::default();
        for (key, c) in counts {
            if c > 0 {
                *h.counts.entry(key).or_insert(0) += c;
                h.n += c;
            }
        }
        h
    }

    pub fn from_tuples(xs: &[Symbol], ys: &[Symbol]) -> Result<Self> {
        check_same_len(xs.len(), ys.len())?;
        Ok(Self::from_counts(xs.iter().cloned().zip(ys.iter().cloned()).map(|k| (k, 1))))
    }

    pub fn from_symbols(x: &[i64], y: &[i64]) -> Result<Self> {
        check_same_len(x.len(), y.len())?;
        Ok(Self::from_counts(x.iter().zip(y).map(|(a, b)| ((vec![*a], vec![*b]), 1))))
    }

    /// Convenience for scalar symbol tables `{(x, y): count}`.
    pub fn from_scalar_counts(counts: &[((i64, i64), u64)]) -> Self {
        Self::from_counts(counts.iter().map(|((x, y), c)| ((vec![*x], vec![*y]), *c)))
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn counts(&self) -> &BTreeMap<(Symbol, Symbol), u64> {
        &self.counts
    }

    pub fn marginal_x(&self) -> BTreeMap<Symbol, u64> {
        let mut m = BTreeMap::new();
        for ((x, _), c) in &self.counts {
            *m.entry(x.clone()).or_insert(0) += c;
        }
        m
    }

    pub fn marginal_y(&self) -> BTreeMap<Symbol, u64> {
        let mut m = BTreeMap::new();
        for ((_, y), c) in &self.counts {
            *m.entry(y.clone()).or_insert(0) += c;
        }
        m
    }

    /// Same table with the roles of X and Y exchanged.
    pub fn transposed(&self) -> Self {
        JointHistogram {
            counts: self.counts.iter().map(|((x, y), c)| ((y.clone(), x.clone()), *c)).collect(),
            n: self.n,
        }
    }

    fn require_nonempty(&self) -> Result<()> {
        if self.n == 0 {
            Err(Error::InsufficientData("empty histogram".into()))
        } else {
            Ok(())
        }
    }

    pub fn entropy_x(&self) -> f64 {
        entropy_of_counts(self.marginal_x().values(), self.n)
    }

    pub fn entropy_y(&self) -> f64 {
        entropy_of_counts(self.marginal_y().values(), self.n)
    }

    pub fn joint_entropy(&self) -> f64 {
        entropy_of_counts(self.counts.values(), self.n)
    }
}

/// `H(X|Y) = sum_y p(y) H(X | Y = y)`.
pub fn conditional_entropy(joint: &JointHistogram) -> Result<f64> {
    joint.require_nonempty()?;
    let mut by_y: BTreeMap<&Symbol, Vec<u64>> = BTreeMap::new();
    for ((_, y), c) in &joint.counts {
        by_y.entry(y).or_default().push(*c);
    }
    let n = joint.n as f64;
    Ok(by_y
        .values()
        .map(|counts| {
            let ny: u64 = counts.iter().sum();
            (ny as f64 / n) * entropy_of_counts(counts, ny)
        })
        .sum())
}

/// `I(X;Y) = H(X) + H(Y) - H(X,Y)`, equal to `H(X) - H(X|Y)` and exactly
/// symmetric in its arguments; tuple symbols give the multivariate form.
pub fn mutual_information(joint: &JointHistogram) -> Result<MeasureResult> {
    joint.require_nonempty()?;
    let value = (joint.entropy_x() + joint.entropy_y() - joint.joint_entropy()).max(0.0);
    Ok(MeasureResult::new(MeasureId::MutualInformation, value, joint.n as usize))
}

/// Scalar mutual information of two symbol sequences.
pub fn mutual_information_symbols(x: &[i64], y: &[i64]) -> Result<f64> {
    Ok(mutual_information(&JointHistogram::from_symbols(x, y)?)?.value.unwrap())
}

/// Row-major `gx × gy` contingency table.
fn grid_mutual_information(sx: &[i64], gx: usize, sy: &[i64], gy: usize) -> f64 {
    let n = sx.len() as u64;
    let mut cells = vec![0u64; gx * gy];
    let mut rows = vec![0u64; gx];
    let mut cols = vec![0u64; gy];
    for (&a, &b) in sx.iter().zip(sy) {
        let (a, b) = (a as usize, b as usize);
        cells[a * gy + b] += 1;
        rows[a] += 1;
        cols[b] += 1;
    }
    entropy_of_counts(&rows, n) + entropy_of_counts(&cols, n) - entropy_of_counts(&cells, n)
}

/// Grid shapes searched by [`mic`] for `n` samples: every `gx, gy >= 2` with
/// `gx * gy < n^alpha`. The 2×2 grid is always included.
pub fn mic_grid_shapes(n: usize, alpha: f64) -> Vec<(usize, usize)> {
    let bound = (n as f64).powf(alpha);
    let mut shapes = vec![(2, 2)];
    for gx in 2..=n {
        if ((gx * 2) as f64) >= bound {
            break;
        }
        for gy in 2..=n {
            if ((gx * gy) as f64) >= bound {
                break;
            }
            if (gx, gy) != (2, 2) {
                shapes.push((gx, gy));
            }
        }
    }
    shapes
}

/// Maximal information coefficient over equal-frequency grids.
///
/// For every admissible shape both axes are split into equal-frequency bins,
/// the grid mutual information is normalised by `log2 min(gx, gy)` and the
/// largest score wins (ties go to the smaller `gx`, then smaller `gy`).
pub fn mic(x: &[f64], y: &[f64], alpha: f64) -> Result<MeasureResult> {
    check_same_len(x.len(), y.len())?;
    let n = x.len();
    if n < MIC_MIN_SAMPLES {
        return Err(Error::SampleSize { required: MIC_MIN_SAMPLES, actual: n });
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Parameter(format!("alpha must be in (0, 1], got {alpha}")));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::Domain("non-finite input to MIC".into()));
    }

    let shapes = mic_grid_shapes(n, alpha);
    let mut x_bins: BTreeMap<usize, Vec<i64>> = BTreeMap::new();
    let mut y_bins: BTreeMap<usize, Vec<i64>> = BTreeMap::new();
    let mut best = (0.0f64, 2usize, 2usize);
    let mut first = true;
    for &(gx, gy) in &shapes {
        let sx = x_bins.entry(gx).or_insert_with(|| equal_frequency_symbols(x, gx));
        let sy = y_bins.entry(gy).or_insert_with(|| equal_frequency_symbols(y, gy));
        let score = grid_mutual_information(sx, gx, sy, gy) / (gx.min(gy) as f64).log2();
        if first || score > best.0 || (score == best.0 && (gx, gy) < (best.1, best.2)) {
            best = (score, gx, gy);
            first = false;
        }
    }
    let value = best.0.clamp(0.0, 1.0);
    Ok(MeasureResult::new(MeasureId::Mic, value, n)
        .with_param("alpha", alpha)
        .with_param("grid_x", best.1 as f64)
        .with_param("grid_y", best.2 as f64)
        .with_param("grids_evaluated", shapes.len() as f64))
}

/// `RSI(S;Y) = I(S;Y) - sum_i I(X_i;Y)`: positive for synergy, negative for
/// redundancy.
pub fn redundancy_synergy_index(
    set: &[Vec<i64>],
    y: &[i64],
    max_set_size: usize,
) -> Result<MeasureResult> {
    if set.is_empty() {
        return Err(Error::Parameter("variable set must not be empty".into()));
    }
    if set.len() > max_set_size {
        return Err(Error::Capacity(format!(
            "set of {} variables exceeds the limit of {max_set_size}",
            set.len()
        )));
    }
    for x in set {
        check_same_len(x.len(), y.len())?;
    }
    if y.is_empty() {
        return Err(Error::InsufficientData("empty input".into()));
    }
    let tuples: Vec<Symbol> = (0..y.len()).map(|r| set.iter().map(|x| x[r]).collect()).collect();
    let targets: Vec<Symbol> = y.iter().map(|v| vec![*v]).collect();
    let whole = mutual_information(&JointHistogram::from_tuples(&tuples, &targets)?)?.value.unwrap();
    let mut parts = 0.0;
    for x in set {
        parts += mutual_information_symbols(x, y)?;
    }
    Ok(MeasureResult::new(MeasureId::RedundancySynergy, whole - parts, y.len())
        .with_param("joint_mi", whole)
        .with_param("sum_pairwise_mi", parts)
        .with_param("set_size", set.len() as f64))
}

/// `IG = H(parent) - sum_t p(t) H(t)` where the children `t` are the groups
/// of rows sharing a `child_assignment` label.
pub fn information_gain(parent: &[i64], child_assignment: &[i64]) -> Result<MeasureResult> {
    check_same_len(parent.len(), child_assignment.len())?;
    if parent.is_empty() {
        return Err(Error::InsufficientData("empty input".into()));
    }
    let n = parent.len() as u64;
    let mut parent_counts: BTreeMap<i64, u64> = BTreeMap::new();
    let mut children: BTreeMap<i64, BTreeMap<i64, u64>> = BTreeMap::new();
    for (&p, &c) in parent.iter().zip(child_assignment) {
        *parent_counts.entry(p).or_insert(0) += 1;
        *children.entry(c).or_default().entry(p).or_insert(0) += 1;
    }
    let h_parent = entropy_of_counts(parent_counts.values(), n);
    let h_children: f64 = children
        .values()
        .map(|child| {
            let size: u64 = child.values().sum();
            (size as f64 / n as f64) * entropy_of_counts(child.values(), size)
        })
        .sum();
    let value = (h_parent - h_children).max(0.0);
    Ok(MeasureResult::new(MeasureId::InformationGain, value, parent.len())
        .with_param("parent_entropy", h_parent)
        .with_param("children", children.len() as f64))
}
