//! Brute-force reference implementations used as test oracles. They follow
//! the textbook definitions directly and share no code with the crate.

#![allow(dead_code)]

use std::collections::HashMap;

use chrono::{Days, NaiveDate};
use depscope::TimeSeriesFrame;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-10.0..10.0)).collect()
}

/// Values on a coarse grid so that ties are common.
pub fn tied_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(0..5) as f64 * 0.5).collect()
}

pub fn symbols(rng: &mut ChaCha8Rng, n: usize, alphabet: i64) -> Vec<i64> {
    (0..n).map(|_| rng.random_range(0..alphabet)).collect()
}

pub fn oracle_pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    for i in 0..x.len() {
        cov += (x[i] - mx) * (y[i] - my);
    }
    cov /= n - 1.0;
    let sx = (x.iter().map(|v| (v - mx).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    let sy = (y.iter().map(|v| (v - my).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    cov / (sx * sy)
}

/// Rank by counting: (number smaller) + (number equal + 1) / 2.
pub fn oracle_ranks(v: &[f64]) -> Vec<f64> {
    v.iter()
        .map(|a| {
            let less = v.iter().filter(|b| *b < a).count() as f64;
            let equal = v.iter().filter(|b| *b == a).count() as f64;
            less + (equal + 1.0) / 2.0
        })
        .collect()
}

pub fn oracle_spearman(x: &[f64], y: &[f64]) -> f64 {
    oracle_pearson(&oracle_ranks(x), &oracle_ranks(y))
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt()
}

/// Squared distance covariance via the `S1 + S2 - 2 S3` expansion, which
/// needs no centred matrices.
pub fn oracle_dcov2(x: &[Vec<f64>], y: &[Vec<f64>]) -> f64 {
    let n = x.len();
    let nf = n as f64;
    let (mut s1, mut ax, mut ay, mut s3) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            let dx = dist(&x[i], &x[j]);
            let dy = dist(&y[i], &y[j]);
            s1 += dx * dy;
            ax += dx;
            ay += dy;
            for k in 0..n {
                s3 += dx * dist(&y[i], &y[k]);
            }
        }
    }
    s1 / (nf * nf) + (ax / (nf * nf)) * (ay / (nf * nf)) - 2.0 * s3 / (nf * nf * nf)
}

pub fn oracle_dcor(x: &[Vec<f64>], y: &[Vec<f64>]) -> f64 {
    let v = oracle_dcov2(x, y);
    let vx = oracle_dcov2(x, x);
    let vy = oracle_dcov2(y, y);
    if vx * vy <= 0.0 {
        return 0.0;
    }
    (v.max(0.0) / (vx * vy).sqrt()).sqrt()
}

/// `sum p(x,y) log2(p(x,y) / (p(x) p(y)))` over observed cells.
pub fn oracle_mi(x: &[i64], y: &[i64]) -> f64 {
    let n = x.len() as f64;
    let mut joint: HashMap<(i64, i64), f64> = HashMap::new();
    let mut px: HashMap<i64, f64> = HashMap::new();
    let mut py: HashMap<i64, f64> = HashMap::new();
    for (a, b) in x.iter().zip(y) {
        *joint.entry((*a, *b)).or_default() += 1.0 / n;
        *px.entry(*a).or_default() += 1.0 / n;
        *py.entry(*b).or_default() += 1.0 / n;
    }
    let mut keys: Vec<_> = joint.keys().copied().collect();
    keys.sort();
    keys.iter()
        .map(|k| {
            let p = joint[k];
            p * (p / (px[&k.0] * py[&k.1])).log2()
        })
        .sum()
}

pub fn oracle_entropy(x: &[i64]) -> f64 {
    let n = x.len() as f64;
    let mut counts: HashMap<i64, f64> = HashMap::new();
    for a in x {
        *counts.entry(*a).or_default() += 1.0;
    }
    let mut c: Vec<f64> = counts.into_values().collect();
    c.sort_by(f64::total_cmp);
    -c.iter().map(|k| (k / n) * (k / n).log2()).sum::<f64>()
}

/// Parent entropy minus the size-weighted entropy of each child group.
pub fn oracle_ig(parent: &[i64], child: &[i64]) -> f64 {
    let n = parent.len() as f64;
    let mut labels: Vec<i64> = child.to_vec();
    labels.sort();
    labels.dedup();
    let mut weighted = 0.0;
    for l in labels {
        let group: Vec<i64> = parent
            .iter()
            .zip(child)
            .filter(|(_, c)| **c == l)
            .map(|(p, _)| *p)
            .collect();
        weighted += group.len() as f64 / n * oracle_entropy(&group);
    }
    oracle_entropy(parent) - weighted
}

/// Interaction information by inclusion-exclusion over entropies:
/// `I(X1,X2;Y) - I(X1;Y) - I(X2;Y)` written as a sum of joint entropies.
pub fn oracle_rsi2(x1: &[i64], x2: &[i64], y: &[i64]) -> f64 {
    let pair = |a: &[i64], b: &[i64]| -> Vec<i64> { a.iter().zip(b).map(|(p, q)| p * 1000 + q).collect() };
    let triple: Vec<i64> = x1
        .iter()
        .zip(x2)
        .zip(y)
        .map(|((a, b), c)| a * 1_000_000 + b * 1000 + c)
        .collect();
    let h = oracle_entropy;
    // I(X1X2;Y) - I(X1;Y) - I(X2;Y)
    //   = -H(X1) - H(X2) - H(Y) + H(X1X2) + H(X1Y) + H(X2Y) - H(X1X2Y)
    -h(x1) - h(x2) - h(y) + h(&pair(x1, x2)) + h(&pair(x1, y)) + h(&pair(x2, y)) - h(&triple)
}

/// Equal-frequency bin by explicit counting of strictly smaller values.
pub fn oracle_ef_bins(v: &[f64], bins: usize) -> Vec<usize> {
    let n = v.len();
    v.iter()
        .map(|a| v.iter().filter(|b| *b < a).count() * bins / n)
        .collect()
}

/// Exhaustive MIC over every grid `gx, gy >= 2` with `gx * gy < n^alpha`
/// (plus 2×2), with equal-frequency partitions on both axes. Returns the
/// best score and its grid; ties keep the first grid in `(gx, gy)` order.
pub fn oracle_mic(x: &[f64], y: &[f64], alpha: f64) -> (f64, usize, usize) {
    let n = x.len();
    let bound = (n as f64).powf(alpha);
    let mut best: Option<(f64, usize, usize)> = None;
    for gx in 2..=n {
        for gy in 2..=n {
            if (gx * gy) as f64 >= bound && (gx, gy) != (2, 2) {
                continue;
            }
            let bx: Vec<i64> = oracle_ef_bins(x, gx).into_iter().map(|b| b as i64).collect();
            let by: Vec<i64> = oracle_ef_bins(y, gy).into_iter().map(|b| b as i64).collect();
            let score = oracle_mi(&bx, &by) / (gx.min(gy) as f64).log2();
            if best.is_none_or(|b| score > b.0 + 1e-12) {
                best = Some((score, gx, gy));
            }
        }
    }
    best.unwrap()
}

pub fn day(i: usize) -> NaiveDate {
    NaiveDate::from_ymd_opt(2020, 1, 1).unwrap() + Days::new(i as u64)
}

/// Frame whose columns hold their own row index (and its negation), so the
/// rows a window touched can be read back from its values.
pub fn index_frame(len: usize) -> TimeSeriesFrame {
    TimeSeriesFrame::new(
        (0..len).map(day).collect(),
        vec![
            ("x".into(), (0..len).map(|i| i as f64).collect()),
            ("y".into(), (0..len).map(|i| -(i as f64)).collect()),
        ],
        "index",
    )
    .unwrap()
}
