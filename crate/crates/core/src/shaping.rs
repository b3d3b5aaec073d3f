//! Sliding-window shaping and target discretisation.
//!
//! A window anchored at row `t` covers the history rows `t-W+1 ..= t` and
//! the horizon rows `t+1 ..= t+H`. Anchors start at `W-1` and advance by the
//! step `N` while the horizon still fits in the frame, which gives
//! `floor((T - W - H) / N) + 1` windows for a frame of `T >= W + H` rows.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::timeseries::TimeSeriesFrame;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SampleFormat {
    /// One feature column against the target.
    #[serde(rename = "X:Y")]
    XY,
    /// A set of feature columns against the target.
    #[serde(rename = "S:Y")]
    SY,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairingMode {
    /// History row `k` is paired with the target value at `k + H`.
    #[default]
    Pointwise,
    /// History row `k` is paired with the target path `k+1 ..= k+H`.
    JointHorizon,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WindowSample {
    pub anchor: usize,
    /// `W` rows, oldest first, each holding one value per feature column.
    pub x_block: Vec<Vec<f64>>,
    /// Target values on the same `W` history rows.
    pub target_lags: Vec<f64>,
    /// Target values on rows `anchor+1 ..= anchor+H`.
    pub y_horizon: Vec<f64>,
}

impl WindowSample {
    pub fn width(&self) -> usize {
        self.x_block.len()
    }

    pub fn horizon(&self) -> usize {
        self.y_horizon.len()
    }

    /// First and last row index used by the history block.
    pub fn history_rows(&self) -> (usize, usize) {
        (self.anchor + 1 - self.width(), self.anchor)
    }

    /// First and last row index used by the horizon.
    pub fn horizon_rows(&self) -> (usize, usize) {
        (self.anchor + 1, self.anchor + self.horizon())
    }

    /// Target value at `row - (anchor - W + 1)` in the concatenation of
    /// `target_lags` and `y_horizon`.
    fn target_trace(&self, offset: usize) -> f64 {
        let w = self.width();
        if offset < w {
            self.target_lags[offset]
        } else {
            self.y_horizon[offset - w]
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShapedDataset {
    pub samples: Vec<WindowSample>,
    pub window_width: usize,
    pub step: usize,
    pub horizon: usize,
    pub format: SampleFormat,
}

/// Number of windows a frame of `len` rows yields.
pub fn window_count(len: usize, width: usize, step: usize, horizon: usize) -> usize {
    if step == 0 || len < width + horizon {
        0
    } else {
        (len - width - horizon) / step + 1
    }
}

/// Anchor row indices for a frame of `len` rows.
pub fn window_anchors(
    len: usize,
    width: usize,
    step: usize,
    horizon: usize,
) -> impl Iterator<Item = usize> {
    let count = window_count(len, width, step, horizon);
    (0..count).map(move |i| width - 1 + i * step)
}

pub fn make_sliding_windows<S: AsRef<str>>(
    frame: &TimeSeriesFrame,
    feature_cols: &[S],
    target_col: &str,
    width: usize,
    step: usize,
    horizon: usize,
) -> Result<ShapedDataset> {
    if width == 0 || step == 0 || horizon == 0 {
        return Err(Error::Parameter(format!(
            "window width, step and horizon must be >= 1 (got W={width}, N={step}, H={horizon})"
        )));
    }
    if feature_cols.is_empty() {
        return Err(Error::Parameter("at least one feature column is required".into()));
    }
    let features = feature_cols
        .iter()
        .map(|c| frame.column(c.as_ref()))
        .collect::<Result<Vec<_>>>()?;
    let target = frame.column(target_col)?;

    let samples = window_anchors(frame.len(), width, step, horizon)
        .map(|anchor| {
            let rows = anchor + 1 - width..=anchor;
            WindowSample {
                anchor,
                x_block: rows
                    .clone()
                    .map(|r| features.iter().map(|col| col[r]).collect())
                    .collect(),
                target_lags: target[rows].to_vec(),
                y_horizon: target[anchor + 1..=anchor + horizon].to_vec(),
            }
        })
        .collect();

    Ok(ShapedDataset {
        samples,
        window_width: width,
        step,
        horizon,
        format: if feature_cols.len() == 1 { SampleFormat::XY } else { SampleFormat::SY },
    })
}

/// Paired populations cut from one window: `xs[j]` is the feature tuple on
/// history row `j`, `ys[j]` its target (one value, or `H` values in joint
/// mode).
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePairs {
    pub xs: Vec<Vec<f64>>,
    pub ys: Vec<Vec<f64>>,
}

impl SamplePairs {
    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    /// Column `j` of the feature tuples.
    pub fn x_column(&self, j: usize) -> Vec<f64> {
        self.xs.iter().map(|x| x[j]).collect()
    }

    /// Scalar view of the targets: the value itself in pointwise mode, the
    /// mean of the path in joint mode.
    pub fn y_scalar(&self) -> Vec<f64> {
        self.ys
            .iter()
            .map(|y| y.iter().sum::<f64>() / y.len() as f64)
            .collect()
    }
}

pub fn pair_samples(sample: &WindowSample, mode: PairingMode) -> SamplePairs {
    let h = sample.horizon();
    let ys = (0..sample.width())
        .map(|j| match mode {
            PairingMode::Pointwise => vec![sample.target_trace(j + h)],
            PairingMode::JointHorizon => (j + 1..=j + h).map(|o| sample.target_trace(o)).collect(),
        })
        .collect();
    SamplePairs { xs: sample.x_block.clone(), ys }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteSeries {
    pub symbols: Vec<i64>,
    pub bin_width: f64,
    /// Left edge of bin 0.
    pub origin: f64,
}

impl DiscreteSeries {
    /// Half-open value interval covered by `symbol`.
    pub fn bin_interval(&self, symbol: i64) -> (f64, f64) {
        let left = self.origin + symbol as f64 * self.bin_width;
        (left, left + self.bin_width)
    }
}

/// Fixed-width binning: symbol `k` covers `[origin + k*w, origin + (k+1)*w)`.
pub fn discretize(values: &[f64], bin_width: f64, origin: f64) -> Result<DiscreteSeries> {
    if !(bin_width > 0.0) || !bin_width.is_finite() {
        return Err(Error::Parameter(format!("bin width must be positive, got {bin_width}")));
    }
    let symbols = values
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            if !v.is_finite() {
                return Err(Error::Domain(format!("non-finite value {v} at position {i}")));
            }
            Ok(((v - origin) / bin_width).floor() as i64)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DiscreteSeries { symbols, bin_width, origin })
}

/// Equal-frequency binning into at most `bins` symbols `0..bins`.
///
/// A value whose lowest rank (count of strictly smaller values) is `r` lands
/// in bin `floor(r * bins / n)`, so ties always share a bin and any strictly
/// increasing transform of `values` yields identical symbols.
pub fn equal_frequency_symbols(values: &[f64], bins: usize) -> Vec<i64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut symbols = vec![0i64; n];
    let mut run_start = 0;
    for (pos, &idx) in order.iter().enumerate() {
        if pos > 0 && values[idx] != values[order[pos - 1]] {
            run_start = pos;
        }
        symbols[idx] = (run_start * bins / n) as i64;
    }
    symbols
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::NaiveDate;

    fn frame(len: usize) -> TimeSeriesFrame {
        let start = NaiveDate::from_ymd_opt(2020, 1, 1).unwrap();
        TimeSeriesFrame::new(
            (0..len).map(|i| start + chrono::Days::new(i as u64)).collect(),
            vec![
                ("a".into(), (0..len).map(|i| i as f64).collect()),
                ("b".into(), (0..len).map(|i| 100.0 + i as f64).collect()),
                ("y".into(), (0..len).map(|i| -(i as f64)).collect()),
            ],
            "test",
        )
        .unwrap()
    }

    #[test]
    fn ten_rows_give_three_windows() {
        let ds = make_sliding_windows(&frame(10), &["a"], "y", 4, 2, 2).unwrap();
        let anchors: Vec<_> = ds.samples.iter().map(|s| s.anchor).collect();
        assert_eq!(anchors, vec![3, 5, 7]);
        assert_eq!(ds.format, SampleFormat::XY);
        let s = &ds.samples[0];
        assert_eq!(s.x_block, vec![vec![0.0], vec![1.0], vec![2.0], vec![3.0]]);
        assert_eq!(s.y_horizon, vec![-4.0, -5.0]);
    }

    #[test]
    fn six_rows_give_one_window() {
        let ds = make_sliding_windows(&frame(6), &["a"], "y", 4, 2, 2).unwrap();
        assert_eq!(ds.samples.len(), 1);
        assert_eq!(ds.samples[0].anchor, 3);
    }

    #[test]
    fn short_frame_gives_no_windows() {
        let ds = make_sliding_windows(&frame(5), &["a"], "y", 4, 2, 2).unwrap();
        assert!(ds.samples.is_empty());
    }

    #[test]
    fn multi_feature_is_set_format() {
        let ds = make_sliding_windows(&frame(10), &["a", "b"], "y", 3, 1, 1).unwrap();
        assert_eq!(ds.format, SampleFormat::SY);
        assert_eq!(ds.samples[0].x_block[2], vec![2.0, 102.0]);
    }

    #[test]
    fn unknown_column_and_bad_params() {
        let f = frame(10);
        assert!(matches!(
            make_sliding_windows(&f, &["zz"], "y", 4, 2, 2),
            Err(Error::UnknownColumn(_))
        ));
        assert!(matches!(
            make_sliding_windows(&f, &["a"], "nope", 4, 2, 2),
            Err(Error::UnknownColumn(_))
        ));
        assert!(matches!(make_sliding_windows(&f, &["a"], "y", 0, 2, 2), Err(Error::Parameter(_))));
    }

    #[test]
    fn pointwise_pairs() {
        let ds = make_sliding_windows(&frame(10), &["a"], "y", 3, 1, 2).unwrap();
        let s = &ds.samples[0]; // anchor 2
        let pairs = pair_samples(s, PairingMode::Pointwise);
        assert_eq!(pairs.len(), 3);
        // row k pairs with target at k + H
        assert_eq!(pairs.ys, vec![vec![-2.0], vec![-3.0], vec![-4.0]]);
        assert_eq!(pairs.x_column(0), vec![0.0, 1.0, 2.0]);
    }

    #[test]
    fn joint_horizon_pairs() {
        let ds = make_sliding_windows(&frame(10), &["a"], "y", 3, 1, 2).unwrap();
        let pairs = pair_samples(&ds.samples[0], PairingMode::JointHorizon);
        assert_eq!(pairs.len(), 3);
        assert_eq!(pairs.ys, vec![vec![-1.0, -2.0], vec![-2.0, -3.0], vec![-3.0, -4.0]]);
        assert_eq!(pairs.ys[2], ds.samples[0].y_horizon);
        assert_eq!(pairs.y_scalar()[0], -1.5);
    }

    #[test]
    fn constant_block_pairs_have_equal_x() {
        let sample = WindowSample {
            anchor: 2,
            x_block: vec![vec![7.0]; 3],
            target_lags: vec![1.0, 2.0, 3.0],
            y_horizon: vec![4.0, 5.0],
        };
        for mode in [PairingMode::Pointwise, PairingMode::JointHorizon] {
            let pairs = pair_samples(&sample, mode);
            assert!(pairs.xs.iter().all(|x| x == &vec![7.0]));
        }
    }

    #[test]
    fn discretize_examples() {
        let ds = discretize(&[0.0234, 0.0, -0.0005], 0.001, 0.0).unwrap();
        assert_eq!(ds.symbols, vec![23, 0, -1]);
        let (lo, hi) = ds.bin_interval(23);
        assert!(lo <= 0.0234 && 0.0234 < hi);
        assert!(matches!(discretize(&[f64::NAN], 0.001, 0.0), Err(Error::Domain(_))));
        assert!(matches!(discretize(&[1.0], 0.0, 0.0), Err(Error::Parameter(_))));
    }

    #[test]
    fn equal_frequency_handles_ties() {
        assert_eq!(equal_frequency_symbols(&[4.0, 1.0, 3.0, 2.0], 2), vec![1, 0, 1, 0]);
        assert_eq!(equal_frequency_symbols(&[1.0, 2.0, 2.0, 2.0], 2), vec![0, 0, 0, 0]);
        assert_eq!(equal_frequency_symbols(&[5.0; 6], 3), vec![0; 6]);
    }
}
