//! Technical indicators and the `f_`/`t_` column builder.
//!
//! Indicators return one entry per input row. Warm-up rows whose value is
//! not yet defined are `None`; they are only trimmed when the feature matrix
//! is assembled.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::timeseries::TimeSeriesFrame;

pub type Series = Vec<Option<f64>>;

pub const MACD_FAST: usize = 12;
pub const MACD_SLOW: usize = 26;
pub const MACD_SIGNAL: usize = 9;
pub const DEFAULT_ATR_PERIOD: usize = 14;
pub const DEFAULT_RSI_PERIOD: usize = 14;

fn check_period(n: usize, what: &str) -> Result<()> {
    if n == 0 {
        Err(Error::Parameter(format!("{what} period must be >= 1")))
    } else {
        Ok(())
    }
}

/// Linearly weighted moving average, newest value weighted `n`.
pub fn wma(series: &[f64], n: usize) -> Result<Series> {
    check_period(n, "wma")?;
    Ok(wma_defined(&series.iter().copied().map(Some).collect::<Vec<_>>(), n))
}

fn wma_defined(series: &[Option<f64>], n: usize) -> Series {
    let norm = (n * (n + 1)) as f64 / 2.0;
    (0..series.len())
        .map(|t| {
            if t + 1 < n {
                return None;
            }
            let mut acc = 0.0;
            for i in 1..=n {
                acc += i as f64 * series[t + i - n]?;
            }
            Some(acc / norm)
        })
        .collect()
}

/// Hull moving average: `wma(2*wma(x, n/2) - wma(x, n), round(sqrt(n)))`.
pub fn hma(series: &[f64], n: usize) -> Result<Series> {
    if n < 4 {
        return Err(Error::Parameter(format!("hma period must be >= 4, got {n}")));
    }
    let input: Vec<Option<f64>> = series.iter().copied().map(Some).collect();
    let half = wma_defined(&input, n / 2);
    let full = wma_defined(&input, n);
    let diff: Series = half
        .iter()
        .zip(&full)
        .map(|(h, f)| Some(2.0 * (*h)? - (*f)?))
        .collect();
    Ok(wma_defined(&diff, (n as f64).sqrt().round() as usize))
}

/// Exponential moving average with `alpha = 2/(n+1)`, seeded with the first
/// value.
pub fn ema(series: &[f64], n: usize) -> Vec<f64> {
    let alpha = 2.0 / (n as f64 + 1.0);
    let mut out = Vec::with_capacity(series.len());
    let mut prev = None;
    for &v in series {
        let next = match prev {
            None => v,
            Some(p) => p + alpha * (v - p),
        };
        out.push(next);
        prev = Some(next);
    }
    out
}

/// Simple `d`-period return `x[t] / x[t-d] - 1`.
pub fn returns(series: &[f64], d: usize) -> Result<Series> {
    returns_defined(&series.iter().copied().map(Some).collect::<Vec<_>>(), d)
}

fn returns_defined(series: &[Option<f64>], d: usize) -> Result<Series> {
    check_period(d, "return")?;
    if let Some((i, v)) = series
        .iter()
        .enumerate()
        .find_map(|(i, v)| v.filter(|v| !(*v > 0.0)).map(|v| (i, v)))
    {
        return Err(Error::Domain(format!("price must be positive, got {v} at row {i}")));
    }
    Ok((0..series.len())
        .map(|t| {
            if t < d {
                return None;
            }
            Some(series[t]? / series[t - d]? - 1.0)
        })
        .collect())
}

/// Day-over-day volume change.
pub fn volume_pct(volume: &[f64]) -> Result<Series> {
    returns(volume, 1).map_err(|_| Error::Domain("volume must be positive for vol_pct".into()))
}

/// MACD line `EMA12 - EMA26` and its `EMA9` signal line. Both are undefined
/// when fewer than 26 values are available.
pub fn macd(close: &[f64]) -> (Series, Series) {
    if close.len() < MACD_SLOW {
        return (vec![None; close.len()], vec![None; close.len()]);
    }
    let fast = ema(close, MACD_FAST);
    let slow = ema(close, MACD_SLOW);
    let line: Vec<f64> = fast.iter().zip(&slow).map(|(f, s)| f - s).collect();
    let signal = ema(&line, MACD_SIGNAL);
    (
        line.into_iter().map(Some).collect(),
        signal.into_iter().map(Some).collect(),
    )
}

/// On-balance volume, starting at zero.
pub fn obv(close: &[f64], volume: &[f64]) -> Result<Vec<f64>> {
    if close.len() != volume.len() {
        return Err(Error::Parameter(format!(
            "close and volume lengths differ ({} vs {})",
            close.len(),
            volume.len()
        )));
    }
    let mut out = Vec::with_capacity(close.len());
    let mut acc = 0.0;
    for t in 0..close.len() {
        if t > 0 {
            let change = close[t] - close[t - 1];
            if change > 0.0 {
                acc += volume[t];
            } else if change < 0.0 {
                acc -= volume[t];
            }
        }
        out.push(acc);
    }
    Ok(out)
}

/// Wilder smoothing over `values[1..]`: the first output (row `n`) is the
/// mean of rows `1..=n`, then `s = (s*(n-1) + v) / n`.
fn wilder_from_row_one(values: &[f64], n: usize) -> Series {
    let mut out = vec![None; values.len()];
    if values.len() <= n {
        return out;
    }
    let mut state = values[1..=n].iter().sum::<f64>() / n as f64;
    out[n] = Some(state);
    for t in n + 1..values.len() {
        state = (state * (n as f64 - 1.0) + values[t]) / n as f64;
        out[t] = Some(state);
    }
    out
}

/// Average true range with Wilder smoothing. True range needs the previous
/// close, so the first value appears at row `n`.
pub fn atr(high: &[f64], low: &[f64], close: &[f64], n: usize) -> Result<Series> {
    check_period(n, "atr")?;
    if high.len() != low.len() || low.len() != close.len() {
        return Err(Error::Parameter("high, low and close lengths differ".into()));
    }
    if let Some(i) = (0..high.len()).find(|&i| high[i] < low[i]) {
        return Err(Error::Domain(format!("high < low at row {i}")));
    }
    let mut tr = vec![0.0; close.len()];
    for t in 1..close.len() {
        tr[t] = (high[t] - low[t])
            .max((high[t] - close[t - 1]).abs())
            .max((low[t] - close[t - 1]).abs());
    }
    Ok(wilder_from_row_one(&tr, n))
}

/// Wilder relative strength index in `[0, 100]`.
pub fn rsi_indicator(close: &[f64], n: usize) -> Result<Series> {
    check_period(n, "rsi")?;
    let mut gains = vec![0.0; close.len()];
    let mut losses = vec![0.0; close.len()];
    for t in 1..close.len() {
        let change = close[t] - close[t - 1];
        gains[t] = change.max(0.0);
        losses[t] = (-change).max(0.0);
    }
    let avg_gain = wilder_from_row_one(&gains, n);
    let avg_loss = wilder_from_row_one(&losses, n);
    Ok(avg_gain
        .iter()
        .zip(&avg_loss)
        .map(|(g, l)| {
            let (g, l) = ((*g)?, (*l)?);
            Some(if l == 0.0 && g == 0.0 {
                50.0
            } else if l == 0.0 {
                100.0
            } else {
                100.0 - 100.0 / (1.0 + g / l)
            })
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndicatorKind {
    Ret,
    VolPct,
    RetHma,
    Macd,
    MacdSignal,
    Obv,
    Atr,
    Rsi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Feature,
    Target,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IndicatorSpec {
    pub kind: IndicatorKind,
    pub period: usize,
    pub role: Role,
}

impl IndicatorSpec {
    pub fn feature(kind: IndicatorKind, period: usize) -> Self {
        IndicatorSpec { kind, period, role: Role::Feature }
    }

    pub fn target(kind: IndicatorKind, period: usize) -> Self {
        IndicatorSpec { kind, period, role: Role::Target }
    }

    /// Column name, e.g. `f_ret_c_hma_5` or `t_ret_c_1`.
    pub fn column_name(&self) -> String {
        let prefix = match self.role {
            Role::Feature => "f",
            Role::Target => "t",
        };
        let body = match self.kind {
            IndicatorKind::Ret => format!("ret_c_{}", self.period),
            IndicatorKind::VolPct => "vol_pct".to_string(),
            IndicatorKind::RetHma => format!("ret_c_hma_{}", self.period),
            IndicatorKind::Macd => "c_macd".to_string(),
            IndicatorKind::MacdSignal => "c_macd_signal".to_string(),
            IndicatorKind::Obv => "obv".to_string(),
            IndicatorKind::Atr if self.period == DEFAULT_ATR_PERIOD => "atr".to_string(),
            IndicatorKind::Atr => format!("atr_{}", self.period),
            IndicatorKind::Rsi if self.period == DEFAULT_RSI_PERIOD => "rsi".to_string(),
            IndicatorKind::Rsi => format!("rsi_{}", self.period),
        };
        format!("{prefix}_{body}")
    }

    /// Rows a target column is shifted forward by: the return duration for
    /// plain returns, one day for everything else.
    fn target_shift(&self) -> usize {
        match self.kind {
            IndicatorKind::Ret => self.period,
            _ => 1,
        }
    }

    fn compute(&self, frame: &TimeSeriesFrame) -> Result<Series> {
        let close = || frame.column("close");
        if self.period == 0 {
            return Err(Error::Parameter(format!("{}: period must be >= 1", self.column_name())));
        }
        match self.kind {
            IndicatorKind::Ret => returns(close()?, self.period),
            IndicatorKind::VolPct => volume_pct(frame.column("volume")?),
            IndicatorKind::RetHma => returns_defined(&hma(close()?, self.period)?, 1),
            IndicatorKind::Macd => Ok(macd(close()?).0),
            IndicatorKind::MacdSignal => Ok(macd(close()?).1),
            IndicatorKind::Obv => {
                Ok(obv(close()?, frame.column("volume")?)?.into_iter().map(Some).collect())
            }
            IndicatorKind::Atr => atr(
                frame.column("high")?,
                frame.column("low")?,
                close()?,
                self.period,
            ),
            IndicatorKind::Rsi => rsi_indicator(close()?, self.period),
        }
    }
}

impl fmt::Display for IndicatorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.column_name())
    }
}

/// The nine features and three targets of the reference experiment.
pub fn default_specs() -> Vec<IndicatorSpec> {
    use IndicatorKind::*;
    vec![
        IndicatorSpec::feature(Ret, 1),
        IndicatorSpec::feature(VolPct, 1),
        IndicatorSpec::feature(RetHma, 5),
        IndicatorSpec::feature(RetHma, 20),
        IndicatorSpec::feature(MacdSignal, 1),
        IndicatorSpec::feature(Macd, 1),
        IndicatorSpec::feature(Obv, 1),
        IndicatorSpec::feature(Atr, DEFAULT_ATR_PERIOD),
        IndicatorSpec::feature(Rsi, DEFAULT_RSI_PERIOD),
        IndicatorSpec::target(Ret, 1),
        IndicatorSpec::target(RetHma, 5),
        IndicatorSpec::target(RetHma, 20),
    ]
}

/// Append one column per spec and trim the rows where any derived value is
/// undefined (warm-up at the head, forward-shifted targets at the tail).
pub fn build_feature_matrix(
    frame: &TimeSeriesFrame,
    specs: &[IndicatorSpec],
) -> Result<TimeSeriesFrame> {
    if specs.is_empty() {
        return Ok(frame.clone());
    }
    let mut names = HashSet::new();
    for spec in specs {
        let name = spec.column_name();
        if frame.has_column(&name) || !names.insert(name.clone()) {
            return Err(Error::Parameter(format!("duplicate output column `{name}`")));
        }
    }

    let len = frame.len();
    let mut derived = Vec::with_capacity(specs.len());
    for spec in specs {
        let mut values = spec.compute(frame)?;
        if spec.role == Role::Target {
            let shift = spec.target_shift();
            values = (0..len).map(|t| values.get(t + shift).copied().flatten()).collect();
        }
        derived.push((spec.column_name(), values));
    }

    let defined = |t: usize| derived.iter().all(|(_, v)| v[t].is_some());
    let first = (0..len).find(|&t| defined(t));
    let Some(first) = first else {
        return Err(Error::InsufficientData(format!(
            "no row has every derived column defined ({len} input rows)"
        )));
    };
    let last = (first..len).rev().find(|&t| defined(t)).unwrap();
    if let Some(t) = (first..=last).find(|&t| !defined(t)) {
        return Err(Error::Domain(format!("derived value undefined inside the frame at row {t}")));
    }

    let trimmed = frame.slice_rows(first..last + 1);
    trimmed.with_columns(
        derived
            .into_iter()
            .map(|(name, v)| (name, v[first..=last].iter().map(|x| x.unwrap()).collect()))
            .collect(),
    )
}
