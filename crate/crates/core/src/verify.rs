//! Synthetic frames with planted dependencies, and the embedded-vs-control
//! comparison used to check that a measure can see them.
//!
//! The generator draws a standardised signal `z` (column `f_signal`) and
//! daily returns `r_t = 0.01·ε_t + strength·0.03·g(z_{t-lag})`, where `g` is
//! the identity, `sign(z)·z²` or a block-wise on/off identity depending on
//! the embedding. Close prices compound the returns from 100.

use std::collections::BTreeMap;
use std::str::FromStr;

use chrono::{Datelike, Days, NaiveDate, Weekday};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::indicators::returns;
use crate::measures::MeasureId;
use crate::search::{run_grid_search, SearchSpace};
use crate::timeseries::TimeSeriesFrame;

pub const SIGNAL_COLUMN: &str = "f_signal";
/// Unshifted one-day close return added by [`with_return_column`].
pub const RETURN_COLUMN: &str = "ret_c";
pub const MIN_SYNTHETIC_LENGTH: usize = 300;
pub const REGIME_BLOCK: usize = 100;
pub const NOISE_SCALE: f64 = 0.01;
pub const SIGNAL_SCALE: f64 = 0.03;

pub const CRITERION: &str =
    "The value of the measure of dependence would be expected to be higher with embeddings than with random data";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseProcess {
    #[default]
    GaussianWalk,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Embedding {
    None,
    LinearLag,
    NonlinearLag,
    RegimePattern,
}

impl FromStr for Embedding {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "none" => Ok(Embedding::None),
            "linear_lag" | "linear" => Ok(Embedding::LinearLag),
            "nonlinear_lag" | "nonlinear" => Ok(Embedding::NonlinearLag),
            "regime_pattern" | "regime" => Ok(Embedding::RegimePattern),
            _ => Err(Error::Parameter(format!(
                "unknown embedding `{s}` (none, linear_lag, nonlinear_lag, regime_pattern)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub length: usize,
    pub base: BaseProcess,
    pub embedding: Embedding,
    pub lag: usize,
    pub strength: f64,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            length: 2000,
            base: BaseProcess::GaussianWalk,
            embedding: Embedding::None,
            lag: 1,
            strength: 1.0,
            seed: 42,
        }
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        if self.length < MIN_SYNTHETIC_LENGTH {
            return Err(Error::Parameter(format!(
                "synthetic length must be >= {MIN_SYNTHETIC_LENGTH}, got {}",
                self.length
            )));
        }
        if !(0.0..=1.0).contains(&self.strength) {
            return Err(Error::Parameter(format!("strength must be in [0, 1], got {}", self.strength)));
        }
        if self.embedding != Embedding::None && (self.lag == 0 || self.lag >= self.length) {
            return Err(Error::Parameter(format!("lag must be in 1..{}, got {}", self.length, self.lag)));
        }
        Ok(())
    }

    fn coupling(&self, t: usize, z: &[f64]) -> f64 {
        if self.embedding == Embedding::None || t < self.lag {
            return 0.0;
        }
        let s = z[t - self.lag];
        match self.embedding {
            Embedding::None => 0.0,
            Embedding::LinearLag => s,
            Embedding::NonlinearLag => s.signum() * s * s,
            Embedding::RegimePattern => {
                if (t / REGIME_BLOCK) % 2 == 0 {
                    s
                } else {
                    0.0
                }
            }
        }
    }
}

/// Consecutive weekdays starting at 2000-01-03.
fn business_days(n: usize) -> Vec<NaiveDate> {
    let mut out = Vec::with_capacity(n);
    let mut d = NaiveDate::from_ymd_opt(2000, 1, 3).expect("valid date");
    while out.len() < n {
        if !matches!(d.weekday(), Weekday::Sat | Weekday::Sun) {
            out.push(d);
        }
        d = d + Days::new(1);
    }
    out
}

/// OHLCV frame plus the `f_signal` column, deterministic per seed.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<TimeSeriesFrame> {
    spec.validate()?;
    let n = spec.length;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut normals = |k: usize| -> Vec<f64> { (0..k).map(|_| rng.sample(StandardNormal)).collect() };
    // Draw order is fixed so that frames differing only in embedding or
    // strength share the same signal and noise.
    let z = normals(n);
    let eps = normals(n);
    let wick_hi = normals(n);
    let wick_lo = normals(n);
    let vol = normals(n);

    let mut close = Vec::with_capacity(n);
    let mut open = Vec::with_capacity(n);
    let mut prev = 100.0;
    for t in 0..n {
        let c = if t == 0 {
            prev
        } else {
            let r = NOISE_SCALE * eps[t] + spec.strength * SIGNAL_SCALE * spec.coupling(t, &z);
            prev * (1.0 + r)
        };
        open.push(prev);
        close.push(c);
        prev = c;
    }
    if let Some(t) = close.iter().position(|c| !(*c > 0.0)) {
        return Err(Error::Domain(format!("synthetic price fell to {} at row {t}", close[t])));
    }
    let high: Vec<f64> = (0..n)
        .map(|t| open[t].max(close[t]) * (1.0 + 0.005 * wick_hi[t].abs()))
        .collect();
    let low: Vec<f64> = (0..n)
        .map(|t| open[t].min(close[t]) * (1.0 - 0.005 * wick_lo[t].abs()).max(0.5))
        .collect();
    let volume: Vec<f64> = vol.iter().map(|v| (1e6 * (0.3 * v).exp()).round()).collect();

    TimeSeriesFrame::new(
        business_days(n),
        vec![
            ("open".into(), open),
            ("high".into(), high),
            ("low".into(), low),
            ("close".into(), close),
            ("volume".into(), volume),
            (SIGNAL_COLUMN.into(), z),
        ],
        format!("synthetic:{:?}:seed={}", spec.embedding, spec.seed),
    )
}

/// Drop the first row and append the one-day close return as [`RETURN_COLUMN`].
/// Frames that already carry the column are returned unchanged.
pub fn with_return_column(frame: &TimeSeriesFrame) -> Result<TimeSeriesFrame> {
    if frame.has_column(RETURN_COLUMN) {
        return Ok(frame.clone());
    }
    let r = returns(frame.column("close")?, 1)?;
    let trimmed = frame.slice_rows(1..frame.len());
    trimmed.with_columns(vec![(RETURN_COLUMN.into(), r[1..].iter().map(|v| v.expect("defined after row 0")).collect())])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyParams {
    pub feature: String,
    pub target: String,
    /// Shaping and measure settings; its axes are overwritten from the fields
    /// above and the requested measures.
    pub space: SearchSpace,
    /// One-sided z quantile of the median-difference test.
    pub z: f64,
    pub seed: u64,
    pub jobs: Option<usize>,
}

impl Default for VerifyParams {
    fn default() -> Self {
        let space = SearchSpace { window_sizes: vec![100], ..SearchSpace::default() };
        VerifyParams {
            feature: SIGNAL_COLUMN.into(),
            target: RETURN_COLUMN.into(),
            space,
            z: 1.645,
            seed: 42,
            jobs: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureVerification {
    pub embedded_median: Option<f64>,
    pub control_median: Option<f64>,
    pub pass: bool,
    pub trials: usize,
    pub degenerate_count: usize,
    pub inconclusive: bool,
    /// Standard errors of the two medians, as used by the pass rule.
    pub embedded_se: Option<f64>,
    pub control_se: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub criterion: String,
    pub feature: String,
    pub target: String,
    pub window_sizes: Vec<usize>,
    pub step: usize,
    pub horizon: usize,
    pub z: f64,
    pub measures: BTreeMap<MeasureId, MeasureVerification>,
}

impl VerificationReport {
    pub fn any_inconclusive(&self) -> bool {
        self.measures.values().any(|m| m.inconclusive)
    }
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

/// Median and its large-sample standard error from the scaled MAD.
fn median_with_se(values: &mut [f64]) -> (f64, f64) {
    values.sort_by(f64::total_cmp);
    let m = median(values);
    let mut dev: Vec<f64> = values.iter().map(|v| (v - m).abs()).collect();
    dev.sort_by(f64::total_cmp);
    let sigma = 1.4826 * median(&dev);
    (m, 1.2533 * sigma / (values.len() as f64).sqrt())
}

/// Compare each measure's median objective on `embedded` against `control`.
/// A measure passes when the embedded median exceeds the control median by
/// more than `z` standard errors of the difference.
pub fn run_verification(
    measure_ids: &[MeasureId],
    embedded: &TimeSeriesFrame,
    control: &TimeSeriesFrame,
    params: &VerifyParams,
) -> Result<VerificationReport> {
    if measure_ids.is_empty() {
        return Err(Error::Parameter("no measures requested".into()));
    }
    let space = SearchSpace {
        feature_sets: vec![vec![params.feature.clone()]],
        targets: vec![params.target.clone()],
        measures: measure_ids.to_vec(),
        ..params.space.clone()
    };
    let prepare = |f: &TimeSeriesFrame| {
        if params.target == RETURN_COLUMN {
            with_return_column(f)
        } else {
            Ok(f.clone())
        }
    };
    let emb_log = run_grid_search(&prepare(embedded)?, &space, params.seed, params.jobs)?;
    let ctl_log = run_grid_search(&prepare(control)?, &space, params.seed, params.jobs)?;

    let mut measures = BTreeMap::new();
    for &m in measure_ids {
        let collect = |log: &crate::search::TrialLog| {
            let recs: Vec<_> = log.records.iter().filter(|r| r.measure == m).collect();
            let usable: Vec<f64> = recs.iter().filter_map(|r| r.usable_objective()).collect();
            (recs.len(), recs.len() - usable.len(), usable)
        };
        let (n_e, d_e, mut e) = collect(&emb_log);
        let (n_c, d_c, mut c) = collect(&ctl_log);
        let inconclusive = e.is_empty() || c.is_empty();
        let (em, ese) = if e.is_empty() { (None, None) } else {
            let (a, b) = median_with_se(&mut e);
            (Some(a), Some(b))
        };
        let (cm, cse) = if c.is_empty() { (None, None) } else {
            let (a, b) = median_with_se(&mut c);
            (Some(a), Some(b))
        };
        let pass = match (em, cm, ese, cse) {
            (Some(em), Some(cm), Some(ese), Some(cse)) => em - cm > params.z * ese.hypot(cse),
            _ => false,
        };
        measures.insert(
            m,
            MeasureVerification {
                embedded_median: em,
                control_median: cm,
                pass,
                trials: n_e + n_c,
                degenerate_count: d_e + d_c,
                inconclusive,
                embedded_se: ese,
                control_se: cse,
            },
        );
    }
    Ok(VerificationReport {
        criterion: CRITERION.into(),
        feature: params.feature.clone(),
        target: params.target.clone(),
        window_sizes: space.window_sizes.clone(),
        step: space.step,
        horizon: space.horizon,
        z: params.z,
        measures,
    })
}
