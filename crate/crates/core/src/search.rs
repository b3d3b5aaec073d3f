//! Exhaustive search over window size × feature set × target × measure.
//!
//! Every configuration is evaluated on each window anchor of the step grid,
//! and every evaluation becomes one [`TrialRecord`] tagged with the trend
//! regime at its anchor. Records are produced in a fixed order regardless of
//! how many workers run the trials.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use chrono::NaiveDate;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::indicators::{default_specs, Role};
use crate::measures::info::{
    information_gain, mic, mutual_information, redundancy_synergy_index, JointHistogram, Symbol,
    DEFAULT_MAX_SET_SIZE, DEFAULT_MIC_ALPHA, MAX_BINS_PER_AXIS,
};
use crate::measures::model::{pps, TreeParams};
use crate::measures::stat::{distance_correlation, pearson, spearman};
use crate::measures::{MeasureId, MeasureResult};
use crate::shaping::{
    discretize, equal_frequency_symbols, make_sliding_windows, pair_samples, PairingMode, SamplePairs,
};
use crate::timeseries::TimeSeriesFrame;

pub const MIN_WINDOW_SIZE: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Trend {
    Up,
    Down,
    Neutral,
}

impl fmt::Display for Trend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Trend::Up => "UP",
            Trend::Down => "DOWN",
            Trend::Neutral => "NEUTRAL",
        })
    }
}

impl FromStr for Trend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "UP" => Ok(Trend::Up),
            "DOWN" => Ok(Trend::Down),
            "NEUTRAL" => Ok(Trend::Neutral),
            _ => Err(Error::Parameter(format!("unknown trend `{s}` (UP, DOWN, NEUTRAL)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrendLabel {
    pub trend: Trend,
    /// Set when the lookback reaches before the first row.
    pub warning: bool,
}

/// Backward-looking trend at `anchor`: the return over `lookback` rows is
/// compared against `±threshold`.
pub fn label_trend(close: &[f64], anchor: usize, lookback: usize, threshold: f64) -> TrendLabel {
    if anchor < lookback || anchor >= close.len() {
        return TrendLabel { trend: Trend::Neutral, warning: true };
    }
    let r = close[anchor] / close[anchor - lookback] - 1.0;
    let trend = if r > threshold {
        Trend::Up
    } else if r < -threshold {
        Trend::Down
    } else {
        Trend::Neutral
    };
    TrendLabel { trend, warning: false }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchSpace {
    pub window_sizes: Vec<usize>,
    pub feature_sets: Vec<Vec<String>>,
    pub targets: Vec<String>,
    pub measures: Vec<MeasureId>,
    pub horizon: usize,
    pub step: usize,
    pub pairing: PairingMode,
    /// Target bin width in return units (0.001 = 10 basis points).
    pub bin_width: f64,
    /// Equal-frequency bins per feature for the discrete measures.
    pub feature_bins: usize,
    /// Trials with fewer pairs are flagged degenerate.
    pub min_pairs: usize,
    pub trend_lookback: usize,
    pub trend_threshold: f64,
    pub mic_alpha: f64,
    pub pps_folds: usize,
    pub tree: TreeParams,
    pub max_set_size: usize,
}

impl Default for SearchSpace {
    /// The reference experiment: W ∈ {50, 100, 150, 200}, N = 100, 10 bp
    /// target bins, every table feature against every table target, scored
    /// with MI, DC and MIC.
    fn default() -> Self {
        let specs = default_specs();
        let names = |role| {
            specs
                .iter()
                .filter(|s| s.role == role)
                .map(|s| s.column_name())
                .collect::<Vec<_>>()
        };
        SearchSpace {
            window_sizes: vec![50, 100, 150, 200],
            feature_sets: names(Role::Feature).into_iter().map(|n| vec![n]).collect(),
            targets: names(Role::Target),
            measures: vec![MeasureId::MutualInformation, MeasureId::DistanceCorrelation, MeasureId::Mic],
            horizon: 1,
            step: 100,
            pairing: PairingMode::Pointwise,
            bin_width: 0.001,
            feature_bins: 8,
            min_pairs: 100,
            trend_lookback: 20,
            trend_threshold: 0.02,
            mic_alpha: DEFAULT_MIC_ALPHA,
            pps_folds: 4,
            tree: TreeParams::default(),
            max_set_size: DEFAULT_MAX_SET_SIZE,
        }
    }
}

impl SearchSpace {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Parameter(m));
        if self.window_sizes.is_empty()
            || self.feature_sets.is_empty()
            || self.targets.is_empty()
            || self.measures.is_empty()
        {
            return fail("every search axis needs at least one value".into());
        }
        if let Some(w) = self.window_sizes.iter().find(|&&w| w < MIN_WINDOW_SIZE) {
            return fail(format!("window size {w} is below the minimum of {MIN_WINDOW_SIZE}"));
        }
        if self.feature_sets.iter().any(Vec::is_empty) {
            return fail("feature sets must not be empty".into());
        }
        if self.step == 0 || self.horizon == 0 {
            return fail("step and horizon must be >= 1".into());
        }
        if !(self.bin_width > 0.0 && self.bin_width.is_finite()) {
            return fail(format!("bin width must be positive, got {}", self.bin_width));
        }
        if !(2..=MAX_BINS_PER_AXIS).contains(&self.feature_bins) {
            return fail(format!("feature bins must be in 2..={MAX_BINS_PER_AXIS}"));
        }
        if self.pps_folds == 0 {
            return fail("pps folds must be >= 1".into());
        }
        Ok(())
    }

    /// Every column the search reads, including `close` for trend labels.
    pub fn required_columns(&self) -> Vec<&str> {
        let mut cols: Vec<&str> = self
            .feature_sets
            .iter()
            .flatten()
            .map(String::as_str)
            .chain(self.targets.iter().map(String::as_str))
            .collect();
        cols.push("close");
        cols
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial_id: usize,
    pub window_size: usize,
    pub feature_set: Vec<String>,
    pub target: String,
    pub measure: MeasureId,
    pub anchor_date: NaiveDate,
    pub anchor_index: usize,
    pub trend: Trend,
    pub objective: Option<f64>,
    pub degenerate: bool,
}

impl TrialRecord {
    /// Configuration identifier `W:features:target:measure`, shared by all
    /// anchors of one configuration.
    pub fn config_key(&self) -> String {
        config_key(self.window_size, &self.feature_set, &self.target, self.measure)
    }

    pub fn features_joined(&self) -> String {
        self.feature_set.join("|")
    }

    pub fn usable_objective(&self) -> Option<f64> {
        if self.degenerate {
            None
        } else {
            self.objective
        }
    }
}

pub fn config_key(window: usize, features: &[String], target: &str, measure: MeasureId) -> String {
    format!("{window}:{}:{target}:{measure}", features.join("|"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub started_at: String,
    pub elapsed_ms: u128,
    pub jobs: usize,
    pub record_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialLog {
    pub seed: u64,
    pub space: SearchSpace,
    pub records: Vec<TrialRecord>,
    /// Wall-clock information; kept out of the log body.
    #[serde(skip)]
    pub metadata: Option<RunMetadata>,
}

/// Evaluate one measure on the pairs of one window. Numeric problems and
/// unsupported combinations come back as degenerate results.
pub fn evaluate_on_pairs(
    measure: MeasureId,
    pairs: &SamplePairs,
    space: &SearchSpace,
    seed: u64,
) -> MeasureResult {
    let n = pairs.len();
    let features = pairs.xs.first().map_or(0, Vec::len);
    let mut result = if measure.is_pairwise() && features != 1 {
        MeasureResult::degenerate(measure, n, "pairwise measure needs exactly one feature")
    } else {
        compute(measure, pairs, space, seed)
            .unwrap_or_else(|e| MeasureResult::degenerate(measure, n, e.to_string()))
    };
    if n < space.min_pairs && !result.degenerate {
        result.degenerate = true;
        result.notice = Some(format!("{n} pairs is below the minimum of {}", space.min_pairs));
    }
    result
}

fn compute(measure: MeasureId, pairs: &SamplePairs, space: &SearchSpace, seed: u64) -> Result<MeasureResult> {
    let features = pairs.xs[0].len();
    match measure {
        MeasureId::Pearson => pearson(&pairs.x_column(0), &pairs.y_scalar()),
        MeasureId::Spearman => spearman(&pairs.x_column(0), &pairs.y_scalar()),
        MeasureId::Mic => mic(&pairs.x_column(0), &pairs.y_scalar(), space.mic_alpha),
        MeasureId::DistanceCorrelation => distance_correlation(&pairs.xs, &pairs.ys),
        MeasureId::Pps => pps(&pairs.xs, &pairs.y_scalar(), space.pps_folds, seed, space.tree),
        MeasureId::MutualInformation => {
            let xs = feature_symbols(pairs, space.feature_bins);
            let ys = target_symbols(pairs, space.bin_width)?;
            mutual_information(&JointHistogram::from_tuples(&xs, &ys)?)
        }
        MeasureId::InformationGain => {
            let parent = flatten_symbols(&target_symbols(pairs, space.bin_width)?);
            let child = flatten_symbols(&feature_symbols(pairs, space.feature_bins));
            information_gain(&parent, &child)
        }
        MeasureId::RedundancySynergy => {
            let set: Vec<Vec<i64>> = (0..features)
                .map(|j| equal_frequency_symbols(&pairs.x_column(j), space.feature_bins))
                .collect();
            let y = flatten_symbols(&target_symbols(pairs, space.bin_width)?);
            redundancy_synergy_index(&set, &y, space.max_set_size)
        }
    }
}

/// Equal-frequency bins per feature column, combined into one tuple per row.
fn feature_symbols(pairs: &SamplePairs, bins: usize) -> Vec<Symbol> {
    let features = pairs.xs[0].len();
    let cols: Vec<Vec<i64>> = (0..features)
        .map(|j| equal_frequency_symbols(&pairs.x_column(j), bins))
        .collect();
    (0..pairs.len()).map(|r| cols.iter().map(|c| c[r]).collect()).collect()
}

/// Fixed-width bins (origin 0) per horizon step, one tuple per row.
fn target_symbols(pairs: &SamplePairs, bin_width: f64) -> Result<Vec<Symbol>> {
    pairs
        .ys
        .iter()
        .map(|y| discretize(y, bin_width, 0.0).map(|d| d.symbols))
        .collect()
}

/// Relabel tuple symbols as dense integers in tuple order.
fn flatten_symbols(symbols: &[Symbol]) -> Vec<i64> {
    let mut ids: BTreeMap<&Symbol, i64> = BTreeMap::new();
    for s in symbols {
        let next = ids.len() as i64;
        ids.entry(s).or_insert(next);
    }
    symbols.iter().map(|s| ids[s]).collect()
}

fn check_columns(frame: &TimeSeriesFrame, space: &SearchSpace) -> Result<()> {
    for col in space.required_columns() {
        frame.column(col)?;
    }
    Ok(())
}

/// Run every (window, feature set, target, measure) configuration on every
/// anchor. `jobs` caps the worker count (`None` uses all cores).
pub fn run_grid_search(
    frame: &TimeSeriesFrame,
    space: &SearchSpace,
    seed: u64,
    jobs: Option<usize>,
) -> Result<TrialLog> {
    space.validate()?;
    check_columns(frame, space)?;
    let started = Instant::now();
    let started_at = chrono::Utc::now().to_rfc3339();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::Parameter(format!("cannot start worker pool: {e}")))?;
    let workers = pool.current_num_threads();

    let close = frame.column("close")?;
    let timestamps = frame.timestamps();

    struct Task<'a> {
        window: usize,
        feature_set: &'a Vec<String>,
        target: &'a String,
        measure: MeasureId,
        pairs: std::sync::Arc<SamplePairs>,
        anchor: usize,
    }

    let mut tasks = Vec::new();
    for &window in &space.window_sizes {
        for feature_set in &space.feature_sets {
            for target in &space.targets {
                let dataset =
                    make_sliding_windows(frame, feature_set, target, window, space.step, space.horizon)?;
                let shaped: Vec<(usize, std::sync::Arc<SamplePairs>)> = dataset
                    .samples
                    .iter()
                    .map(|s| {
                        debug_assert!(s.history_rows().1 < s.horizon_rows().0);
                        debug_assert!(s.horizon_rows().1 < frame.len());
                        (s.anchor, std::sync::Arc::new(pair_samples(s, space.pairing)))
                    })
                    .collect();
                for &measure in &space.measures {
                    for (anchor, pairs) in &shaped {
                        tasks.push(Task {
                            window,
                            feature_set,
                            target,
                            measure,
                            pairs: pairs.clone(),
                            anchor: *anchor,
                        });
                    }
                }
            }
        }
    }
    log::info!("grid search: {} trials on {workers} workers", tasks.len());

    let results: Vec<MeasureResult> = pool.install(|| {
        tasks
            .par_iter()
            .map(|t| evaluate_on_pairs(t.measure, &t.pairs, space, seed))
            .collect()
    });

    let records = tasks
        .iter()
        .zip(results)
        .enumerate()
        .map(|(trial_id, (t, result))| TrialRecord {
            trial_id,
            window_size: t.window,
            feature_set: t.feature_set.clone(),
            target: t.target.clone(),
            measure: t.measure,
            anchor_date: timestamps[t.anchor],
            anchor_index: t.anchor,
            trend: label_trend(close, t.anchor, space.trend_lookback, space.trend_threshold).trend,
            objective: result.value,
            degenerate: result.degenerate,
        })
        .collect::<Vec<_>>();

    let record_count = records.len();
    Ok(TrialLog {
        seed,
        space: space.clone(),
        records,
        metadata: Some(RunMetadata {
            started_at,
            elapsed_ms: started.elapsed().as_millis(),
            jobs: workers,
            record_count,
        }),
    })
}

fn median_of(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

/// Search axis used to group records when ranking.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    Window,
    Features,
    Target,
    Measure,
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "window" | "window_size" => Ok(Axis::Window),
            "feature" | "features" | "feature_set" => Ok(Axis::Features),
            "target" => Ok(Axis::Target),
            "measure" => Ok(Axis::Measure),
            _ => Err(Error::Parameter(format!(
                "unknown axis `{s}` (window, features, target, measure)"
            ))),
        }
    }
}

impl Axis {
    fn group_of(self, r: &TrialRecord) -> String {
        match self {
            Axis::Window => r.window_size.to_string(),
            Axis::Features => r.features_joined(),
            Axis::Target => r.target.clone(),
            Axis::Measure => r.measure.to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankFilter {
    pub trend: Option<Trend>,
    pub measure: Option<MeasureId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankEntry {
    pub group: String,
    pub median_objective: f64,
    pub trials: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingReport {
    pub group_by: Axis,
    pub filter: RankFilter,
    /// Sorted by descending median objective.
    pub entries: Vec<RankEntry>,
    pub best: Option<String>,
    pub worst: Option<String>,
    pub notice: Option<String>,
}

/// Median objective per group over the non-degenerate records that pass
/// `filter`.
pub fn rank_hyperparameters(log: &TrialLog, group_by: Axis, filter: RankFilter) -> RankingReport {
    let mut groups: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for r in &log.records {
        if filter.trend.is_some_and(|t| t != r.trend) || filter.measure.is_some_and(|m| m != r.measure) {
            continue;
        }
        if let Some(v) = r.usable_objective() {
            groups.entry(group_by.group_of(r)).or_default().push(v);
        }
    }
    let mut entries: Vec<RankEntry> = groups
        .into_iter()
        .map(|(group, mut values)| RankEntry {
            trials: values.len(),
            median_objective: median_of(&mut values),
            group,
        })
        .collect();
    entries.sort_by(|a, b| {
        b.median_objective
            .total_cmp(&a.median_objective)
            .then_with(|| a.group.cmp(&b.group))
    });
    let notice = entries
        .is_empty()
        .then(|| "no usable trials after filtering".to_string());
    RankingReport {
        group_by,
        filter,
        best: entries.first().map(|e| e.group.clone()),
        worst: entries.last().map(|e| e.group.clone()),
        entries,
        notice,
    }
}

/// Median objective of every configuration with at least one usable trial.
pub fn aggregate_by_config(log: &TrialLog) -> BTreeMap<String, f64> {
    let mut groups: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for r in &log.records {
        if let Some(v) = r.usable_objective() {
            groups.entry(r.config_key()).or_default().push(v);
        }
    }
    groups
        .into_iter()
        .map(|(k, mut v)| (k, median_of(&mut v)))
        .collect()
}

/// Spearman correlation between aggregated objectives and externally
/// supplied production-model scores keyed by [`TrialRecord::config_key`].
pub fn correlate_measure_with_scores(
    log: &TrialLog,
    scores: &BTreeMap<String, f64>,
) -> Result<MeasureResult> {
    let aggregated = aggregate_by_config(log);
    let (objectives, production): (Vec<f64>, Vec<f64>) = aggregated
        .iter()
        .filter_map(|(k, v)| scores.get(k).map(|s| (*v, *s)))
        .unzip();
    if objectives.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "{} configurations overlap with the scores, need at least 3",
            objectives.len()
        )));
    }
    Ok(spearman(&objectives, &production)?.with_param("overlap", objectives.len() as f64))
}

pub const TRIAL_CSV_HEADER: [&str; 9] = [
    "trial_id",
    "window_size",
    "features",
    "target",
    "measure",
    "anchor_date",
    "trend",
    "objective",
    "degenerate",
];

fn fmt_objective(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn csv_writer<W: Write>(sink: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(sink)
}

pub fn write_trials_csv<W: Write>(log: &TrialLog, sink: W) -> Result<()> {
    let mut w = csv_writer(sink);
    w.write_record(TRIAL_CSV_HEADER)?;
    for r in &log.records {
        w.write_record([
            r.trial_id.to_string(),
            r.window_size.to_string(),
            r.features_joined(),
            r.target.clone(),
            r.measure.to_string(),
            r.anchor_date.format("%Y-%m-%d").to_string(),
            r.trend.to_string(),
            fmt_objective(r.objective),
            r.degenerate.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Log body as JSON: seed, search-space echo and records.
pub fn write_trials_json<W: Write>(log: &TrialLog, mut sink: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut sink, log)?;
    sink.write_all(b"\n")?;
    Ok(())
}

pub fn read_trials_json<R: std::io::Read>(source: R) -> Result<TrialLog> {
    Ok(serde_json::from_reader(source)?)
}

/// One row per trial with one column per search axis plus the objective,
/// for parallel-coordinate plotting tools.
pub fn write_parallel_coordinates<W: Write>(log: &TrialLog, sink: W) -> Result<()> {
    let mut w = csv_writer(sink);
    w.write_record([
        "trial_id", "window_size", "features", "target", "measure", "anchor_date", "trend", "objective",
    ])?;
    for r in &log.records {
        w.write_record([
            r.trial_id.to_string(),
            r.window_size.to_string(),
            r.features_joined(),
            r.target.clone(),
            r.measure.to_string(),
            r.anchor_date.format("%Y-%m-%d").to_string(),
            r.trend.to_string(),
            fmt_objective(r.usable_objective()),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trend_rule() {
        let flat = vec![100.0; 30];
        assert_eq!(label_trend(&flat, 25, 20, 0.02).trend, Trend::Neutral);
        let mut rising = vec![100.0; 30];
        rising[25] = 105.0;
        assert_eq!(label_trend(&rising, 25, 20, 0.02).trend, Trend::Up);
        let mut falling = vec![100.0; 30];
        falling[25] = 99.0;
        assert_eq!(label_trend(&falling, 25, 20, 0.02).trend, Trend::Neutral);
        falling[25] = 97.0;
        assert_eq!(label_trend(&falling, 25, 20, 0.02).trend, Trend::Down);
        let early = label_trend(&flat, 5, 20, 0.02);
        assert_eq!(early, TrendLabel { trend: Trend::Neutral, warning: true });
    }

    fn record(id: usize, feature: &str, objective: f64, trend: Trend) -> TrialRecord {
        TrialRecord {
            trial_id: id,
            window_size: 50,
            feature_set: vec![feature.to_string()],
            target: "t".into(),
            measure: MeasureId::MutualInformation,
            anchor_date: NaiveDate::from_ymd_opt(2020, 1, 1).unwrap() + chrono::Days::new(id as u64),
            anchor_index: id,
            trend,
            objective: Some(objective),
            degenerate: false,
        }
    }

    fn log_of(records: Vec<TrialRecord>) -> TrialLog {
        TrialLog { seed: 1, space: SearchSpace::default(), records, metadata: None }
    }

    #[test]
    fn ranking_orders_by_median() {
        let log = log_of(vec![
            record(0, "A", 0.9, Trend::Up),
            record(1, "A", 0.8, Trend::Up),
            record(2, "A", 0.1, Trend::Down),
            record(3, "B", 0.3, Trend::Up),
            record(4, "C", 0.5, Trend::Down),
            record(5, "C", 0.4, Trend::Up),
            record(6, "C", 0.6, Trend::Up),
        ]);
        let report = rank_hyperparameters(&log, Axis::Features, RankFilter::default());
        let order: Vec<_> = report.entries.iter().map(|e| e.group.as_str()).collect();
        assert_eq!(order, ["A", "C", "B"]);
        assert_eq!(report.entries[0].median_objective, 0.8);
        assert_eq!(report.best.as_deref(), Some("A"));
        assert_eq!(report.worst.as_deref(), Some("B"));

        let up = rank_hyperparameters(&log, Axis::Features, RankFilter { trend: Some(Trend::Up), measure: None });
        let a = up.entries.iter().find(|e| e.group == "A").unwrap();
        assert_eq!(a.trials, 2);
        assert!((a.median_objective - 0.85).abs() < 1e-15);
    }

    #[test]
    fn ranking_all_degenerate_is_empty() {
        let mut r = record(0, "A", 0.5, Trend::Up);
        r.degenerate = true;
        let report = rank_hyperparameters(&log_of(vec![r]), Axis::Features, RankFilter::default());
        assert!(report.entries.is_empty());
        assert!(report.notice.is_some());
        assert!(report.best.is_none());
    }

    #[test]
    fn score_correlation_needs_three_overlaps() {
        let log = log_of(vec![record(0, "A", 0.5, Trend::Up), record(1, "B", 0.7, Trend::Up)]);
        let scores: BTreeMap<String, f64> =
            log.records.iter().map(|r| (r.config_key(), 1.0)).collect();
        assert!(matches!(
            correlate_measure_with_scores(&log, &scores),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn space_validation() {
        assert!(SearchSpace::default().validate().is_ok());
        let mut s = SearchSpace::default();
        s.window_sizes = vec![4];
        assert!(s.validate().is_err());
        let mut s = SearchSpace::default();
        s.feature_bins = 32;
        assert!(s.validate().is_err());
        let mut s = SearchSpace::default();
        s.measures.clear();
        assert!(s.validate().is_err());
    }

    #[test]
    fn pairwise_measure_on_feature_set_is_degenerate() {
        let pairs = SamplePairs {
            xs: (0..120).map(|i| vec![i as f64, (i * 7 % 13) as f64]).collect(),
            ys: (0..120).map(|i| vec![(i % 5) as f64 * 0.001]).collect(),
        };
        let space = SearchSpace::default();
        assert!(evaluate_on_pairs(MeasureId::Pearson, &pairs, &space, 0).degenerate);
        assert!(!evaluate_on_pairs(MeasureId::MutualInformation, &pairs, &space, 0).degenerate);
        assert!(!evaluate_on_pairs(MeasureId::RedundancySynergy, &pairs, &space, 0).degenerate);
        assert!(!evaluate_on_pairs(MeasureId::DistanceCorrelation, &pairs, &space, 0).degenerate);
    }

    #[test]
    fn small_windows_are_flagged_but_keep_value() {
        let pairs = SamplePairs {
            xs: (0..50).map(|i| vec![i as f64]).collect(),
            ys: (0..50).map(|i| vec![i as f64]).collect(),
        };
        let r = evaluate_on_pairs(MeasureId::Pearson, &pairs, &SearchSpace::default(), 0);
        assert!(r.degenerate);
        assert_eq!(r.value, Some(1.0));
    }
}
