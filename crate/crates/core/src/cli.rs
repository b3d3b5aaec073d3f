//! The `depscope` command-line tool.
//!
//! Exit codes: 0 success, 1 I/O, 2 validation or configuration error,
//! 3 degenerate or inconclusive result.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::indicators::{build_feature_matrix, default_specs};
use crate::measures::stat::as_points;
use crate::measures::{MeasureId, MeasureResult};
use crate::search::{
    correlate_measure_with_scores, rank_hyperparameters, read_trials_json, run_grid_search,
    write_parallel_coordinates, write_trials_csv, write_trials_json, Axis, RankFilter, SearchSpace,
    Trend,
};
use crate::shaping::{PairingMode, SamplePairs};
use crate::timeseries::{load_frame, load_ohlcv, write_csv, TimeSeriesFrame, OHLCV_COLUMNS};
use crate::verify::{
    generate_synthetic, run_verification, Embedding, SyntheticSpec, VerifyParams, SIGNAL_COLUMN,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "depscope", version, about = "Measures of dependence for time-series features")]
pub struct RunConfig {
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Worker threads for trial evaluation (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Pairing {
    Pointwise,
    Joint,
}

impl From<Pairing> for PairingMode {
    fn from(p: Pairing) -> Self {
        match p {
            Pairing::Pointwise => PairingMode::Pointwise,
            Pairing::Joint => PairingMode::JointHorizon,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a daily OHLCV file and write it back normalised.
    Ingest {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Append the indicator feature and target columns to an OHLCV file.
    Features {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// One measure between named columns of a frame.
    Measure {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        measure: String,
        /// Feature column(s), comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        x: Vec<String>,
        #[arg(long)]
        y: String,
        #[command(flatten)]
        shaping: MeasureOptions,
    },
    /// Grid search over windows, feature sets, targets and measures.
    Search {
        #[arg(long)]
        input: PathBuf,
        /// Output directory.
        #[arg(long)]
        output: PathBuf,
        #[command(flatten)]
        space: SpaceArgs,
    },
    /// Compare measures on frames with and without a planted dependency.
    Verify {
        /// Embedded frame; when omitted, one is generated from the flags.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Control frame; when omitted, an independent frame is generated.
        #[arg(long)]
        control: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, default_value = "linear_lag")]
        embedding: String,
        #[arg(long, default_value_t = 1.0)]
        strength: f64,
        #[arg(long, default_value_t = 1)]
        lag: usize,
        #[arg(long, default_value_t = 2000)]
        length: usize,
        /// Feature column for file inputs.
        #[arg(long, default_value = SIGNAL_COLUMN)]
        feature: String,
        /// Write the generated frames into this directory.
        #[arg(long)]
        emit_frames: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', default_value = "100")]
        windows: Vec<usize>,
        #[arg(long, default_value_t = 100)]
        step: usize,
        #[arg(long, default_value_t = 1)]
        horizon: usize,
        #[arg(long, value_delimiter = ',', default_value = "MI,DC,MIC")]
        measures: Vec<String>,
        #[command(flatten)]
        shaping: MeasureOptions,
    },
    /// Rank a trial log by one axis, or correlate it with external scores.
    Report {
        /// `trials.json` written by `search`.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, default_value = "features")]
        group_by: String,
        #[arg(long)]
        trend: Option<String>,
        #[arg(long)]
        measure: Option<String>,
        /// CSV with columns `config,score` keyed by `W:features:target:measure`.
        #[arg(long)]
        scores: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Args)]
pub struct MeasureOptions {
    /// Target bin width in basis points.
    #[arg(long, default_value_t = 10.0)]
    pub bin_bp: f64,
    #[arg(long, value_enum, default_value_t = Pairing::Pointwise)]
    pub pairing: Pairing,
    #[arg(long, default_value_t = 8)]
    pub feature_bins: usize,
    /// Trials with fewer pairs are flagged degenerate.
    #[arg(long, default_value_t = 100)]
    pub min_pairs: usize,
    #[arg(long, default_value_t = 4)]
    pub pps_folds: usize,
}

#[derive(Debug, Clone, Args)]
pub struct SpaceArgs {
    #[arg(long, value_delimiter = ',', default_value = "50,100,150,200")]
    pub windows: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    pub step: usize,
    #[arg(long, default_value_t = 1)]
    pub horizon: usize,
    /// Feature sets, comma separated; join columns of one set with `+`.
    #[arg(long, value_delimiter = ',')]
    pub features: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    pub targets: Vec<String>,
    #[arg(long, value_delimiter = ',', default_value = "MI,DC,MIC")]
    pub measures: Vec<String>,
    #[command(flatten)]
    pub shaping: MeasureOptions,
}

fn parse_measures(names: &[String]) -> Result<Vec<MeasureId>> {
    names.iter().map(|n| n.parse()).collect()
}

fn apply_options(space: &mut SearchSpace, o: &MeasureOptions) {
    space.bin_width = o.bin_bp / 10_000.0;
    space.pairing = o.pairing.into();
    space.feature_bins = o.feature_bins;
    space.min_pairs = o.min_pairs;
    space.pps_folds = o.pps_folds;
}

impl SpaceArgs {
    pub fn to_space(&self) -> Result<SearchSpace> {
        let mut space = SearchSpace {
            window_sizes: self.windows.clone(),
            step: self.step,
            horizon: self.horizon,
            measures: parse_measures(&self.measures)?,
            ..SearchSpace::default()
        };
        if !self.features.is_empty() {
            space.feature_sets = self
                .features
                .iter()
                .map(|s| s.split('+').map(|c| c.trim().to_string()).collect())
                .collect();
        }
        if !self.targets.is_empty() {
            space.targets = self.targets.clone();
        }
        apply_options(&mut space, &self.shaping);
        space.validate()?;
        Ok(space)
    }
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io(_) => EXIT_IO,
        Error::Csv(e) if matches!(e.kind(), csv::ErrorKind::Io(_)) => EXIT_IO,
        _ => EXIT_INVALID,
    }
}

/// Parse `args` (including the program name), run the command and return the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    match execute(&config) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn execute(config: &RunConfig) -> Result<i32> {
    match &config.command {
        Command::Ingest { input, output } => cmd_ingest(config, input, output.as_deref()),
        Command::Features { input, output } => cmd_features(input, output.as_deref()),
        Command::Measure { input, output, measure, x, y, shaping } => {
            cmd_measure(config, input, output.as_deref(), measure, x, y, shaping)
        }
        Command::Search { input, output, space } => cmd_search(config, input, output, &space.to_space()?),
        Command::Verify { .. } => cmd_verify(config),
        Command::Report { input, output, group_by, trend, measure, scores } => cmd_report(
            config,
            input,
            output.as_deref(),
            group_by,
            trend.as_deref(),
            measure.as_deref(),
            scores.as_deref(),
        ),
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path)?))
}

/// Buffered writer to `path`, or stdout when no path is given.
fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            Box::new(BufWriter::new(File::create(p)?))
        }
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json<T: serde::Serialize>(value: &T, path: Option<&Path>) -> Result<()> {
    let mut w = sink(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

fn cmd_ingest(config: &RunConfig, input: &Path, output: Option<&Path>) -> Result<i32> {
    match load_ohlcv(open(input)?) {
        Ok(frame) => {
            log::info!("{}: {} rows accepted", input.display(), frame.len());
            match config.format {
                Format::Csv => {
                    let mut w = sink(output)?;
                    write_csv(&frame, &mut w)?;
                    w.flush()?;
                }
                Format::Json => write_json(
                    &serde_json::json!({ "accepted": true, "row_count": frame.len(), "issues": [] }),
                    output,
                )?,
            }
            Ok(EXIT_OK)
        }
        Err(Error::Validation(issues)) => {
            for i in &issues {
                eprintln!("{i}");
            }
            if config.format == Format::Json {
                write_json(&serde_json::json!({ "accepted": false, "issues": issues }), output)?;
            }
            Ok(EXIT_INVALID)
        }
        Err(e) => Err(e),
    }
}

fn has_ohlcv(frame: &TimeSeriesFrame) -> bool {
    OHLCV_COLUMNS.iter().all(|c| frame.has_column(c))
}

/// Add the default indicator columns that `frame` does not have yet.
fn with_default_features(frame: &TimeSeriesFrame) -> Result<TimeSeriesFrame> {
    let missing: Vec<_> = default_specs()
        .into_iter()
        .filter(|s| !frame.has_column(&s.column_name()))
        .collect();
    build_feature_matrix(frame, &missing)
}

fn cmd_features(input: &Path, output: Option<&Path>) -> Result<i32> {
    let frame = load_frame(open(input)?)?;
    let out = with_default_features(&frame)?;
    log::info!("{} rows after warm-up and target trimming", out.len());
    let mut w = sink(output)?;
    write_csv(&out, &mut w)?;
    w.flush()?;
    Ok(EXIT_OK)
}

fn measure_frame(
    measure: MeasureId,
    frame: &TimeSeriesFrame,
    x: &[String],
    y: &str,
    space: &SearchSpace,
    seed: u64,
) -> Result<MeasureResult> {
    let cols: Vec<&[f64]> = x.iter().map(|c| frame.column(c)).collect::<Result<_>>()?;
    let target = frame.column(y)?;
    let pairs = SamplePairs {
        xs: (0..frame.len()).map(|r| cols.iter().map(|c| c[r]).collect()).collect(),
        ys: as_points(target),
    };
    let single = SearchSpace { min_pairs: 0, ..space.clone() };
    Ok(crate::search::evaluate_on_pairs(measure, &pairs, &single, seed))
}

fn cmd_measure(
    config: &RunConfig,
    input: &Path,
    output: Option<&Path>,
    measure: &str,
    x: &[String],
    y: &str,
    options: &MeasureOptions,
) -> Result<i32> {
    let measure: MeasureId = measure.parse()?;
    let frame = load_frame(open(input)?)?;
    let mut space = SearchSpace::default();
    apply_options(&mut space, options);
    space.validate()?;
    let result = measure_frame(measure, &frame, x, y, &space, config.seed)?;
    match config.format {
        Format::Json => write_json(&result, output)?,
        Format::Csv => {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(sink(output)?);
            w.write_record(["measure", "value", "sample_size", "degenerate"])?;
            w.write_record([
                result.measure_id.to_string(),
                result.value.map(|v| v.to_string()).unwrap_or_default(),
                result.sample_size.to_string(),
                result.degenerate.to_string(),
            ])?;
            w.flush()?;
        }
    }
    Ok(if result.degenerate { EXIT_DEGENERATE } else { EXIT_OK })
}

fn cmd_search(config: &RunConfig, input: &Path, output: &Path, space: &SearchSpace) -> Result<i32> {
    let mut frame = load_frame(open(input)?)?;
    let needs_columns = space.required_columns().iter().any(|c| !frame.has_column(c));
    if needs_columns && has_ohlcv(&frame) {
        frame = with_default_features(&frame)?;
    }
    let log = run_grid_search(&frame, space, config.seed, config.jobs)?;
    fs::create_dir_all(output)?;
    let mut w = BufWriter::new(File::create(output.join("trials.csv"))?);
    write_trials_csv(&log, &mut w)?;
    w.flush()?;
    let mut w = BufWriter::new(File::create(output.join("trials.json"))?);
    write_trials_json(&log, &mut w)?;
    w.flush()?;
    let mut w = BufWriter::new(File::create(output.join("parallel_coordinates.csv"))?);
    write_parallel_coordinates(&log, &mut w)?;
    w.flush()?;
    write_json(&log.metadata, Some(&output.join("run_meta.json")))?;
    log::info!("{} trials written to {}", log.records.len(), output.display());
    Ok(EXIT_OK)
}

fn cmd_verify(config: &RunConfig) -> Result<i32> {
    let Command::Verify {
        input,
        control,
        output,
        embedding,
        strength,
        lag,
        length,
        feature,
        emit_frames,
        windows,
        step,
        horizon,
        measures,
        shaping,
    } = &config.command
    else {
        unreachable!("cmd_verify called for another command")
    };
    let measures = parse_measures(measures)?;
    let spec = SyntheticSpec {
        length: *length,
        embedding: embedding.parse::<Embedding>()?,
        lag: *lag,
        strength: *strength,
        seed: config.seed,
        ..SyntheticSpec::default()
    };
    let embedded = match input {
        Some(p) => load_frame(open(p)?)?,
        None => generate_synthetic(&spec)?,
    };
    let control = match control {
        Some(p) => load_frame(open(p)?)?,
        None => generate_synthetic(&SyntheticSpec {
            embedding: Embedding::None,
            seed: config.seed.wrapping_add(1),
            ..spec
        })?,
    };
    if let Some(dir) = emit_frames {
        fs::create_dir_all(dir)?;
        let mut w = BufWriter::new(File::create(dir.join("embedded.csv"))?);
        write_csv(&embedded, &mut w)?;
        w.flush()?;
        let mut w = BufWriter::new(File::create(dir.join("control.csv"))?);
        write_csv(&control, &mut w)?;
        w.flush()?;
    }
    let mut params = VerifyParams {
        feature: feature.clone(),
        seed: config.seed,
        jobs: config.jobs,
        ..VerifyParams::default()
    };
    params.space.window_sizes = windows.clone();
    params.space.step = *step;
    params.space.horizon = *horizon;
    apply_options(&mut params.space, shaping);
    let report = run_verification(&measures, &embedded, &control, &params)?;
    write_json(&report, output.as_deref())?;
    Ok(if report.any_inconclusive() { EXIT_DEGENERATE } else { EXIT_OK })
}

fn read_scores(path: &Path) -> Result<BTreeMap<String, f64>> {
    let mut reader = csv::Reader::from_reader(open(path)?);
    let mut scores = BTreeMap::new();
    for (i, row) in reader.records().enumerate() {
        let row = row?;
        let line = i + 2;
        let (Some(key), Some(score)) = (row.get(0), row.get(1)) else {
            return Err(Error::Parse { line, message: "expected `config,score`".into() });
        };
        let score: f64 = score
            .trim()
            .parse()
            .map_err(|_| Error::Parse { line, message: format!("invalid score `{score}`") })?;
        scores.insert(key.to_string(), score);
    }
    Ok(scores)
}

fn cmd_report(
    config: &RunConfig,
    input: &Path,
    output: Option<&Path>,
    group_by: &str,
    trend: Option<&str>,
    measure: Option<&str>,
    scores: Option<&Path>,
) -> Result<i32> {
    let log = read_trials_json(open(input)?)?;
    if let Some(path) = scores {
        let result = correlate_measure_with_scores(&log, &read_scores(path)?)?;
        write_json(&result, output)?;
        return Ok(if result.degenerate { EXIT_DEGENERATE } else { EXIT_OK });
    }
    let filter = RankFilter {
        trend: trend.map(str::parse::<Trend>).transpose()?,
        measure: measure.map(str::parse::<MeasureId>).transpose()?,
    };
    let report = rank_hyperparameters(&log, group_by.parse::<Axis>()?, filter);
    match config.format {
        Format::Json => write_json(&report, output)?,
        Format::Csv => {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(sink(output)?);
            w.write_record(["group", "median_objective", "trials"])?;
            for e in &report.entries {
                w.write_record([e.group.clone(), e.median_objective.to_string(), e.trials.to_string()])?;
            }
            w.flush()?;
        }
    }
    Ok(if report.entries.is_empty() { EXIT_DEGENERATE } else { EXIT_OK })
}

