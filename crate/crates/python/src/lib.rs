use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufReader;

use chrono::NaiveDate;
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use depscope::indicators::{build_feature_matrix, default_specs};
use depscope::measures::info::{self, JointHistogram, DEFAULT_MIC_ALPHA};
use depscope::measures::model::{self, TreeParams};
use depscope::measures::stat::{self, as_points};
use depscope::search::{self, Axis, RankFilter, SearchSpace};
use depscope::shaping;
use depscope::verify::{self, Embedding, SyntheticSpec, VerifyParams};
use depscope::{MeasureId, TimeSeriesFrame};

create_exception!(depscope_py, DepscopeError, PyValueError);

fn err(e: depscope::Error) -> PyErr {
    DepscopeError::new_err(e.to_string())
}

fn json_err(e: serde_json::Error) -> PyErr {
    DepscopeError::new_err(e.to_string())
}

/// A daily frame: one date per row, named `f64` columns.
#[pyclass(name = "Frame", frozen)]
struct PyFrame {
    inner: TimeSeriesFrame,
}

#[pymethods]
impl PyFrame {
    #[new]
    fn new(dates: Vec<String>, columns: &Bound<'_, PyDict>) -> PyResult<Self> {
        let dates = dates
            .iter()
            .map(|d| NaiveDate::parse_from_str(d, "%Y-%m-%d"))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| PyValueError::new_err(format!("invalid date: {e}")))?;
        let mut cols = Vec::with_capacity(columns.len());
        for (k, v) in columns.iter() {
            cols.push((k.extract::<String>()?, v.extract::<Vec<f64>>()?));
        }
        let inner = TimeSeriesFrame::new(dates, cols, "python").map_err(err)?;
        Ok(PyFrame { inner })
    }

    /// Load a CSV with a `date` column; `ohlcv=True` also validates prices.
    #[staticmethod]
    #[pyo3(signature = (path, ohlcv = false))]
    fn load(path: &str, ohlcv: bool) -> PyResult<Self> {
        let file = BufReader::new(File::open(path).map_err(|e| err(e.into()))?);
        let inner = if ohlcv {
            depscope::timeseries::load_ohlcv(file)
        } else {
            depscope::timeseries::load_frame(file)
        }
        .map_err(err)?;
        Ok(PyFrame { inner })
    }

    fn save(&self, path: &str) -> PyResult<()> {
        let file = File::create(path).map_err(|e| err(e.into()))?;
        depscope::timeseries::write_csv(&self.inner, file).map_err(err)
    }

    /// Append the default indicator and target columns.
    fn with_features(&self) -> PyResult<Self> {
        let inner = build_feature_matrix(&self.inner, &default_specs()).map_err(err)?;
        Ok(PyFrame { inner })
    }

    #[getter]
    fn columns(&self) -> Vec<String> {
        self.inner.column_names().map(str::to_string).collect()
    }

    #[getter]
    fn dates(&self) -> Vec<String> {
        self.inner.timestamps().iter().map(|d| d.to_string()).collect()
    }

    fn column(&self, name: &str) -> PyResult<Vec<f64>> {
        self.inner.column(name).map(<[f64]>::to_vec).map_err(err)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("Frame(rows={}, columns={})", self.inner.len(), self.inner.column_names().count())
    }
}

#[pyclass(name = "MeasureResult", frozen)]
struct PyMeasureResult {
    inner: depscope::MeasureResult,
}

#[pymethods]
impl PyMeasureResult {
    #[getter]
    fn measure_id(&self) -> String {
        self.inner.measure_id.to_string()
    }

    #[getter]
    fn value(&self) -> Option<f64> {
        self.inner.value
    }

    #[getter]
    fn degenerate(&self) -> bool {
        self.inner.degenerate
    }

    #[getter]
    fn sample_size(&self) -> usize {
        self.inner.sample_size
    }

    #[getter]
    fn params(&self) -> BTreeMap<String, f64> {
        self.inner.params.clone()
    }

    #[getter]
    fn notice(&self) -> Option<String> {
        self.inner.notice.clone()
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(json_err)
    }

    fn __repr__(&self) -> String {
        match self.inner.value {
            Some(v) => format!("MeasureResult({}={v:.6}, n={})", self.inner.measure_id, self.inner.sample_size),
            None => format!("MeasureResult({}=degenerate, n={})", self.inner.measure_id, self.inner.sample_size),
        }
    }
}

fn wrap(r: depscope::Result<depscope::MeasureResult>) -> PyResult<PyMeasureResult> {
    r.map(|inner| PyMeasureResult { inner }).map_err(err)
}

#[pyfunction]
fn pearson(x: Vec<f64>, y: Vec<f64>) -> PyResult<PyMeasureResult> {
    wrap(stat::pearson(&x, &y))
}

#[pyfunction]
fn spearman(x: Vec<f64>, y: Vec<f64>) -> PyResult<PyMeasureResult> {
    wrap(stat::spearman(&x, &y))
}

/// `x` and `y` are lists of points; use one-element rows for scalars.
#[pyfunction]
fn distance_correlation(x: Vec<Vec<f64>>, y: Vec<Vec<f64>>) -> PyResult<PyMeasureResult> {
    wrap(stat::distance_correlation(&x, &y))
}

#[pyfunction]
fn mutual_information(x: Vec<i64>, y: Vec<i64>) -> PyResult<PyMeasureResult> {
    let joint = JointHistogram::from_symbols(&x, &y).map_err(err)?;
    wrap(info::mutual_information(&joint))
}

#[pyfunction]
fn information_gain(parent: Vec<i64>, child: Vec<i64>) -> PyResult<PyMeasureResult> {
    wrap(info::information_gain(&parent, &child))
}

#[pyfunction]
#[pyo3(signature = (x, y, alpha = DEFAULT_MIC_ALPHA))]
fn mic(x: Vec<f64>, y: Vec<f64>, alpha: f64) -> PyResult<PyMeasureResult> {
    wrap(info::mic(&x, &y, alpha))
}

#[pyfunction]
#[pyo3(signature = (variables, y, max_set_size = 3))]
fn redundancy_synergy_index(variables: Vec<Vec<i64>>, y: Vec<i64>, max_set_size: usize) -> PyResult<PyMeasureResult> {
    wrap(info::redundancy_synergy_index(&variables, &y, max_set_size))
}

#[pyfunction]
#[pyo3(signature = (x, y, folds = 4, seed = 0, max_depth = 4, min_samples_leaf = 5))]
fn pps(
    x: Vec<Vec<f64>>,
    y: Vec<f64>,
    folds: usize,
    seed: u64,
    max_depth: usize,
    min_samples_leaf: usize,
) -> PyResult<PyMeasureResult> {
    wrap(model::pps(&x, &y, folds, seed, TreeParams { max_depth, min_samples_leaf }))
}

/// Scalar convenience: wrap each value as a one-dimensional point.
#[pyfunction]
fn points(values: Vec<f64>) -> Vec<Vec<f64>> {
    as_points(&values)
}

#[pyfunction]
#[pyo3(signature = (values, bin_width, origin = 0.0))]
fn discretize(values: Vec<f64>, bin_width: f64, origin: f64) -> PyResult<Vec<i64>> {
    shaping::discretize(&values, bin_width, origin).map(|d| d.symbols).map_err(err)
}

#[pyfunction]
fn equal_frequency_bins(values: Vec<f64>, bins: usize) -> Vec<i64> {
    shaping::equal_frequency_symbols(&values, bins)
}

#[pyfunction]
fn measure_ids() -> Vec<String> {
    MeasureId::ALL.iter().map(|m| m.to_string()).collect()
}

#[pyfunction]
#[pyo3(signature = (length = 2000, embedding = "none", lag = 1, strength = 1.0, seed = 42))]
fn generate_synthetic(length: usize, embedding: &str, lag: usize, strength: f64, seed: u64) -> PyResult<PyFrame> {
    let spec = SyntheticSpec {
        length,
        embedding: embedding.parse::<Embedding>().map_err(err)?,
        lag,
        strength,
        seed,
        ..SyntheticSpec::default()
    };
    verify::generate_synthetic(&spec).map(|inner| PyFrame { inner }).map_err(err)
}

/// Run the grid search; `space` is a JSON object overriding the defaults.
/// Returns the trial log as JSON.
#[pyfunction]
#[pyo3(signature = (frame, space = None, seed = 42, jobs = None))]
fn run_grid_search(frame: &PyFrame, space: Option<&str>, seed: u64, jobs: Option<usize>) -> PyResult<String> {
    let space: SearchSpace = match space {
        Some(s) => serde_json::from_str(s).map_err(json_err)?,
        None => SearchSpace::default(),
    };
    let log = search::run_grid_search(&frame.inner, &space, seed, jobs).map_err(err)?;
    serde_json::to_string(&log).map_err(json_err)
}

/// Rank a JSON trial log by `window`, `features`, `target` or `measure`.
#[pyfunction]
#[pyo3(signature = (trials, group_by = "features", trend = None, measure = None))]
fn rank(trials: &str, group_by: &str, trend: Option<&str>, measure: Option<&str>) -> PyResult<String> {
    let log = search::read_trials_json(trials.as_bytes()).map_err(err)?;
    let filter = RankFilter {
        trend: trend.map(str::parse).transpose().map_err(err)?,
        measure: measure.map(str::parse).transpose().map_err(err)?,
    };
    let report = search::rank_hyperparameters(&log, group_by.parse::<Axis>().map_err(err)?, filter);
    serde_json::to_string(&report).map_err(json_err)
}

/// Compare measures on an embedded and a control frame. Returns the report as JSON.
#[pyfunction]
#[pyo3(signature = (embedded, control, measures = None, windows = None, step = 100, z = 1.645, seed = 42))]
fn run_verification(
    embedded: &PyFrame,
    control: &PyFrame,
    measures: Option<Vec<String>>,
    windows: Option<Vec<usize>>,
    step: usize,
    z: f64,
    seed: u64,
) -> PyResult<String> {
    let ids = match measures {
        Some(names) => names.iter().map(|n| n.parse::<MeasureId>()).collect::<Result<Vec<_>, _>>().map_err(err)?,
        None => vec![MeasureId::MutualInformation, MeasureId::DistanceCorrelation, MeasureId::Mic],
    };
    let mut params = VerifyParams { z, seed, ..VerifyParams::default() };
    if let Some(w) = windows {
        params.space.window_sizes = w;
    }
    params.space.step = step;
    let report = verify::run_verification(&ids, &embedded.inner, &control.inner, &params).map_err(err)?;
    serde_json::to_string(&report).map_err(json_err)
}

#[pymodule]
fn depscope_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("DepscopeError", m.py().get_type::<DepscopeError>())?;
    m.add_class::<PyFrame>()?;
    m.add_class::<PyMeasureResult>()?;
    m.add_function(wrap_pyfunction!(pearson, m)?)?;
    m.add_function(wrap_pyfunction!(spearman, m)?)?;
    m.add_function(wrap_pyfunction!(distance_correlation, m)?)?;
    m.add_function(wrap_pyfunction!(mutual_information, m)?)?;
    m.add_function(wrap_pyfunction!(information_gain, m)?)?;
    m.add_function(wrap_pyfunction!(mic, m)?)?;
    m.add_function(wrap_pyfunction!(redundancy_synergy_index, m)?)?;
    m.add_function(wrap_pyfunction!(pps, m)?)?;
    m.add_function(wrap_pyfunction!(points, m)?)?;
    m.add_function(wrap_pyfunction!(discretize, m)?)?;
    m.add_function(wrap_pyfunction!(equal_frequency_bins, m)?)?;
    m.add_function(wrap_pyfunction!(measure_ids, m)?)?;
    m.add_function(wrap_pyfunction!(generate_synthetic, m)?)?;
    m.add_function(wrap_pyfunction!(run_grid_search, m)?)?;
    m.add_function(wrap_pyfunction!(rank, m)?)?;
    m.add_function(wrap_pyfunction!(run_verification, m)?)?;
    Ok(())
}
