//! Daily timestamped frames of named real-valued columns.
//!
//! A [`TimeSeriesFrame`] can only be obtained through validation, so every
//! frame observed downstream has strictly increasing dates, equal-length
//! columns and finite values. Raw input that may still contain gaps lives in
//! a [`RawFrame`] until [`validate_frame`] accepts it.

use std::fmt;
use std::io::{Read, Write};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const OHLCV_COLUMNS: [&str; 5] = ["open", "high", "low", "close", "volume"];
const DATE_COLUMN: &str = "date";
const DATE_FORMAT: &str = "%Y-%m-%d";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IssueKind {
    Missing,
    NonFinite,
    NonMonotonicTime,
    DuplicateTime,
}

impl fmt::Display for IssueKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            IssueKind::Missing => "missing",
            IssueKind::NonFinite => "non_finite",
            IssueKind::NonMonotonicTime => "non_monotonic_time",
            IssueKind::DuplicateTime => "duplicate_time",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationIssue {
    /// Zero-based row index into the validated frame.
    pub row: usize,
    pub column: String,
    pub kind: IssueKind,
    /// Source line (header is line 1), when the frame came from a file.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}, column {}: {}", self.column, self.kind),
            None => write!(f, "row {}, column {}: {}", self.row, self.column, self.kind),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub row_count: usize,
    pub issues: Vec<ValidationIssue>,
}

impl ValidationReport {
    pub fn is_accepted(&self) -> bool {
        self.issues.is_empty()
    }
}

/// Unvalidated frame; `None` marks a missing cell.
#[derive(Debug, Clone, PartialEq)]
pub struct RawFrame {
    pub timestamps: Vec<NaiveDate>,
    pub columns: Vec<(String, Vec<Option<f64>>)>,
    pub source: String,
}

impl From<&TimeSeriesFrame> for RawFrame {
    fn from(frame: &TimeSeriesFrame) -> Self {
        RawFrame {
            timestamps: frame.timestamps.clone(),
            columns: frame
                .columns
                .iter()
                .map(|(name, values)| (name.clone(), values.iter().copied().map(Some).collect()))
                .collect(),
            source: frame.source.clone(),
        }
    }
}

/// Enumerate every invariant violation of `frame`. An empty issue list means
/// the frame is accepted.
pub fn validate_frame(frame: &RawFrame) -> ValidationReport {
    let row_count = frame.timestamps.len();
    let mut issues = Vec::new();

    for (row, pair) in frame.timestamps.windows(2).enumerate() {
        let kind = match pair[1].cmp(&pair[0]) {
            std::cmp::Ordering::Greater => continue,
            std::cmp::Ordering::Equal => IssueKind::DuplicateTime,
            std::cmp::Ordering::Less => IssueKind::NonMonotonicTime,
        };
        issues.push(ValidationIssue {
            row: row + 1,
            column: DATE_COLUMN.to_string(),
            kind,
            line: None,
        });
    }

    for row in 0..row_count {
        for (name, values) in &frame.columns {
            let kind = match values.get(row) {
                None | Some(None) => IssueKind::Missing,
                Some(Some(v)) if !v.is_finite() => IssueKind::NonFinite,
                Some(Some(_)) => continue,
            };
            issues.push(ValidationIssue { row, column: name.clone(), kind, line: None });
        }
    }
    // Cells past the last timestamp have no date to attach to.
    for (name, values) in &frame.columns {
        for row in row_count..values.len() {
            issues.push(ValidationIssue {
                row,
                column: name.clone(),
                kind: IssueKind::Missing,
                line: None,
            });
        }
    }
    issues.sort_by(|a, b| a.row.cmp(&b.row));

    ValidationReport { row_count, issues }
}

/// Immutable, validated frame of daily observations.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesFrame {
    timestamps: Vec<NaiveDate>,
    columns: Vec<(String, Vec<f64>)>,
    source: String,
}

impl TryFrom<RawFrame> for TimeSeriesFrame {
    type Error = Error;

    fn try_from(raw: RawFrame) -> Result<Self> {
        let report = validate_frame(&raw);
        if !report.is_accepted() {
            return Err(Error::Validation(report.issues));
        }
        check_unique_names(raw.columns.iter().map(|(n, _)| n.as_str()))?;
        Ok(TimeSeriesFrame {
            timestamps: raw.timestamps,
            columns: raw
                .columns
                .into_iter()
                .map(|(name, values)| (name, values.into_iter().map(|v| v.unwrap()).collect()))
                .collect(),
            source: raw.source,
        })
    }
}

fn check_unique_names<'a>(names: impl Iterator<Item = &'a str>) -> Result<()> {
    let mut seen = std::collections::HashSet::new();
    for name in names {
        if name == DATE_COLUMN || !seen.insert(name) {
            return Err(Error::Parameter(format!("duplicate column name `{name}`")));
        }
    }
    Ok(())
}

impl TimeSeriesFrame {
    pub fn new(
        timestamps: Vec<NaiveDate>,
        columns: Vec<(String, Vec<f64>)>,
        source: impl Into<String>,
    ) -> Result<Self> {
        RawFrame {
            timestamps,
            columns: columns
                .into_iter()
                .map(|(n, v)| (n, v.into_iter().map(Some).collect()))
                .collect(),
            source: source.into(),
        }
        .try_into()
    }

    pub fn len(&self) -> usize {
        self.timestamps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.timestamps.is_empty()
    }

    pub fn timestamps(&self) -> &[NaiveDate] {
        &self.timestamps
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn column_names(&self) -> impl Iterator<Item = &str> {
        self.columns.iter().map(|(n, _)| n.as_str())
    }

    pub fn has_column(&self, name: &str) -> bool {
        self.columns.iter().any(|(n, _)| n == name)
    }

    pub fn column(&self, name: &str) -> Result<&[f64]> {
        self.columns
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
            .ok_or_else(|| Error::UnknownColumn(name.to_string()))
    }

    /// New frame with `extra` columns appended after the existing ones.
    pub fn with_columns(&self, extra: Vec<(String, Vec<f64>)>) -> Result<Self> {
        let mut columns = self.columns.clone();
        columns.extend(extra);
        TimeSeriesFrame::new(self.timestamps.clone(), columns, self.source.clone())
    }

    /// Rows `range` of every column.
    pub fn slice_rows(&self, range: std::ops::Range<usize>) -> Self {
        TimeSeriesFrame {
            timestamps: self.timestamps[range.clone()].to_vec(),
            columns: self
                .columns
                .iter()
                .map(|(n, v)| (n.clone(), v[range.clone()].to_vec()))
                .collect(),
            source: self.source.clone(),
        }
    }
}

/// Read a daily OHLCV file whose header is exactly
/// `date,open,high,low,close,volume`. Rows are sorted by date; duplicate
/// dates, gaps and non-finite numbers are rejected.
pub fn load_ohlcv<R: Read>(source: R) -> Result<TimeSeriesFrame> {
    load_csv(source, "ohlcv", Some(&OHLCV_COLUMNS))
}

/// Read a frame with a leading `date` column followed by any number of
/// named numeric columns.
pub fn load_frame<R: Read>(source: R) -> Result<TimeSeriesFrame> {
    load_csv(source, "csv", None)
}

fn load_csv<R: Read>(
    source: R,
    source_id: &str,
    expected: Option<&[&str]>,
) -> Result<TimeSeriesFrame> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(source);
    let header = reader.headers().map_err(|e| parse_error(1, e))?.clone();
    let names: Vec<String> = header.iter().map(str::to_string).collect();

    match expected {
        Some(cols) => {
            let want: Vec<&str> = std::iter::once(DATE_COLUMN).chain(cols.iter().copied()).collect();
            if names.iter().map(String::as_str).ne(want.iter().copied()) {
                return Err(Error::Parse {
                    line: 1,
                    message: format!("expected header `{}`, got `{}`", want.join(","), names.join(",")),
                });
            }
        }
        None => {
            if names.first().map(String::as_str) != Some(DATE_COLUMN) {
                return Err(Error::Parse {
                    line: 1,
                    message: "first column must be `date`".to_string(),
                });
            }
            check_unique_names(names[1..].iter().map(String::as_str)).map_err(|e| Error::Parse {
                line: 1,
                message: e.to_string(),
            })?;
        }
    }

    // (line, date, values)
    let mut rows: Vec<(usize, NaiveDate, Vec<Option<f64>>)> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
            parse_error(line, e)
        })?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(rows.len() + 2);
        let date = NaiveDate::parse_from_str(&record[0], DATE_FORMAT).map_err(|e| Error::Parse {
            line,
            message: format!("bad date `{}`: {e}", &record[0]),
        })?;
        let mut values = Vec::with_capacity(names.len() - 1);
        for (field, name) in record.iter().skip(1).zip(&names[1..]) {
            let field = field.trim();
            if field.is_empty() {
                values.push(None);
                continue;
            }
            let v: f64 = field.parse().map_err(|_| Error::Parse {
                line,
                message: format!("column {name}: `{field}` is not a number"),
            })?;
            values.push(Some(v));
        }
        rows.push((line, date, values));
    }

    rows.sort_by_key(|(_, date, _)| *date);
    let lines: Vec<usize> = rows.iter().map(|(l, _, _)| *l).collect();
    let raw = RawFrame {
        timestamps: rows.iter().map(|(_, d, _)| *d).collect(),
        columns: names[1..]
            .iter()
            .enumerate()
            .map(|(j, name)| (name.clone(), rows.iter().map(|(_, _, v)| v[j]).collect()))
            .collect(),
        source: source_id.to_string(),
    };

    TimeSeriesFrame::try_from(raw).map_err(|e| match e {
        Error::Validation(issues) => Error::Validation(
            issues
                .into_iter()
                .map(|mut i| {
                    i.line = lines.get(i.row).copied();
                    i
                })
                .collect(),
        ),
        other => other,
    })
}

fn parse_error(line: usize, err: csv::Error) -> Error {
    Error::Parse { line, message: err.to_string() }
}

/// Write `frame` as UTF-8 CSV with LF line endings. Values use the shortest
/// decimal representation that parses back to the same `f64`.
pub fn write_csv<W: Write>(frame: &TimeSeriesFrame, sink: W) -> Result<()> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(sink);
    writer.write_record(std::iter::once(DATE_COLUMN).chain(frame.column_names()))?;
    for row in 0..frame.len() {
        let mut record = Vec::with_capacity(frame.columns.len() + 1);
        record.push(frame.timestamps[row].format(DATE_FORMAT).to_string());
        for (_, values) in &frame.columns {
            record.push(values[row].to_string());
        }
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}
