//! Measures of dependence between inputs and a target.
//!
//! | id            | family      | inputs                         | range      |
//! |---------------|-------------|--------------------------------|------------|
//! | `PC`          | statistical | pairwise, scalar               | [-1, 1]    |
//! | `SC`          | statistical | pairwise, scalar               | [-1, 1]    |
//! | `DC`          | statistical | multivariate X and Y           | [0, 1]     |
//! | `MIC`         | information | pairwise, scalar               | [0, 1]     |
//! | `MI`          | information | multivariate (tuple symbols)   | bits, >= 0 |
//! | `RSI_SYNERGY` | information | feature set vs target          | bits       |
//! | `IG`          | information | pairwise (parent/child split)  | bits, >= 0 |
//! | `PPS`         | model       | multivariate X, scalar y       | [0, 1]     |

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

pub mod info;
pub mod model;
pub mod stat;

pub use info::{
    conditional_entropy, entropy, information_gain, mic, mutual_information,
    redundancy_synergy_index, DiscreteDistribution, JointHistogram,
};
pub use model::{fit_regression_tree, naive_median_mae, pps, pps_from_predictions, RegressionTree, TreeParams};
pub use stat::{distance_correlation, pearson, spearman};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum MeasureId {
    #[serde(rename = "PC")]
    Pearson,
    #[serde(rename = "SC")]
    Spearman,
    #[serde(rename = "DC")]
    DistanceCorrelation,
    #[serde(rename = "MIC")]
    Mic,
    #[serde(rename = "MI")]
    MutualInformation,
    #[serde(rename = "RSI_SYNERGY")]
    RedundancySynergy,
    #[serde(rename = "PPS")]
    Pps,
    #[serde(rename = "IG")]
    InformationGain,
}

impl MeasureId {
    pub const ALL: [MeasureId; 8] = [
        MeasureId::Pearson,
        MeasureId::Spearman,
        MeasureId::DistanceCorrelation,
        MeasureId::Mic,
        MeasureId::MutualInformation,
        MeasureId::RedundancySynergy,
        MeasureId::Pps,
        MeasureId::InformationGain,
    ];

    pub fn code(self) -> &'static str {
        match self {
            MeasureId::Pearson => "PC",
            MeasureId::Spearman => "SC",
            MeasureId::DistanceCorrelation => "DC",
            MeasureId::Mic => "MIC",
            MeasureId::MutualInformation => "MI",
            MeasureId::RedundancySynergy => "RSI_SYNERGY",
            MeasureId::Pps => "PPS",
            MeasureId::InformationGain => "IG",
        }
    }

    fn long_name(self) -> &'static str {
        match self {
            MeasureId::Pearson => "pearson",
            MeasureId::Spearman => "spearman",
            MeasureId::DistanceCorrelation => "dcor",
            MeasureId::Mic => "mic",
            MeasureId::MutualInformation => "mi",
            MeasureId::RedundancySynergy => "rsi",
            MeasureId::Pps => "pps",
            MeasureId::InformationGain => "ig",
        }
    }

    /// Declared value range; `None` is unbounded on that side.
    pub fn range(self) -> ValueRange {
        match self {
            MeasureId::Pearson | MeasureId::Spearman => ValueRange::new(Some(-1.0), Some(1.0)),
            MeasureId::DistanceCorrelation | MeasureId::Mic | MeasureId::Pps => {
                ValueRange::new(Some(0.0), Some(1.0))
            }
            MeasureId::MutualInformation | MeasureId::InformationGain => {
                ValueRange::new(Some(0.0), None)
            }
            MeasureId::RedundancySynergy => ValueRange::new(None, None),
        }
    }

    /// Whether the measure only relates one scalar input to one scalar target.
    pub fn is_pairwise(self) -> bool {
        matches!(
            self,
            MeasureId::Pearson | MeasureId::Spearman | MeasureId::Mic | MeasureId::InformationGain
        )
    }

    pub fn valid_names() -> String {
        MeasureId::ALL
            .iter()
            .map(|m| format!("{} ({})", m.long_name(), m.code()))
            .collect::<Vec<_>>()
            .join(", ")
    }
}

impl fmt::Display for MeasureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for MeasureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let key = s.trim();
        MeasureId::ALL
            .into_iter()
            .find(|m| m.code().eq_ignore_ascii_case(key) || m.long_name().eq_ignore_ascii_case(key))
            .or(match key.to_ascii_lowercase().as_str() {
                "distance_correlation" => Some(MeasureId::DistanceCorrelation),
                "mutual_information" => Some(MeasureId::MutualInformation),
                "information_gain" => Some(MeasureId::InformationGain),
                "redundancy_synergy_index" => Some(MeasureId::RedundancySynergy),
                _ => None,
            })
            .ok_or_else(|| {
                Error::Parameter(format!("unknown measure `{s}`; valid: {}", MeasureId::valid_names()))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValueRange {
    pub lo: Option<f64>,
    pub hi: Option<f64>,
}

impl ValueRange {
    pub const fn new(lo: Option<f64>, hi: Option<f64>) -> Self {
        ValueRange { lo, hi }
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo.map_or(true, |lo| v >= lo) && self.hi.map_or(true, |hi| v <= hi)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureResult {
    pub measure_id: MeasureId,
    /// `None` when the evaluation is degenerate and no value exists.
    pub value: Option<f64>,
    pub range: ValueRange,
    pub sample_size: usize,
    pub params: BTreeMap<String, f64>,
    pub degenerate: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notice: Option<String>,
}

impl MeasureResult {
    pub fn new(measure_id: MeasureId, value: f64, sample_size: usize) -> Self {
        MeasureResult {
            measure_id,
            value: Some(value),
            range: measure_id.range(),
            sample_size,
            params: BTreeMap::new(),
            degenerate: false,
            notice: None,
        }
    }

    pub fn degenerate(measure_id: MeasureId, sample_size: usize, reason: impl Into<String>) -> Self {
        MeasureResult {
            measure_id,
            value: None,
            range: measure_id.range(),
            sample_size,
            params: BTreeMap::new(),
            degenerate: true,
            notice: Some(reason.into()),
        }
    }

    pub fn with_param(mut self, name: &str, value: f64) -> Self {
        self.params.insert(name.to_string(), value);
        self
    }

    /// The value when the result is usable.
    pub fn objective(&self) -> Option<f64> {
        if self.degenerate {
            None
        } else {
            self.value
        }
    }
}

pub(crate) fn check_same_len(a: usize, b: usize) -> Result<(), Error> {
    if a != b {
        Err(Error::Parameter(format!("input lengths differ ({a} vs {b})")))
    } else {
        Ok(())
    }
}
