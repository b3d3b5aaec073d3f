//! Quantify how much predictive power time-series features carry about
//! future targets.
//!
//! The crate is organised as a pipeline:
//!
//! * [`timeseries`] loads and validates daily OHLCV frames,
//! * [`indicators`] derives the `f_`/`t_` feature and target columns,
//! * [`shaping`] cuts a frame into sliding-window samples and bins targets,
//! * [`measures`] holds the dependence measures (statistical,
//!   information-theoretic and model-based),
//! * [`search`] runs the window × feature × target × measure grid search,
//! * [`verify`] plants known dependencies in synthetic data and checks that
//!   a measure ranks them above random controls,
//! * [`cli`] wires everything into the `depscope` command-line tool.

pub mod cli;
pub mod error;
pub mod indicators;
pub mod measures;
pub mod search;
pub mod shaping;
pub mod timeseries;
pub mod verify;

pub use error::{Error, Result};
pub use measures::{MeasureId, MeasureResult};
pub use timeseries::TimeSeriesFrame;
