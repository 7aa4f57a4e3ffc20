//! Calibration and detection engine for log-periodic power law (LPPL)
//! bubbles.
//!
//! A series is fit with a genetic algorithm over many calibration windows
//! sharing one end date. Each fit is screened against the acceptance box on
//! `m`, `ω`, `|C|`, the sign of `B` and the `t_c` horizon, and the accepted
//! critical times are binned into a histogram that yields a YES/NO verdict.
//!
//! - [`model`]: the LPPL function, parameters, series, and the SSE objective.
//! - [`calibrator`]: the genetic algorithm and single-window calibration.
//! - [`scanner`]: window generation, acceptance filter, histogram, verdict.
//! - [`synth`]: ground-truth LPPL and random-walk series.
//! - [`cli`]: CSV/TOML/JSON plumbing behind the `lppl` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calibrator;
pub mod cli;
pub mod error;
pub mod model;
pub mod scanner;
pub mod synth;

pub use calibrator::{calibrate_window, run_ga, FitResult, GaConfig, ParamBox, SearchBounds};
pub use error::{Error, Result};
pub use model::{lppl_value, rmse, sse, LpplParams, TimeSeries, Window};
pub use scanner::{
    accept_signal, generate_windows, scan, FilterConfig, Rejection, ScanConfig, ScanReport,
    VerdictRule, WindowConfig,
};
pub use synth::{generate_lppl_series, generate_null_series, SynthSpec};
