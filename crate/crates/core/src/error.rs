use thiserror::Error;

/// Errors raised by the model, calibration, scanning and synthesis layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("t = {t} is not before the critical time t_c = {t_c}")]
    BeyondCriticalTime { t: f64, t_c: f64 },

    #[error("parameter `{0}` is not finite")]
    NonFiniteParam(&'static str),

    #[error("invalid time series: {0}")]
    InvalidSeries(String),

    #[error("window [{start}, {end}] is empty or outside a series of length {len}")]
    WindowOutOfBounds { start: usize, end: usize, len: usize },

    #[error("window of {len} observations is shorter than the minimum of {min}")]
    WindowTooShort { len: usize, min: usize },

    #[error("observation count must be at least 1")]
    ZeroCount,

    #[error("invalid configuration: {field}: {reason}")]
    Config { field: &'static str, reason: String },

    #[error("no calibration window satisfies the window configuration: {0}")]
    NoWindows(String),

    #[error("calibration failed: {0}")]
    Calibration(String),
}

impl Error {
    pub(crate) fn config(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Config {
            field,
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
