//! Multi-window scanning, signal acceptance and the bubble verdict.
//!
//! All windows share one end index and differ in their start. Each window is
//! calibrated independently with a seed derived from its identity, the fits
//! are filtered through the acceptance box, and accepted critical times are
//! binned per index unit into a histogram.

use std::collections::BTreeMap;
use std::fmt;

use chrono::NaiveDate;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::calibrator::{self, FitResult, GaConfig, SearchBounds};
use crate::error::{Error, Result};
use crate::model::{TimeSeries, Window};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WindowConfig {
    pub min_length: usize,
    /// Defaults to the longest window that fits before `end_index`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_length: Option<usize>,
    /// Spacing between successive window starts.
    pub stride: usize,
    /// Shared last index of every window; defaults to the last observation.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub end_index: Option<usize>,
}

impl Default for WindowConfig {
    fn default() -> Self {
        Self {
            min_length: 60,
            max_length: None,
            stride: 5,
            end_index: None,
        }
    }
}

/// Fixed-end, sliding-start windows ordered by increasing start index.
pub fn generate_windows(series_length: usize, config: &WindowConfig) -> Result<Vec<Window>> {
    if config.stride == 0 {
        return Err(Error::config("stride", "must be at least 1"));
    }
    if config.min_length == 0 {
        return Err(Error::config("min_length", "must be at least 1"));
    }
    if series_length == 0 {
        return Err(Error::NoWindows("series is empty".into()));
    }
    let end = config.end_index.unwrap_or(series_length - 1);
    if end >= series_length {
        return Err(Error::config(
            "end_index",
            format!("{end} is past the last observation {}", series_length - 1),
        ));
    }
    let max_length = config.max_length.unwrap_or(end + 1);
    if max_length > end + 1 {
        return Err(Error::config(
            "max_length",
            format!("{max_length} exceeds the {} observations up to end_index", end + 1),
        ));
    }
    if config.min_length > max_length {
        return Err(Error::NoWindows(format!(
            "min_length {} exceeds max_length {max_length}",
            config.min_length
        )));
    }
    let first = end + 1 - max_length;
    let last = end + 1 - config.min_length;
    Ok((first..=last)
        .step_by(config.stride)
        .map(|start| Window::new(start, end))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FilterConfig {
    pub m_min: f64,
    pub m_max: f64,
    pub omega_min: f64,
    pub omega_max: f64,
    pub c_abs_max: f64,
    pub require_negative_b: bool,
    /// Look for negative bubbles instead: the sign predicate then demands
    /// `B > 0`.
    pub negative_bubble: bool,
    /// Exclusive lower bound on `t_c - t_end`.
    pub tc_min_offset: f64,
    /// Inclusive upper bound on `t_c - t_end`; defaults to half the window.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tc_max_offset: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_rmse: Option<f64>,
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self {
            m_min: 0.1,
            m_max: 0.9,
            omega_min: 6.0,
            omega_max: 13.0,
            c_abs_max: 1.0,
            require_negative_b: true,
            negative_bubble: false,
            tc_min_offset: 0.0,
            tc_max_offset: None,
            max_rmse: None,
        }
    }
}

impl FilterConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.m_min < self.m_max) {
            return Err(Error::config("m_min", "must be below m_max"));
        }
        if !(self.omega_min < self.omega_max) {
            return Err(Error::config("omega_min", "must be below omega_max"));
        }
        if !(self.c_abs_max > 0.0) {
            return Err(Error::config("c_abs_max", "must be positive"));
        }
        if !(self.tc_min_offset >= 0.0) {
            return Err(Error::config("tc_min_offset", "must be non-negative"));
        }
        if let Some(max) = self.tc_max_offset {
            if !(max > self.tc_min_offset) {
                return Err(Error::config("tc_max_offset", "must exceed tc_min_offset"));
            }
        }
        if let Some(r) = self.max_rmse {
            if !(r >= 0.0) {
                return Err(Error::config("max_rmse", "must be non-negative"));
            }
        }
        Ok(())
    }
}

/// A violated acceptance predicate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Rejection {
    #[serde(rename = "m out of range")]
    MOutOfRange,
    #[serde(rename = "omega out of range")]
    OmegaOutOfRange,
    #[serde(rename = "oscillation amplitude")]
    OscillationAmplitude,
    #[serde(rename = "B sign")]
    BSign,
    #[serde(rename = "t_c horizon")]
    TcHorizon,
    #[serde(rename = "rmse too large")]
    RmseTooLarge,
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rejection::MOutOfRange => "m out of range",
            Rejection::OmegaOutOfRange => "omega out of range",
            Rejection::OscillationAmplitude => "oscillation amplitude",
            Rejection::BSign => "B sign",
            Rejection::TcHorizon => "t_c horizon",
            Rejection::RmseTooLarge => "rmse too large",
        })
    }
}

/// Checks a fit against every acceptance predicate and returns all that fail.
pub fn accept_signal(fit: &FitResult, filter: &FilterConfig) -> (bool, Vec<Rejection>) {
    let p = &fit.params;
    let mut reasons = Vec::new();
    if !(filter.m_min < p.m && p.m < filter.m_max) {
        reasons.push(Rejection::MOutOfRange);
    }
    if !(filter.omega_min < p.omega && p.omega < filter.omega_max) {
        reasons.push(Rejection::OmegaOutOfRange);
    }
    if !(p.c.abs() < filter.c_abs_max) {
        reasons.push(Rejection::OscillationAmplitude);
    }
    if filter.require_negative_b {
        let ok = if filter.negative_bubble { p.b > 0.0 } else { p.b < 0.0 };
        if !ok {
            reasons.push(Rejection::BSign);
        }
    }
    let offset = p.t_c - fit.t_end;
    let tc_max = filter
        .tc_max_offset
        .unwrap_or(0.5 * fit.window.len() as f64);
    if !(filter.tc_min_offset < offset && offset <= tc_max) {
        reasons.push(Rejection::TcHorizon);
    }
    if let Some(max) = filter.max_rmse {
        if !(fit.rmse <= max) {
            reasons.push(Rejection::RmseTooLarge);
        }
    }
    (reasons.is_empty(), reasons)
}

/// Thresholds turning the histogram into a YES/NO verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerdictRule {
    pub min_signals: usize,
    /// Half-width, in index units, of the cluster around the mode bin.
    pub cluster_radius: i64,
    /// Share of accepted signals the cluster must hold.
    pub cluster_fraction: f64,
}

impl Default for VerdictRule {
    fn default() -> Self {
        Self {
            min_signals: 5,
            cluster_radius: 5,
            cluster_fraction: 0.5,
        }
    }
}

impl VerdictRule {
    pub fn validate(&self) -> Result<()> {
        if self.cluster_radius < 0 {
            return Err(Error::config("cluster_radius", "must be non-negative"));
        }
        if !(0.0..=1.0).contains(&self.cluster_fraction) {
            return Err(Error::config("cluster_fraction", "must lie in [0, 1]"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub t_c_index: i64,
    pub date: Option<NaiveDate>,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub bubble: bool,
    pub mode_bin: Option<i64>,
    pub mode_date: Option<NaiveDate>,
    /// Accepted signals within `cluster_radius` of the mode bin.
    pub clustered: usize,
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        if self.bubble {
            "YES"
        } else {
            "NO"
        }
    }
}

/// Verdict from per-bin counts. The mode is the most populated bin, ties
/// going to the earliest.
pub fn verdict(histogram: &BTreeMap<i64, usize>, rule: &VerdictRule) -> (bool, Option<i64>, usize) {
    let n: usize = histogram.values().sum();
    let mode = histogram
        .iter()
        .fold(None::<(i64, usize)>, |best, (&bin, &count)| match best {
            Some((_, c)) if c >= count => best,
            _ => Some((bin, count)),
        })
        .map(|(bin, _)| bin);
    let clustered = mode.map_or(0, |m| {
        histogram
            .range(m - rule.cluster_radius..=m + rule.cluster_radius)
            .map(|(_, c)| c)
            .sum()
    });
    let bubble = n > 0
        && n >= rule.min_signals
        && clustered as f64 >= rule.cluster_fraction * n as f64;
    (bubble, mode, clustered)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowFailure {
    pub window: Window,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub n_windows: usize,
    pub n_accepted: usize,
    pub verdict: Verdict,
    pub histogram: Vec<HistogramBin>,
    pub fits: Vec<FitResult>,
    pub failures: Vec<WindowFailure>,
}

impl ScanReport {
    /// Accepted fit with the lowest RMSE, falling back to the lowest-RMSE fit
    /// overall when nothing was accepted.
    pub fn best_fit(&self) -> Option<&FitResult> {
        let by_rmse = |a: &&FitResult, b: &&FitResult| a.rmse.total_cmp(&b.rmse);
        self.fits
            .iter()
            .filter(|f| f.accepted)
            .min_by(by_rmse)
            .or_else(|| self.fits.iter().min_by(by_rmse))
    }
}

/// Everything a scan needs besides the series.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanConfig {
    pub window: WindowConfig,
    pub bounds: SearchBounds,
    /// `ga.seed` is the master seed.
    pub ga: GaConfig,
    pub filter: FilterConfig,
    pub verdict: VerdictRule,
    /// Worker threads; 0 uses the machine default.
    pub threads: usize,
}

/// Calibrates every window and aggregates the accepted signals.
pub fn scan(series: &TimeSeries, config: &ScanConfig) -> Result<ScanReport> {
    config.ga.validate()?;
    config.bounds.validate()?;
    config.filter.validate()?;
    config.verdict.validate()?;
    let windows = generate_windows(series.len(), &config.window)?;

    let fit_one = |w: &Window| {
        let ga = config.ga.clone().with_seed(calibrator::window_seed(config.ga.seed, *w));
        calibrator::calibrate_window(series, *w, &config.bounds, &ga)
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| Error::config("threads", e.to_string()))?;
    let outcomes: Vec<Result<FitResult>> = pool.install(|| windows.par_iter().map(fit_one).collect());

    let mut fits = Vec::new();
    let mut failures = Vec::new();
    for (w, outcome) in windows.iter().zip(outcomes) {
        match outcome {
            Ok(mut fit) => {
                let (ok, reasons) = accept_signal(&fit, &config.filter);
                fit.accepted = ok;
                fit.rejection_reasons = reasons;
                fits.push(fit);
            }
            Err(e) => failures.push(WindowFailure {
                window: *w,
                message: e.to_string(),
            }),
        }
    }

    let mut counts: BTreeMap<i64, usize> = BTreeMap::new();
    for fit in fits.iter().filter(|f| f.accepted) {
        *counts.entry(fit.params.t_c.round() as i64).or_default() += 1;
    }
    let (bubble, mode_bin, clustered) = verdict(&counts, &config.verdict);
    let histogram = counts
        .iter()
        .map(|(&bin, &count)| HistogramBin {
            t_c_index: bin,
            date: series.date_at_index(bin),
            count,
        })
        .collect();

    Ok(ScanReport {
        n_windows: windows.len(),
        n_accepted: fits.iter().filter(|f| f.accepted).count(),
        verdict: Verdict {
            bubble,
            mode_bin,
            mode_date: mode_bin.and_then(|b| series.date_at_index(b)),
            clustered,
        },
        histogram,
        fits,
        failures,
    })
}
