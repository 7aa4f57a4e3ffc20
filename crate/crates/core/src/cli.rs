//! File and command-line plumbing behind the `lppl` binary.
//!
//! Inputs are `date,value` CSV files and an optional TOML run configuration;
//! outputs are JSON reports and plot-ready CSVs. Exit codes are `0` on
//! success, `1` for usage or configuration errors and `2` for data or I/O
//! errors.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::calibrator::{self, FitResult, GaConfig, SearchBounds, StopReason};
use crate::model::{self, business_days, LpplParams, TimeSeries, Window};
use crate::scanner::{self, FilterConfig, Rejection, ScanConfig, ScanReport, VerdictRule, WindowConfig};
use crate::synth::{self, SynthSpec};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("configuration error in `{field}`: {message}")]
    Config { field: String, message: String },
    #[error("data error: {0}")]
    Data(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config { .. } => 1,
            CliError::Data(_) | CliError::Io { .. } => 2,
        }
    }

    fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        match e {
            crate::Error::Config { field, reason } => CliError::Config {
                field: field.to_string(),
                message: reason,
            },
            other => CliError::Data(other.to_string()),
        }
    }
}

/// Everything one invocation needs. Field names are the keys of the TOML
/// configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    pub log_transform: bool,
    pub window: WindowConfig,
    pub bounds: SearchBounds,
    pub ga: GaConfig,
    pub filter: FilterConfig,
    pub verdict: VerdictRule,
    /// Master seed; overrides `ga.seed`.
    pub seed: u64,
    /// Worker threads for window fits; 0 uses every core.
    pub threads: usize,
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            input: None,
            log_transform: true,
            window: WindowConfig::default(),
            bounds: SearchBounds::default(),
            ga: GaConfig::default(),
            filter: FilterConfig::default(),
            verdict: VerdictRule::default(),
            seed: 0,
            threads: 0,
            out_dir: PathBuf::from("."),
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config {
            field: e
                .span()
                .map(|s| text.get(s).unwrap_or("").trim().to_string())
                .filter(|s| !s.is_empty())
                .unwrap_or_else(|| "config".into()),
            message: e.message().to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.ga.validate()?;
        self.bounds.validate()?;
        self.filter.validate()?;
        self.verdict.validate()?;
        if self.out_dir.as_os_str().is_empty() {
            return Err(CliError::Config {
                field: "out_dir".into(),
                message: "must not be empty".into(),
            });
        }
        if matches!(&self.input, Some(p) if p.as_os_str().is_empty()) {
            return Err(CliError::Config {
                field: "input".into(),
                message: "must not be empty".into(),
            });
        }
        Ok(())
    }

    pub fn ga_config(&self) -> GaConfig {
        self.ga.clone().with_seed(self.seed)
    }

    pub fn scan_config(&self) -> ScanConfig {
        ScanConfig {
            window: self.window.clone(),
            bounds: self.bounds.clone(),
            ga: self.ga_config(),
            filter: self.filter.clone(),
            verdict: self.verdict.clone(),
            threads: self.threads,
        }
    }

    fn input_path(&self) -> Result<&Path, CliError> {
        self.input.as_deref().ok_or_else(|| CliError::Config {
            field: "input".into(),
            message: "no input file given (use --input or `input` in the config)".into(),
        })
    }
}

/// Reads a `date,value` CSV. Dates are ISO-8601 and strictly increasing;
/// values are natural-logged when `log_transform` is set.
pub fn ingest_csv(path: &Path, log_transform: bool) -> Result<TimeSeries, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_csv(&text, log_transform)
}

pub fn parse_csv(text: &str, log_transform: bool) -> Result<TimeSeries, CliError> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut records = reader.records();

    let header = match records.next() {
        Some(r) => r.map_err(|e| CliError::Data(format!("line 1: {e}")))?,
        None => return Err(CliError::Data("empty file: expected header `date,value`".into())),
    };
    if header.len() != 2 || &header[0] != "date" || &header[1] != "value" {
        return Err(CliError::Data(format!(
            "line 1: malformed header `{}`, expected `date,value`",
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }

    let mut dates: Vec<NaiveDate> = Vec::new();
    let mut prices: Vec<f64> = Vec::new();
    for record in records {
        let record = record.map_err(|e| CliError::Data(e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        if record.len() != 2 {
            return Err(CliError::Data(format!(
                "line {line}: expected 2 fields, found {}",
                record.len()
            )));
        }
        let date = NaiveDate::parse_from_str(&record[0], "%Y-%m-%d").map_err(|e| {
            CliError::Data(format!("line {line}: unparseable date `{}`: {e}", &record[0]))
        })?;
        let value: f64 = record[1]
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| CliError::Data(format!("line {line}: unparseable value `{}`", &record[1])))?;
        if let Some(prev) = dates.last() {
            if date <= *prev {
                return Err(CliError::Data(format!(
                    "line {line}: date {date} does not follow {prev}; dates must be strictly increasing"
                )));
            }
        }
        if log_transform && value <= 0.0 {
            return Err(CliError::Data(format!(
                "line {line}: value {value} is not positive; use --no-log-transform for spread series"
            )));
        }
        dates.push(date);
        prices.push(value);
    }
    if prices.len() < 2 {
        return Err(CliError::Data(format!(
            "need at least 2 data rows, found {}",
            prices.len()
        )));
    }
    Ok(TimeSeries::from_prices(&prices, Some(dates), log_transform)?)
}

/// Writes a `date,value` CSV.
pub fn write_series_csv(path: &Path, dates: &[NaiveDate], values: &[f64]) -> Result<(), CliError> {
    let mut out = String::from("date,value\n");
    for (d, v) in dates.iter().zip(values) {
        out.push_str(&format!("{d},{v}\n"));
    }
    write_file(path, &out)
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Data(format!("cannot serialize {}: {e}", path.display())))?;
    text.push('\n');
    write_file(path, &text)
}

fn curve_csv(series: &TimeSeries, fit: &FitResult) -> Result<String, CliError> {
    let mut out = String::from("t,date,observed,fitted\n");
    for i in fit.window.start..=fit.window.end {
        let t = series.times()[i];
        let date = series.date_at_index(i as i64).map(|d| d.to_string()).unwrap_or_default();
        let fitted = model::lppl_value(&fit.params, t)?;
        out.push_str(&format!("{t},{date},{},{fitted}\n", series.values()[i]));
    }
    Ok(out)
}

fn tc_date(series: &TimeSeries, t_c: f64) -> Option<NaiveDate> {
    series.date_at_index(t_c.round() as i64)
}

/// Contents of `fit.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub window: Window,
    pub t_end: f64,
    pub params: LpplParams,
    pub t_c_date: Option<NaiveDate>,
    pub sse: f64,
    pub rmse: f64,
    pub generations_run: usize,
    pub objective_evaluations: usize,
    pub converged: bool,
    pub stop_reason: StopReason,
    pub seed: u64,
    pub accepted: bool,
    pub rejection_reasons: Vec<Rejection>,
    pub log_transformed: bool,
}

impl FitReport {
    fn new(series: &TimeSeries, fit: &FitResult) -> Self {
        Self {
            window: fit.window,
            t_end: fit.t_end,
            params: fit.params,
            t_c_date: tc_date(series, fit.params.t_c),
            sse: fit.sse,
            rmse: fit.rmse,
            generations_run: fit.generations_run,
            objective_evaluations: fit.objective_evaluations,
            converged: fit.converged,
            stop_reason: fit.stop_reason,
            seed: fit.seed,
            accepted: fit.accepted,
            rejection_reasons: fit.rejection_reasons.clone(),
            log_transformed: series.is_log_transformed(),
        }
    }
}

/// Calibrates one window (by default the whole series up to
/// `window.end_index`) and writes `fit.json` and `curve.csv`.
pub fn cmd_fit(config: &RunConfig, window: Option<Window>) -> Result<FitReport, CliError> {
    config.validate()?;
    let series = ingest_csv(config.input_path()?, config.log_transform)?;
    let window = match window {
        Some(w) => w,
        None => {
            let end = config.window.end_index.unwrap_or(series.len() - 1);
            let len = config.window.max_length.unwrap_or(end + 1).min(end + 1);
            Window::new(end + 1 - len, end)
        }
    };
    let mut fit = calibrator::calibrate_window(&series, window, &config.bounds, &config.ga_config())?;
    let (accepted, reasons) = scanner::accept_signal(&fit, &config.filter);
    fit.accepted = accepted;
    fit.rejection_reasons = reasons;

    fs::create_dir_all(&config.out_dir).map_err(|e| CliError::io(&config.out_dir, e))?;
    let report = FitReport::new(&series, &fit);
    write_json(&config.out_dir.join("fit.json"), &report)?;
    write_file(&config.out_dir.join("curve.csv"), &curve_csv(&series, &fit)?)?;
    Ok(report)
}

/// Configuration as echoed into `report.json`. Thread count and output
/// location are left out so the report is identical across them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub input: Option<PathBuf>,
    pub log_transform: bool,
    pub window: WindowConfig,
    pub bounds: SearchBounds,
    pub ga: GaConfig,
    pub filter: FilterConfig,
    pub verdict: VerdictRule,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitRecord {
    #[serde(flatten)]
    pub fit: FitResult,
    pub t_c_date: Option<NaiveDate>,
}

/// Contents of `report.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanOutput {
    pub verdict: String,
    pub n_windows: usize,
    pub n_accepted: usize,
    pub n_failed: usize,
    pub mode_bin: Option<i64>,
    pub mode_date: Option<NaiveDate>,
    pub clustered: usize,
    pub seed: u64,
    pub calendar: String,
    pub histogram: Vec<scanner::HistogramBin>,
    pub fits: Vec<FitRecord>,
    pub failures: Vec<scanner::WindowFailure>,
    pub config: ConfigEcho,
}

const CALENDAR_NOTE: &str =
    "t_c dates extend the input date sequence with weekdays (Mon-Fri); holidays are not modeled";

/// Runs a full scan and writes `report.json`, `histogram.csv` and
/// `best_fit_curve.csv`.
pub fn cmd_scan(config: &RunConfig) -> Result<ScanOutput, CliError> {
    config.validate()?;
    let series = ingest_csv(config.input_path()?, config.log_transform)?;
    let report: ScanReport = scanner::scan(&series, &config.scan_config())?;
    if report.fits.is_empty() {
        return Err(CliError::Data(format!(
            "all {} windows failed; first failure: {}",
            report.n_windows,
            report.failures.first().map_or("", |f| f.message.as_str())
        )));
    }

    let output = ScanOutput {
        verdict: report.verdict.label().to_string(),
        n_windows: report.n_windows,
        n_accepted: report.n_accepted,
        n_failed: report.failures.len(),
        mode_bin: report.verdict.mode_bin,
        mode_date: report.verdict.mode_date,
        clustered: report.verdict.clustered,
        seed: config.seed,
        calendar: CALENDAR_NOTE.to_string(),
        histogram: report.histogram.clone(),
        fits: report
            .fits
            .iter()
            .map(|f| FitRecord {
                fit: f.clone(),
                t_c_date: tc_date(&series, f.params.t_c),
            })
            .collect(),
        failures: report.failures.clone(),
        config: ConfigEcho {
            input: config.input.clone(),
            log_transform: config.log_transform,
            window: config.window.clone(),
            bounds: config.bounds.clone(),
            ga: config.ga_config(),
            filter: config.filter.clone(),
            verdict: config.verdict.clone(),
        },
    };

    fs::create_dir_all(&config.out_dir).map_err(|e| CliError::io(&config.out_dir, e))?;
    write_json(&config.out_dir.join("report.json"), &output)?;

    let mut hist = String::from("date,t_c_index,count\n");
    for bin in &report.histogram {
        let date = bin.date.map(|d| d.to_string()).unwrap_or_default();
        hist.push_str(&format!("{date},{},{}\n", bin.t_c_index, bin.count));
    }
    write_file(&config.out_dir.join("histogram.csv"), &hist)?;

    let best = report.best_fit().expect("at least one fit");
    write_file(&config.out_dir.join("best_fit_curve.csv"), &curve_csv(&series, best)?)?;
    Ok(output)
}

/// Arguments of the `synth` subcommand.
#[derive(Debug, Clone, PartialEq, Args)]
pub struct SynthArgs {
    /// Number of observations.
    #[arg(long, default_value_t = 250)]
    pub n: usize,
    #[arg(long = "A", default_value_t = 1.0, allow_hyphen_values = true)]
    pub a: f64,
    #[arg(long = "B", default_value_t = -1.0, allow_hyphen_values = true)]
    pub b: f64,
    #[arg(long = "C", default_value_t = 0.3, allow_hyphen_values = true)]
    pub c: f64,
    #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
    pub m: f64,
    #[arg(long, default_value_t = 8.0, allow_hyphen_values = true)]
    pub omega: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub phi: f64,
    #[arg(long = "tc", default_value_t = 260.0, allow_hyphen_values = true)]
    pub t_c: f64,
    /// Standard deviation of the Gaussian noise on the log scale.
    #[arg(long, default_value_t = 0.01)]
    pub sigma: f64,
    /// Generate a log random walk instead of an LPPL path.
    #[arg(long)]
    pub null: bool,
    #[arg(long, default_value_t = 2e-4, allow_hyphen_values = true)]
    pub drift: f64,
    #[arg(long, default_value_t = 0.01)]
    pub vol: f64,
    /// First calendar date (rolled forward to a weekday).
    #[arg(long, default_value = "2016-01-04")]
    pub start_date: NaiveDate,
    /// Write log-values as they are instead of exponentiated prices.
    #[arg(long)]
    pub raw: bool,
    /// Output file; defaults to `<out-dir>/series.csv`.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

impl Default for SynthArgs {
    fn default() -> Self {
        SynthArgs::parse_from_args(std::iter::empty::<&str>())
    }
}

impl SynthArgs {
    fn parse_from_args<I, T>(args: I) -> Self
    where
        I: IntoIterator<Item = T>,
        T: Into<OsString> + Clone,
    {
        #[derive(Parser)]
        struct Wrapper {
            #[command(flatten)]
            args: SynthArgs,
        }
        Wrapper::parse_from(std::iter::once(OsString::from("synth")).chain(args.into_iter().map(Into::into)))
            .args
    }

    pub fn truth(&self) -> LpplParams {
        LpplParams {
            a: self.a,
            b: self.b,
            c: self.c,
            m: self.m,
            omega: self.omega,
            phi: self.phi,
            t_c: self.t_c,
        }
    }
}

/// Writes a synthetic `date,value` CSV and returns its path.
pub fn cmd_synth(args: &SynthArgs, seed: u64, out_dir: &Path) -> Result<PathBuf, CliError> {
    let series = if args.null {
        synth::generate_null_series(args.n, args.drift, args.vol, seed)
    } else {
        synth::generate_lppl_series(&SynthSpec {
            truth: args.truth(),
            n_points: args.n,
            noise_sigma: args.sigma,
            seed,
        })
    }
    .map_err(|e| match e {
        crate::Error::Config { field, reason } => CliError::Usage(format!("--{field}: {reason}")),
        crate::Error::NonFiniteParam(name) => CliError::Usage(format!("--{name}: not finite")),
        other => CliError::Usage(other.to_string()),
    })?;
    let values: Vec<f64> = if args.raw {
        series.values().to_vec()
    } else {
        series.values().iter().map(|v| v.exp()).collect()
    };
    let dates = business_days(args.start_date, args.n);
    let path = match &args.output {
        Some(p) => p.clone(),
        None => {
            fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
            out_dir.join("series.csv")
        }
    };
    write_series_csv(&path, &dates, &values)?;
    Ok(path)
}

/// Calibrate log-periodic power law bubbles and scan for critical times.
#[derive(Debug, Parser)]
#[command(name = "lppl", version)]
pub struct Cli {
    /// TOML run configuration; flags override its keys.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Input `date,value` CSV.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    /// Master seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for window fits (0 = all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Fit raw values instead of natural logs (for spreads near or below zero).
    #[arg(long, global = true)]
    pub no_log_transform: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Calibrate a single window and write fit.json and curve.csv.
    Fit {
        /// First index of the window (default: derived from the window config).
        #[arg(long, requires = "window_end")]
        window_start: Option<usize>,
        /// Last index of the window, inclusive.
        #[arg(long, requires = "window_start")]
        window_end: Option<usize>,
    },
    /// Calibrate every window and write report.json, histogram.csv and
    /// best_fit_curve.csv.
    Scan,
    /// Write a synthetic date,value CSV.
    Synth(SynthArgs),
}

impl Cli {
    /// Resolves the run configuration: defaults, then the config file, then
    /// flags.
    pub fn run_config(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(input) = &self.input {
            cfg.input = Some(input.clone());
        }
        if let Some(dir) = &self.out_dir {
            cfg.out_dir = dir.clone();
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(threads) = self.threads {
            cfg.threads = threads;
        }
        if self.no_log_transform {
            cfg.log_transform = false;
        }
        Ok(cfg)
    }
}

/// Parses `args` and runs the selected command, returning the process exit
/// code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(summary) => {
            println!("{summary}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli) -> Result<String, CliError> {
    let cfg = cli.run_config()?;
    match &cli.command {
        Command::Fit {
            window_start,
            window_end,
        } => {
            let window = window_start.zip(*window_end).map(|(s, e)| Window::new(s, e));
            let r = cmd_fit(&cfg, window)?;
            Ok(format!(
                "window {} t_c={:.3}{} m={:.4} omega={:.4} rmse={:.6} accepted={}",
                r.window,
                r.params.t_c,
                r.t_c_date.map(|d| format!(" ({d})")).unwrap_or_default(),
                r.params.m,
                r.params.omega,
                r.rmse,
                r.accepted
            ))
        }
        Command::Scan => {
            let r = cmd_scan(&cfg)?;
            Ok(format!(
                "verdict {} ({} of {} windows accepted, mode {}{})",
                r.verdict,
                r.n_accepted,
                r.n_windows,
                r.mode_bin.map_or("-".to_string(), |b| b.to_string()),
                r.mode_date.map(|d| format!(" = {d}")).unwrap_or_default()
            ))
        }
        Command::Synth(args) => {
            let path = cmd_synth(args, cfg.seed, &cfg.out_dir)?;
            Ok(format!("wrote {}", path.display()))
        }
    }
}
