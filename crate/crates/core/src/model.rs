//! The log-periodic power law, its parameter set, and the least-squares
//! objective used to calibrate it.
//!
//! The model describes the mean log-price during a bubble as
//!
//! ```text
//! LPPL(t) = A + B (t_c - t)^m + C (t_c - t)^m cos(ω ln(t_c - t) + φ)
//! ```
//!
//! and is only defined strictly before the critical time `t_c`. Time is
//! measured on the observation-index axis (`0, 1, 2, …`), so `t_c` is a real
//! number of trading days counted from the first observation.

use chrono::{Datelike, Duration, NaiveDate, Weekday};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The seven LPPL parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LpplParams {
    /// Log-price level at the critical time.
    #[serde(rename = "A")]
    pub a: f64,
    /// Power-law amplitude; negative for a positive (crash-ending) bubble.
    #[serde(rename = "B")]
    pub b: f64,
    /// Log-periodic oscillation amplitude.
    #[serde(rename = "C")]
    pub c: f64,
    /// Power-law exponent.
    pub m: f64,
    /// Angular log-frequency of the oscillations.
    pub omega: f64,
    /// Phase in radians.
    pub phi: f64,
    /// Critical time on the observation-index axis.
    pub t_c: f64,
}

/// Gene names in the order used by [`LpplParams::to_array`].
pub const PARAM_NAMES: [&str; 7] = ["A", "B", "C", "m", "omega", "phi", "t_c"];

impl LpplParams {
    pub fn to_array(&self) -> [f64; 7] {
        [self.a, self.b, self.c, self.m, self.omega, self.phi, self.t_c]
    }

    pub fn from_array(v: [f64; 7]) -> Self {
        Self {
            a: v[0],
            b: v[1],
            c: v[2],
            m: v[3],
            omega: v[4],
            phi: v[5],
            t_c: v[6],
        }
    }

    /// Fails with the name of the first non-finite field.
    pub fn check_finite(&self) -> Result<()> {
        for (name, value) in PARAM_NAMES.iter().zip(self.to_array()) {
            if !value.is_finite() {
                return Err(Error::NonFiniteParam(name));
            }
        }
        Ok(())
    }

    #[inline]
    fn eval_unchecked(&self, t: f64) -> Option<f64> {
        let tau = self.t_c - t;
        if !(tau > 0.0) {
            return None;
        }
        let ln_tau = tau.ln();
        let tau_m = (self.m * ln_tau).exp();
        Some(self.a + tau_m * (self.b + self.c * (self.omega * ln_tau + self.phi).cos()))
    }
}

/// Inclusive range of observation indices `[start, end]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Window {
    pub start: usize,
    pub end: usize,
}

impl Window {
    pub fn new(start: usize, end: usize) -> Self {
        Self { start, end }
    }

    /// Window spanning the whole of a series of `len` observations.
    pub fn full(len: usize) -> Self {
        Self::new(0, len.saturating_sub(1))
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.end + 1 - self.start
    }

    pub fn check(&self, series_len: usize) -> Result<()> {
        if self.start > self.end || self.end >= series_len {
            return Err(Error::WindowOutOfBounds {
                start: self.start,
                end: self.end,
                len: series_len,
            });
        }
        Ok(())
    }
}

impl std::fmt::Display for Window {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}, {}]", self.start, self.end)
    }
}

/// Ordered observations on the index time axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    times: Vec<f64>,
    values: Vec<f64>,
    dates: Option<Vec<NaiveDate>>,
    log_transformed: bool,
}

impl TimeSeries {
    /// Builds a series from already-transformed values with times `0..N`.
    pub fn from_values(
        values: Vec<f64>,
        dates: Option<Vec<NaiveDate>>,
        log_transformed: bool,
    ) -> Result<Self> {
        let times = (0..values.len()).map(|i| i as f64).collect();
        Self::from_parts(times, values, dates, log_transformed)
    }

    /// Builds a series from raw prices, taking natural logs when
    /// `log_transform` is set.
    pub fn from_prices(
        prices: &[f64],
        dates: Option<Vec<NaiveDate>>,
        log_transform: bool,
    ) -> Result<Self> {
        let values = if log_transform {
            prices
                .iter()
                .enumerate()
                .map(|(i, &p)| {
                    if p > 0.0 && p.is_finite() {
                        Ok(p.ln())
                    } else {
                        Err(Error::InvalidSeries(format!(
                            "price {p} at index {i} is not strictly positive; \
                             log transform impossible"
                        )))
                    }
                })
                .collect::<Result<Vec<_>>>()?
        } else {
            prices.to_vec()
        };
        Self::from_values(values, dates, log_transform)
    }

    pub fn from_parts(
        times: Vec<f64>,
        values: Vec<f64>,
        dates: Option<Vec<NaiveDate>>,
        log_transformed: bool,
    ) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::InvalidSeries(format!(
                "{} times but {} values",
                times.len(),
                values.len()
            )));
        }
        if times.len() < 2 {
            return Err(Error::InvalidSeries(format!(
                "need at least 2 observations, got {}",
                times.len()
            )));
        }
        if let Some(i) = times.windows(2).position(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidSeries(format!(
                "times not strictly increasing at index {}",
                i + 1
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidSeries(format!("non-finite value at index {i}")));
        }
        if let Some(d) = &dates {
            if d.len() != times.len() {
                return Err(Error::InvalidSeries(format!(
                    "{} dates for {} observations",
                    d.len(),
                    times.len()
                )));
            }
            if let Some(i) = d.windows(2).position(|w| w[0] >= w[1]) {
                return Err(Error::InvalidSeries(format!(
                    "dates not strictly increasing at index {}",
                    i + 1
                )));
            }
        }
        Ok(Self {
            times,
            values,
            dates,
            log_transformed,
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dates(&self) -> Option<&[NaiveDate]> {
        self.dates.as_deref()
    }

    pub fn is_log_transformed(&self) -> bool {
        self.log_transformed
    }

    /// Calendar date of an (integer) observation index. Indices past the
    /// last observation extend the date ladder with weekdays, ignoring
    /// holidays; negative indices extend it backwards the same way.
    pub fn date_at_index(&self, index: i64) -> Option<NaiveDate> {
        let dates = self.dates.as_ref()?;
        let last = dates.len() as i64 - 1;
        if index < 0 {
            Some(add_business_days(dates[0], index))
        } else if index <= last {
            Some(dates[index as usize])
        } else {
            Some(add_business_days(dates[last as usize], index - last))
        }
    }
}

/// Moves `n` weekdays forward (or backward for negative `n`) from `date`.
pub fn add_business_days(date: NaiveDate, n: i64) -> NaiveDate {
    let step = if n >= 0 { 1 } else { -1 };
    let mut d = date;
    let mut remaining = n.abs();
    while remaining > 0 {
        d += Duration::days(step);
        if !matches!(d.weekday(), Weekday::Sat | Weekday::Sun) {
            remaining -= 1;
        }
    }
    d
}

/// Consecutive weekdays starting at `start` (rolled forward if it falls on
/// a weekend).
pub fn business_days(start: NaiveDate, n: usize) -> Vec<NaiveDate> {
    let mut d = start;
    while matches!(d.weekday(), Weekday::Sat | Weekday::Sun) {
        d += Duration::days(1);
    }
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        out.push(d);
        d = add_business_days(d, 1);
    }
    out
}

/// Evaluates the LPPL at time `t`.
pub fn lppl_value(params: &LpplParams, t: f64) -> Result<f64> {
    params.check_finite()?;
    if !t.is_finite() {
        return Err(Error::InvalidSeries(format!("non-finite time {t}")));
    }
    params
        .eval_unchecked(t)
        .ok_or(Error::BeyondCriticalTime { t, t_c: params.t_c })
}

/// Sum of squared residuals between the series and the model over the
/// window. This is the calibration objective.
pub fn sse(params: &LpplParams, series: &TimeSeries, window: Window) -> Result<f64> {
    params.check_finite()?;
    window.check(series.len())?;
    let times = &series.times[window.start..=window.end];
    let values = &series.values[window.start..=window.end];
    let mut total = 0.0;
    for (&t, &v) in times.iter().zip(values) {
        let model = params
            .eval_unchecked(t)
            .ok_or(Error::BeyondCriticalTime { t, t_c: params.t_c })?;
        let r = v - model;
        total += r * r;
    }
    Ok(total)
}

/// Root-mean-square error from a sum of squares over `n` observations.
pub fn rmse(sse_value: f64, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::ZeroCount);
    }
    if !(sse_value >= 0.0) {
        return Err(Error::InvalidSeries(format!(
            "sum of squares must be non-negative, got {sse_value}"
        )));
    }
    Ok((sse_value / n as f64).sqrt())
}

/// Least-squares `(A, B, C)` for fixed `(m, ω, φ, t_c)`.
///
/// The model is linear in the three amplitudes, so they solve a 3×3 normal
/// system. Returns `None` when the window reaches `t_c` or the system is
/// singular.
pub fn solve_linear(
    series: &TimeSeries,
    window: Window,
    m: f64,
    omega: f64,
    phi: f64,
    t_c: f64,
) -> Option<(f64, f64, f64)> {
    let ne = NormalEquations::build(series, window, m, omega, phi, t_c)?;
    ne.solve().map(|s| (s[0], s[1], s[2]))
}

/// Normal equations of the amplitude regression on the basis
/// `1, τ^m, τ^m cos(ω ln τ + φ)`.
pub(crate) struct NormalEquations {
    xtx: [[f64; 3]; 3],
    xty: [f64; 3],
    yty: f64,
}

impl NormalEquations {
    pub(crate) fn build(
        series: &TimeSeries,
        window: Window,
        m: f64,
        omega: f64,
        phi: f64,
        t_c: f64,
    ) -> Option<Self> {
        if window.check(series.len()).is_err() {
            return None;
        }
        let mut xtx = [[0.0f64; 3]; 3];
        let mut xty = [0.0f64; 3];
        let mut yty = 0.0;
        let times = &series.times[window.start..=window.end];
        let values = &series.values[window.start..=window.end];
        for (&t, &y) in times.iter().zip(values) {
            let tau = t_c - t;
            if !(tau > 0.0) {
                return None;
            }
            let ln_tau = tau.ln();
            let f = (m * ln_tau).exp();
            let g = f * (omega * ln_tau + phi).cos();
            xtx[0][1] += f;
            xtx[0][2] += g;
            xtx[1][1] += f * f;
            xtx[1][2] += f * g;
            xtx[2][2] += g * g;
            xty[0] += y;
            xty[1] += f * y;
            xty[2] += g * y;
            yty += y * y;
        }
        xtx[0][0] = times.len() as f64;
        xtx[1][0] = xtx[0][1];
        xtx[2][0] = xtx[0][2];
        xtx[2][1] = xtx[1][2];
        Some(Self { xtx, xty, yty })
    }

    pub(crate) fn solve(&self) -> Option<[f64; 3]> {
        solve3(self.xtx, self.xty)
    }

    /// Sum of squared residuals at amplitudes `beta`, from the quadratic
    /// form `y'y - 2β'X'y + β'X'Xβ`.
    pub(crate) fn sse_at(&self, beta: [f64; 3]) -> f64 {
        let mut quad = 0.0;
        for r in 0..3 {
            for c in 0..3 {
                quad += beta[r] * self.xtx[r][c] * beta[c];
            }
        }
        let cross: f64 = (0..3).map(|r| beta[r] * self.xty[r]).sum();
        (self.yty - 2.0 * cross + quad).max(0.0)
    }
}

/// Gaussian elimination with partial pivoting.
fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    let scale = a.iter().flatten().fold(0.0f64, |acc, x| acc.max(x.abs()));
    if !(scale > 0.0) {
        return None;
    }
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() <= scale * 1e-14 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..3 {
            let factor = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let tail: f64 = (row + 1..3).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}
