//! Genetic-algorithm calibration of the LPPL over a window of a series.
//!
//! The GA is a plain real-coded one: tournament selection, BLX-α blend
//! crossover, per-gene Gaussian mutation with a geometrically decaying
//! step, and elitism. Every offspring is clamped into the search box, and
//! any objective failure scores `+∞`, so infeasible individuals simply lose
//! tournaments instead of aborting a run.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{self, LpplParams, TimeSeries, Window, PARAM_NAMES};
use crate::scanner::Rejection;

/// Shortest window a calibration accepts: more observations than parameters.
pub const MIN_FIT_LEN: usize = 8;

/// GA hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaConfig {
    pub population_size: usize,
    pub max_generations: usize,
    pub tournament_size: usize,
    pub crossover_rate: f64,
    /// Probability that each gene of an offspring is mutated.
    pub mutation_rate: f64,
    /// Mutation standard deviation as a fraction of each gene's bound width.
    pub mutation_sigma: f64,
    /// Multiplier applied to `mutation_sigma` after every generation.
    pub sigma_decay: f64,
    /// BLX-α expansion factor.
    pub blend_alpha: f64,
    pub elite_count: usize,
    pub stall_generations: usize,
    pub stall_tolerance: f64,
    pub seed: u64,
    /// Run a Nelder-Mead refinement from the GA's best individual.
    pub polish: bool,
    /// Solve `(A, B, C)` by linear least squares and let the GA search only
    /// `(m, ω, φ, t_c)`.
    pub linear_params: bool,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population_size: 200,
            max_generations: 500,
            tournament_size: 3,
            crossover_rate: 0.9,
            mutation_rate: 0.15,
            mutation_sigma: 0.1,
            sigma_decay: 0.99,
            blend_alpha: 0.5,
            elite_count: 2,
            stall_generations: 50,
            stall_tolerance: 1e-8,
            seed: 0,
            polish: true,
            linear_params: true,
        }
    }
}

impl GaConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |x: f64| (0.0..=1.0).contains(&x);
        if self.population_size < self.elite_count + 2 {
            return Err(Error::config(
                "population_size",
                format!(
                    "must be at least elite_count + 2 = {}, got {}",
                    self.elite_count + 2,
                    self.population_size
                ),
            ));
        }
        if self.tournament_size < 1 {
            return Err(Error::config("tournament_size", "must be at least 1"));
        }
        if !unit(self.crossover_rate) {
            return Err(Error::config("crossover_rate", "must lie in [0, 1]"));
        }
        if !unit(self.mutation_rate) {
            return Err(Error::config("mutation_rate", "must lie in [0, 1]"));
        }
        if !(self.mutation_sigma > 0.0 && self.mutation_sigma.is_finite()) {
            return Err(Error::config("mutation_sigma", "must be positive"));
        }
        if !(self.sigma_decay > 0.0 && self.sigma_decay <= 1.0) {
            return Err(Error::config("sigma_decay", "must lie in (0, 1]"));
        }
        if !(self.blend_alpha >= 0.0 && self.blend_alpha.is_finite()) {
            return Err(Error::config("blend_alpha", "must be non-negative"));
        }
        if !(self.stall_tolerance >= 0.0) {
            return Err(Error::config("stall_tolerance", "must be non-negative"));
        }
        Ok(())
    }
}

/// User-facing search ranges. `t_c` is given as an offset past the last
/// observation of the window; `A` defaults to a range derived from the
/// window's values and the `t_c` ceiling to half the window length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchBounds {
    #[serde(rename = "A", skip_serializing_if = "Option::is_none")]
    pub a: Option<[f64; 2]>,
    #[serde(rename = "B")]
    pub b: [f64; 2],
    #[serde(rename = "C")]
    pub c: [f64; 2],
    pub m: [f64; 2],
    pub omega: [f64; 2],
    pub phi: [f64; 2],
    pub tc_offset_min: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tc_offset_max: Option<f64>,
}

impl Default for SearchBounds {
    fn default() -> Self {
        Self {
            a: None,
            b: [-10.0, 10.0],
            c: [-2.0, 2.0],
            m: [0.05, 0.95],
            omega: [4.0, 16.0],
            phi: [0.0, 2.0 * std::f64::consts::PI],
            tc_offset_min: 1e-3,
            tc_offset_max: None,
        }
    }
}

impl SearchBounds {
    pub fn validate(&self) -> Result<()> {
        let check = |field: &'static str, r: [f64; 2]| {
            if r[0].is_finite() && r[1].is_finite() && r[0] < r[1] {
                Ok(())
            } else {
                Err(Error::config(field, format!("need finite lower < upper, got {r:?}")))
            }
        };
        if let Some(a) = self.a {
            check("A", a)?;
        }
        check("B", self.b)?;
        check("C", self.c)?;
        check("m", self.m)?;
        check("omega", self.omega)?;
        check("phi", self.phi)?;
        if !(self.tc_offset_min > 0.0 && self.tc_offset_min.is_finite()) {
            return Err(Error::config("tc_offset_min", "must be strictly positive"));
        }
        if let Some(max) = self.tc_offset_max {
            if !(max > self.tc_offset_min && max.is_finite()) {
                return Err(Error::config("tc_offset_max", "must exceed tc_offset_min"));
            }
        }
        Ok(())
    }

    /// Instantiates absolute bounds for one window of a series.
    pub fn resolve(&self, series: &TimeSeries, window: Window) -> Result<ParamBox> {
        self.validate()?;
        window.check(series.len())?;
        let values = &series.values()[window.start..=window.end];
        let a = self.a.unwrap_or_else(|| {
            let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            // Pad constant windows so the A range never collapses.
            let range = (hi - lo).max(1e-6 * hi.abs().max(1.0));
            [lo - 2.0 * range, hi + 2.0 * range]
        });
        let t_end = series.times()[window.end];
        let tc_max = self.tc_offset_max.unwrap_or(0.5 * window.len() as f64);
        if !(tc_max > self.tc_offset_min) {
            return Err(Error::config(
                "tc_offset_max",
                format!("{tc_max} does not exceed tc_offset_min {}", self.tc_offset_min),
            ));
        }
        Ok(ParamBox {
            lower: LpplParams {
                a: a[0],
                b: self.b[0],
                c: self.c[0],
                m: self.m[0],
                omega: self.omega[0],
                phi: self.phi[0],
                t_c: t_end + self.tc_offset_min,
            },
            upper: LpplParams {
                a: a[1],
                b: self.b[1],
                c: self.c[1],
                m: self.m[1],
                omega: self.omega[1],
                phi: self.phi[1],
                t_c: t_end + tc_max,
            },
        })
    }
}

/// Absolute per-parameter box. A gene with `lower == upper` is held fixed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamBox {
    pub lower: LpplParams,
    pub upper: LpplParams,
}

impl ParamBox {
    pub fn validate(&self) -> Result<()> {
        for ((name, lo), hi) in PARAM_NAMES
            .iter()
            .zip(self.lower.to_array())
            .zip(self.upper.to_array())
        {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(Error::config(
                    "bounds",
                    format!("{name}: need finite lower <= upper, got [{lo}, {hi}]"),
                ));
            }
        }
        Ok(())
    }

    pub fn contains(&self, p: &LpplParams) -> bool {
        p.to_array()
            .iter()
            .zip(self.lower.to_array())
            .zip(self.upper.to_array())
            .all(|((&x, lo), hi)| lo <= x && x <= hi)
    }

    pub fn clamp(&self, p: &LpplParams) -> LpplParams {
        let mut v = p.to_array();
        for ((x, lo), hi) in v.iter_mut().zip(self.lower.to_array()).zip(self.upper.to_array()) {
            *x = x.clamp(lo, hi);
        }
        LpplParams::from_array(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// Best objective stopped improving (including reaching exactly zero).
    Stalled,
    MaxGenerations,
}

/// Result of a GA run, generic over the genome representation.
#[derive(Debug, Clone, PartialEq)]
pub struct GaOutcome<T> {
    pub best: T,
    pub best_value: f64,
    pub generations_run: usize,
    pub evaluations: usize,
    pub stop_reason: StopReason,
    /// Best objective after each generation; entry 0 is the initial
    /// population.
    pub history: Vec<f64>,
}

/// Minimizes `objective` over the box with the GA.
pub fn run_ga<F>(objective: F, bounds: &ParamBox, config: &GaConfig) -> Result<GaOutcome<LpplParams>>
where
    F: Fn(&LpplParams) -> f64,
{
    bounds.validate()?;
    let lower = bounds.lower.to_array();
    let upper = bounds.upper.to_array();
    let out = minimize(
        |g: &[f64]| objective(&LpplParams::from_array(g.try_into().expect("7 genes"))),
        &lower,
        &upper,
        config,
    )?;
    Ok(GaOutcome {
        best: LpplParams::from_array(out.best.as_slice().try_into().expect("7 genes")),
        best_value: out.best_value,
        generations_run: out.generations_run,
        evaluations: out.evaluations,
        stop_reason: out.stop_reason,
        history: out.history,
    })
}

fn score(value: f64) -> f64 {
    if value.is_nan() {
        f64::INFINITY
    } else {
        value
    }
}

/// Whether a gene range covers exactly one full turn, so the gene is an
/// angle and wraps instead of clamping.
fn is_full_turn(lower: f64, upper: f64) -> bool {
    ((upper - lower) - std::f64::consts::TAU).abs() < 1e-9
}

/// Brings `x` back into `[lo, hi]`: wrapping for full-turn angles,
/// clamping otherwise.
fn confine(x: f64, lo: f64, hi: f64, periodic: bool) -> f64 {
    if periodic && !(lo..=hi).contains(&x) {
        lo + (x - lo).rem_euclid(hi - lo)
    } else {
        x.clamp(lo, hi)
    }
}

/// The GA over a plain `[lower, upper]` box of any dimension. Genes whose
/// range spans exactly `2π` are treated as angles.
pub fn minimize<F>(objective: F, lower: &[f64], upper: &[f64], config: &GaConfig) -> Result<GaOutcome<Vec<f64>>>
where
    F: Fn(&[f64]) -> f64,
{
    config.validate()?;
    let dim = lower.len();
    if dim == 0 || upper.len() != dim {
        return Err(Error::config("bounds", "lower and upper must be nonempty and equal length"));
    }
    if lower.iter().zip(upper).any(|(lo, hi)| !(lo.is_finite() && hi.is_finite() && lo <= hi)) {
        return Err(Error::config("bounds", "need finite lower <= upper per gene"));
    }
    let width: Vec<f64> = lower.iter().zip(upper).map(|(lo, hi)| hi - lo).collect();
    let periodic: Vec<bool> = lower.iter().zip(upper).map(|(&lo, &hi)| is_full_turn(lo, hi)).collect();
    let n = config.population_size;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut evaluations = 0usize;
    let mut eval = |genes: &[f64]| {
        evaluations += 1;
        score(objective(genes))
    };

    let mut pop: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            (0..dim)
                .map(|j| lower[j] + width[j] * rng.random::<f64>())
                .collect()
        })
        .collect();
    let mut fit: Vec<f64> = pop.iter().map(|g| eval(g)).collect();

    let best_of = |fit: &[f64]| -> usize {
        (0..fit.len())
            .min_by(|&a, &b| fit[a].total_cmp(&fit[b]))
            .expect("nonempty population")
    };
    let mut history = vec![fit[best_of(&fit)]];
    let mut sigma = config.mutation_sigma;
    let mut generations_run = 0;
    let mut stop_reason = StopReason::MaxGenerations;

    let tournament = |rng: &mut ChaCha8Rng, fit: &[f64]| -> usize {
        let mut winner = rng.random_range(0..fit.len());
        for _ in 1..config.tournament_size {
            let challenger = rng.random_range(0..fit.len());
            if fit[challenger] < fit[winner] {
                winner = challenger;
            }
        }
        winner
    };

    for generation in 1..=config.max_generations {
        if history[generation - 1] == 0.0 {
            stop_reason = StopReason::Stalled;
            break;
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| fit[a].total_cmp(&fit[b]));

        let mut next: Vec<Vec<f64>> = Vec::with_capacity(n);
        let mut next_fit: Vec<f64> = Vec::with_capacity(n);
        for &i in order.iter().take(config.elite_count) {
            next.push(pop[i].clone());
            next_fit.push(fit[i]);
        }

        while next.len() < n {
            let p1 = &pop[tournament(&mut rng, &fit)];
            let p2 = &pop[tournament(&mut rng, &fit)];
            let mut children = [p1.clone(), p2.clone()];
            if rng.random::<f64>() < config.crossover_rate {
                for child in children.iter_mut() {
                    for j in 0..dim {
                        let lo = p1[j].min(p2[j]);
                        let hi = p1[j].max(p2[j]);
                        let pad = config.blend_alpha * (hi - lo);
                        child[j] = lo - pad + (hi - lo + 2.0 * pad) * rng.random::<f64>();
                    }
                }
            }
            for mut child in children {
                if next.len() == n {
                    break;
                }
                for j in 0..dim {
                    if rng.random::<f64>() < config.mutation_rate {
                        let z: f64 = rng.sample(StandardNormal);
                        child[j] += z * sigma * width[j];
                    }
                    child[j] = confine(child[j], lower[j], upper[j], periodic[j]);
                }
                next_fit.push(eval(&child));
                next.push(child);
            }
        }

        pop = next;
        fit = next_fit;
        sigma *= config.sigma_decay;
        generations_run = generation;
        history.push(fit[best_of(&fit)]);

        if generation >= config.stall_generations {
            let old = history[generation - config.stall_generations];
            let new = history[generation];
            if old - new <= config.stall_tolerance * old.abs() {
                stop_reason = StopReason::Stalled;
                break;
            }
        }
    }

    let best = best_of(&fit);
    Ok(GaOutcome {
        best: pop[best].clone(),
        best_value: fit[best],
        generations_run,
        evaluations,
        stop_reason,
        history,
    })
}

/// Nelder-Mead refinement from `start`, confined to the box. The returned
/// objective never exceeds the objective at `start`.
pub fn local_polish<F>(start: &LpplParams, objective: F, bounds: &ParamBox) -> (LpplParams, f64)
where
    F: Fn(&LpplParams) -> f64,
{
    let lower = bounds.lower.to_array();
    let upper = bounds.upper.to_array();
    let start = bounds.clamp(start).to_array();
    let (best, value, _) = nelder_mead(
        |g: &[f64]| objective(&LpplParams::from_array(g.try_into().expect("7 genes"))),
        &start,
        &lower,
        &upper,
        NM_MAX_EVALS,
    );
    (LpplParams::from_array(best.as_slice().try_into().expect("7 genes")), value)
}

const NM_MAX_EVALS: usize = 4000;

/// Bounded Nelder-Mead on coordinates normalized to `[0, 1]` per gene.
/// Returns `(best point, best value, evaluations)`.
pub(crate) fn nelder_mead<F>(
    objective: F,
    start: &[f64],
    lower: &[f64],
    upper: &[f64],
    max_evals: usize,
) -> (Vec<f64>, f64, usize)
where
    F: Fn(&[f64]) -> f64,
{
    let dim = start.len();
    let free: Vec<usize> = (0..dim).filter(|&j| upper[j] > lower[j]).collect();
    let k = free.len();
    let evals = std::cell::Cell::new(0usize);
    let periodic: Vec<bool> = free.iter().map(|&j| is_full_turn(lower[j], upper[j])).collect();
    let to_genes = |u: &[f64]| -> Vec<f64> {
        let mut g = start.to_vec();
        for (slot, &j) in free.iter().enumerate() {
            g[j] = lower[j] + u[slot].clamp(0.0, 1.0) * (upper[j] - lower[j]);
        }
        g
    };
    let f = |u: &[f64]| {
        evals.set(evals.get() + 1);
        score(objective(&to_genes(u)))
    };

    let origin: Vec<f64> = free
        .iter()
        .map(|&j| (start[j] - lower[j]) / (upper[j] - lower[j]))
        .collect();
    evals.set(1);
    let start_value = score(objective(start));
    if k == 0 {
        return (start.to_vec(), start_value, evals.get());
    }

    const STEP: f64 = 0.02;
    let mut simplex = vec![origin.clone()];
    for i in 0..k {
        let mut v = origin.clone();
        v[i] = if v[i] + STEP <= 1.0 { v[i] + STEP } else { v[i] - STEP };
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect();

    let clamp01 = |v: Vec<f64>| -> Vec<f64> {
        v.into_iter()
            .zip(&periodic)
            .map(|(x, &p)| confine(x, 0.0, 1.0, p))
            .collect()
    };

    while evals.get() < max_evals {
        let mut idx: Vec<usize> = (0..=k).collect();
        idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = idx.iter().map(|&i| simplex[i].clone()).collect();
        values = idx.iter().map(|&i| values[i]).collect();

        let spread = values[k] - values[0];
        let size = simplex[1..]
            .iter()
            .flat_map(|v| v.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()))
            .fold(0.0f64, f64::max);
        if (spread.is_finite() && spread <= 1e-15 * values[0].abs().max(1e-300)) || size < 1e-12 {
            break;
        }

        let centroid: Vec<f64> = (0..k)
            .map(|j| simplex[..k].iter().map(|v| v[j]).sum::<f64>() / k as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            clamp01(
                centroid
                    .iter()
                    .zip(&simplex[k])
                    .map(|(c, w)| c + t * (w - c))
                    .collect(),
            )
        };

        let reflected = along(-1.0);
        let fr = f(&reflected);
        if fr < values[0] {
            let expanded = along(-2.0);
            let fe = f(&expanded);
            if fe < fr {
                simplex[k] = expanded;
                values[k] = fe;
            } else {
                simplex[k] = reflected;
                values[k] = fr;
            }
        } else if fr < values[k - 1] {
            simplex[k] = reflected;
            values[k] = fr;
        } else {
            let (contracted, fc) = if fr < values[k] {
                let c = along(-0.5);
                let fc = f(&c);
                (c, fc)
            } else {
                let c = along(0.5);
                let fc = f(&c);
                (c, fc)
            };
            if fc < values[k].min(fr) {
                simplex[k] = contracted;
                values[k] = fc;
            } else {
                let best = simplex[0].clone();
                for i in 1..=k {
                    simplex[i] = best
                        .iter()
                        .zip(&simplex[i])
                        .map(|(b, x)| b + 0.5 * (x - b))
                        .collect();
                    values[i] = f(&simplex[i]);
                }
            }
        }
    }

    let best = (0..=k)
        .min_by(|&a, &b| values[a].total_cmp(&values[b]))
        .expect("nonempty simplex");
    if values[best] < start_value {
        (to_genes(&simplex[best]), values[best], evals.get())
    } else {
        (start.to_vec(), start_value, evals.get())
    }
}

/// One calibrated window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub window: Window,
    /// Time of the window's last observation.
    pub t_end: f64,
    pub params: LpplParams,
    pub sse: f64,
    pub rmse: f64,
    pub generations_run: usize,
    pub objective_evaluations: usize,
    pub converged: bool,
    pub stop_reason: StopReason,
    pub seed: u64,
    pub accepted: bool,
    pub rejection_reasons: Vec<Rejection>,
}

/// Calibrates the LPPL on one window of `series`.
pub fn calibrate_window(
    series: &TimeSeries,
    window: Window,
    bounds: &SearchBounds,
    config: &GaConfig,
) -> Result<FitResult> {
    config.validate()?;
    window.check(series.len())?;
    if window.len() < MIN_FIT_LEN {
        return Err(Error::WindowTooShort {
            len: window.len(),
            min: MIN_FIT_LEN,
        });
    }
    let pbox = bounds.resolve(series, window)?;
    let objective = |p: &LpplParams| model::sse(p, series, window).unwrap_or(f64::INFINITY);

    let (params, value, generations_run, evaluations, stop_reason) = if config.linear_params {
        calibrate_profiled(series, window, &pbox, config)?
    } else {
        let out = run_ga(objective, &pbox, config)?;
        let mut params = out.best;
        let mut value = out.best_value;
        let mut evaluations = out.evaluations;
        if config.polish && value.is_finite() {
            let lower = pbox.lower.to_array();
            let upper = pbox.upper.to_array();
            let (g, v, e) = nelder_mead(
                |g: &[f64]| objective(&LpplParams::from_array(g.try_into().expect("7 genes"))),
                &params.to_array(),
                &lower,
                &upper,
                NM_MAX_EVALS,
            );
            params = LpplParams::from_array(g.as_slice().try_into().expect("7 genes"));
            value = v;
            evaluations += e;
        }
        (params, value, out.generations_run, evaluations, out.stop_reason)
    };

    if !value.is_finite() {
        return Err(Error::Calibration(format!(
            "no feasible individual found on window {window}"
        )));
    }
    Ok(FitResult {
        window,
        t_end: series.times()[window.end],
        params,
        sse: value,
        rmse: model::rmse(value, window.len())?,
        generations_run,
        objective_evaluations: evaluations,
        converged: stop_reason == StopReason::Stalled,
        stop_reason,
        seed: config.seed,
        accepted: false,
        rejection_reasons: Vec::new(),
    })
}

/// GA over `(m, ω, φ, t_c)` with the amplitudes solved in closed form.
fn calibrate_profiled(
    series: &TimeSeries,
    window: Window,
    pbox: &ParamBox,
    config: &GaConfig,
) -> Result<(LpplParams, f64, usize, usize, StopReason)> {
    let amp_lo = [pbox.lower.a, pbox.lower.b, pbox.lower.c];
    let amp_hi = [pbox.upper.a, pbox.upper.b, pbox.upper.c];
    // Amplitudes clamped into the box, with the SSE they give.
    let profile = |g: &[f64]| -> Option<([f64; 3], f64)> {
        let ne = model::NormalEquations::build(series, window, g[0], g[1], g[2], g[3])?;
        let mut beta = ne.solve()?;
        for k in 0..3 {
            beta[k] = beta[k].clamp(amp_lo[k], amp_hi[k]);
        }
        Some((beta, ne.sse_at(beta)))
    };
    let expand = |g: &[f64]| -> Option<LpplParams> {
        let (beta, _) = profile(g)?;
        Some(LpplParams {
            a: beta[0],
            b: beta[1],
            c: beta[2],
            m: g[0],
            omega: g[1],
            phi: g[2],
            t_c: g[3],
        })
    };
    let objective = |g: &[f64]| profile(g).map_or(f64::INFINITY, |(_, v)| v);
    let lower = [pbox.lower.m, pbox.lower.omega, pbox.lower.phi, pbox.lower.t_c];
    let upper = [pbox.upper.m, pbox.upper.omega, pbox.upper.phi, pbox.upper.t_c];
    let out = minimize(objective, &lower, &upper, config)?;
    let mut genes = out.best;
    let mut evaluations = out.evaluations;
    if config.polish && out.best_value.is_finite() {
        let (g, _, e) = nelder_mead(objective, &genes, &lower, &upper, NM_MAX_EVALS);
        genes = g;
        evaluations += e;
    }
    let params = expand(&genes).ok_or_else(|| {
        Error::Calibration(format!("linear amplitude solve failed on window {window}"))
    })?;
    let value = model::sse(&params, series, window)?;
    Ok((params, value, out.generations_run, evaluations, out.stop_reason))
}

/// Deterministic per-window seed from the master seed and the window's
/// identity, so results never depend on scheduling order.
pub fn window_seed(master: u64, window: Window) -> u64 {
    let mut h = splitmix64(master);
    h = splitmix64(h ^ window.start as u64);
    splitmix64(h ^ (window.len() as u64).rotate_left(32))
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
