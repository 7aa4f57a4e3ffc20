//! Synthetic series with known ground truth.
//!
//! Bubble series follow the LPPL mean path plus i.i.d. Gaussian noise on the
//! log scale; null series are drifting log random walks with no bubble.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{lppl_value, LpplParams, TimeSeries};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub truth: LpplParams,
    pub n_points: usize,
    pub noise_sigma: f64,
    pub seed: u64,
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        self.truth.check_finite()?;
        if self.n_points < 2 {
            return Err(Error::config("n_points", "must be at least 2"));
        }
        if !(self.truth.t_c > (self.n_points - 1) as f64) {
            return Err(Error::config(
                "t_c",
                format!(
                    "{} must lie after the last sample time {}",
                    self.truth.t_c,
                    self.n_points - 1
                ),
            ));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(Error::config("noise_sigma", "must be finite and non-negative"));
        }
        Ok(())
    }
}

/// LPPL path sampled at `0..n_points` with additive noise.
pub fn generate_lppl_series(spec: &SynthSpec) -> Result<TimeSeries> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let values = (0..spec.n_points)
        .map(|i| {
            let mean = lppl_value(&spec.truth, i as f64)?;
            if spec.noise_sigma == 0.0 {
                Ok(mean)
            } else {
                let z: f64 = rng.sample(StandardNormal);
                Ok(mean + spec.noise_sigma * z)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    TimeSeries::from_values(values, None, true)
}

/// Log random walk starting at 0 with constant drift and Gaussian steps.
pub fn generate_null_series(n_points: usize, drift: f64, vol: f64, seed: u64) -> Result<TimeSeries> {
    if n_points < 2 {
        return Err(Error::config("n_points", "must be at least 2"));
    }
    if !(vol >= 0.0 && vol.is_finite()) {
        return Err(Error::config("vol", "must be finite and non-negative"));
    }
    if !drift.is_finite() {
        return Err(Error::config("drift", "must be finite"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Drift enters as i * drift rather than a running sum so a
    // zero-volatility walk is exactly linear.
    let mut shocks = 0.0;
    let mut values = Vec::with_capacity(n_points);
    values.push(0.0);
    for i in 1..n_points {
        let z: f64 = rng.sample(StandardNormal);
        shocks += z;
        values.push(i as f64 * drift + vol * shocks);
    }
    TimeSeries::from_values(values, None, true)
}
