//! Compares the default search (A, B, C solved by least squares for each
//! candidate) with the GA over all seven parameters.

use std::time::Instant;

use lppl::{calibrate_window, generate_lppl_series, GaConfig, LpplParams, SearchBounds, SynthSpec, Window};

fn main() -> lppl::Result<()> {
    let truth = LpplParams {
        a: 1.0,
        b: -1.0,
        c: 0.3,
        m: 0.5,
        omega: 8.0,
        phi: 1.0,
        t_c: 260.0,
    };
    for seed in 0..4 {
        let series = generate_lppl_series(&SynthSpec {
            truth,
            n_points: 250,
            noise_sigma: 0.01,
            seed,
        })?;
        for linear_params in [true, false] {
            let cfg = GaConfig {
                linear_params,
                ..GaConfig::default().with_seed(seed)
            };
            let t0 = Instant::now();
            let fit = calibrate_window(&series, Window::full(250), &SearchBounds::default(), &cfg)?;
            println!(
                "seed {seed} {:<6} sse={:.5} t_c={:>7.2} m={:.3} omega={:>6.3} {:.2?}",
                if linear_params { "linear" } else { "full" },
                fit.sse,
                fit.params.t_c,
                fit.params.m,
                fit.params.omega,
                t0.elapsed()
            );
        }
    }
    Ok(())
}
