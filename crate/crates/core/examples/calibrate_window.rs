//! Calibrates one window of a noisy synthetic bubble and applies the
//! acceptance filter.
//!
//! ```text
//! cargo run --release --example calibrate_window -- [seed]
//! ```

use lppl::{accept_signal, calibrate_window, generate_lppl_series, FilterConfig, GaConfig, LpplParams, SearchBounds, SynthSpec, Window};

fn main() -> lppl::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let truth = LpplParams {
        a: 1.0,
        b: -1.0,
        c: 0.3,
        m: 0.5,
        omega: 8.0,
        phi: 1.0,
        t_c: 260.0,
    };
    let series = generate_lppl_series(&SynthSpec {
        truth,
        n_points: 250,
        noise_sigma: 0.01,
        seed,
    })?;

    let fit = calibrate_window(&series, Window::full(250), &SearchBounds::default(), &GaConfig::default().with_seed(seed))?;
    let p = fit.params;
    println!("truth  t_c={:.2} m={:.3} omega={:.3} B={:.3} C={:.3}", truth.t_c, truth.m, truth.omega, truth.b, truth.c);
    println!("fitted t_c={:.2} m={:.3} omega={:.3} B={:.3} C={:.3}", p.t_c, p.m, p.omega, p.b, p.c);
    println!(
        "rmse={:.5} generations={} evaluations={} stop={:?}",
        fit.rmse, fit.generations_run, fit.objective_evaluations, fit.stop_reason
    );

    let (accepted, reasons) = accept_signal(&fit, &FilterConfig::default());
    println!("accepted={accepted} {reasons:?}");
    Ok(())
}
