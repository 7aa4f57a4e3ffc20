//! Multi-window scan of a synthetic bubble: t_c histogram and verdict.

use lppl::{generate_lppl_series, scan, GaConfig, LpplParams, ScanConfig, SynthSpec};

fn main() -> lppl::Result<()> {
    let series = generate_lppl_series(&SynthSpec {
        truth: LpplParams {
            a: 1.0,
            b: -1.0,
            c: 0.3,
            m: 0.5,
            omega: 8.0,
            phi: 1.0,
            t_c: 260.0,
        },
        n_points: 250,
        noise_sigma: 0.01,
        seed: 1,
    })?;
    let cfg = ScanConfig {
        ga: GaConfig::default().with_seed(1),
        ..ScanConfig::default()
    };
    let report = scan(&series, &cfg)?;

    for fit in &report.fits {
        println!(
            "{:<12} t_c={:>7.2} m={:.3} omega={:>6.3} {}",
            fit.window.to_string(),
            fit.params.t_c,
            fit.params.m,
            fit.params.omega,
            if fit.accepted { "ok".to_string() } else { format!("{:?}", fit.rejection_reasons) }
        );
    }
    println!();
    for bin in &report.histogram {
        println!("{:>4} {}", bin.t_c_index, "#".repeat(bin.count));
    }
    println!(
        "verdict {} ({}/{} accepted, mode {:?}, {} clustered)",
        report.verdict.label(),
        report.n_accepted,
        report.n_windows,
        report.verdict.mode_bin,
        report.verdict.clustered
    );
    Ok(())
}
