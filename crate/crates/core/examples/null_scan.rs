//! False-positive check: scans log random walks and counts YES verdicts.
//!
//! ```text
//! cargo run --release --example null_scan -- [n_series]
//! ```

use lppl::{generate_null_series, scan, GaConfig, ScanConfig};

fn main() -> lppl::Result<()> {
    let n: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(5);
    let mut positives = 0;
    for seed in 0..n {
        let series = generate_null_series(250, 2e-4, 0.01, seed)?;
        let cfg = ScanConfig {
            ga: GaConfig::default().with_seed(seed),
            ..ScanConfig::default()
        };
        let report = scan(&series, &cfg)?;
        if report.verdict.bubble {
            positives += 1;
        }
        println!(
            "seed {seed}: {} accepted {}/{} clustered {}",
            report.verdict.label(),
            report.n_accepted,
            report.n_windows,
            report.verdict.clustered
        );
    }
    println!("{positives}/{n} false positives");
    Ok(())
}
