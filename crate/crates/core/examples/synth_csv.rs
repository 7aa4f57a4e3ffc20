//! Writes a synthetic price CSV and reads it back through the ingest path.

use lppl::cli::{ingest_csv, write_series_csv};
use lppl::model::business_days;
use lppl::{generate_lppl_series, LpplParams, SynthSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let series = generate_lppl_series(&SynthSpec {
        truth: LpplParams {
            a: 4.6,
            b: -0.05,
            c: 0.01,
            m: 0.6,
            omega: 9.0,
            phi: 0.5,
            t_c: 140.0,
        },
        n_points: 120,
        noise_sigma: 0.005,
        seed: 11,
    })?;
    let start = chrono::NaiveDate::from_ymd_opt(2016, 1, 4).unwrap();
    let dates = business_days(start, series.len());
    let prices: Vec<f64> = series.values().iter().map(|v| v.exp()).collect();

    let path = std::env::temp_dir().join("lppl_synth_example.csv");
    write_series_csv(&path, &dates, &prices)?;
    let back = ingest_csv(&path, true)?;
    let worst = series
        .values()
        .iter()
        .zip(back.values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    println!("wrote {} ({} rows)", path.display(), back.len());
    println!("dates {} .. {}", dates[0], dates[dates.len() - 1]);
    println!("t_c=140 falls on {:?}", back.date_at_index(140));
    println!("max |ln(exp(x)) - x| = {worst:.1e}");
    Ok(())
}
