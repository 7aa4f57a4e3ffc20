//! Evaluates an LPPL curve and scores it against a series.

use lppl::{lppl_value, rmse, sse, LpplParams, TimeSeries, Window};

fn main() -> lppl::Result<()> {
    let p = LpplParams {
        a: 1.0,
        b: -1.0,
        c: 0.3,
        m: 0.5,
        omega: 8.0,
        phi: 1.0,
        t_c: 260.0,
    };
    for t in [0.0, 100.0, 200.0, 250.0, 259.0] {
        println!("t={t:>5}  lppl={:.6}", lppl_value(&p, t)?);
    }

    // A slightly perturbed curve scored against the exact one.
    let values: Vec<f64> = (0..250).map(|i| lppl_value(&p, i as f64)).collect::<lppl::Result<_>>()?;
    let series = TimeSeries::from_values(values, None, true)?;
    let off = LpplParams { omega: 8.05, ..p };
    let w = Window::full(series.len());
    let total = sse(&off, &series, w)?;
    println!("sse={total:.6e} rmse={:.6e}", rmse(total, w.len())?);

    // Evaluating at or past the critical time is an error.
    println!("t=t_c -> {}", lppl_value(&p, 260.0).unwrap_err());
    Ok(())
}
