//! The genetic algorithm on its own, minimizing a closure over a box.

use lppl::calibrator::minimize;
use lppl::GaConfig;

fn main() -> lppl::Result<()> {
    // Rosenbrock in two dimensions; minimum 0 at (1, 1).
    let rosenbrock = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
    let cfg = GaConfig {
        max_generations: 1000,
        ..GaConfig::default().with_seed(3)
    };
    let out = minimize(rosenbrock, &[-2.0, -1.0], &[2.0, 3.0], &cfg)?;
    println!("best {:?} value {:.3e}", out.best, out.best_value);
    println!("{} generations, {} evaluations, {:?}", out.generations_run, out.evaluations, out.stop_reason);
    for (g, v) in out.history.iter().enumerate().step_by(50) {
        println!("gen {g:>4}  {v:.3e}");
    }
    Ok(())
}
