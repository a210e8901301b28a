// Brownian motion on the catenoid: Euler steps with retraction, martingale residuals and
// the largest distance from the surface.
//
//     cargo run --example catenoid_paths

use parabolicity::geometry::{self, NormalStrategy};
use parabolicity::martingale::{self, SimConfig, StepSize};
use parabolicity::Result;

pub fn run_example() -> Result<bool> {
    let strategy = NormalStrategy::catenoid(1.0)?;
    let start = geometry::catenoid_point_at_radius(1.0, 1f64.exp(), 0.0)?;
    let mut cfg = SimConfig::new(0);
    cfg.step = StepSize::Fixed(1e-3);
    cfg.max_time = 0.25;
    cfg.master_seed = 5;
    let paths = martingale::run_replications(&strategy, start, &cfg, 400)?;

    let first = &paths[0];
    println!(
        "path 0: {} steps, stopped by {:?}, end r = {:.4}, surface residual {:.2e}",
        first.steps,
        first.stop_reason,
        first.end().r(),
        first.max_surface_residual
    );
    let stats = martingale::drift_residual_check(&paths)?;
    for (name, e) in [("r^2", stats.r2), ("x3^2", stats.x3_sq), ("log r", stats.log_r)] {
        println!("{name:>6} residual: {:+.3e} +- {:.3e}", e.mean, e.std_error);
    }
    Ok(stats.all_within(3.0))
}

fn main() -> Result<()> {
    run_example().map(|_| ())
}
