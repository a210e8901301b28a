// The parabolicity experiment on the catenoid inside the f2 envelope, with a reduced path
// count. The `parabolicity` subcommand runs the same recipe at full size.
//
//     cargo run --release --example parabolicity

use parabolicity::cli::config::{ExperimentConfig, MartingaleSection};
use parabolicity::cli::recipes::{self, Report};
use parabolicity::Result;

pub fn run_example() -> Result<bool> {
    let mut cfg = ExperimentConfig {
        seed: Some(2024),
        martingale: Some(MartingaleSection {
            paths: Some(200),
            ..Default::default()
        }),
        ..Default::default()
    };
    let (run, _) = recipes::parabolicity(&mut cfg)?;
    println!(
        "{} paths on {} with floor {}: {} stopped at the inner barrier",
        run.paths, run.strategy, run.floor, run.stops.inner_barrier
    );
    for h in &run.hit_checks {
        println!(
            "k = {}: P(reach k+1 first) = {:.3} +- {:.3}, chain ceiling {:.3}",
            h.k, h.empirical.mean, h.empirical.std_error, h.chain_ceiling
        );
    }
    let checks = run.checks();
    for c in &checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    Ok(checks.iter().all(|c| c.passed))
}

fn main() -> Result<()> {
    run_example().map(|_| ())
}
