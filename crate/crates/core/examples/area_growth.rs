// Occupation times against area on the catenoid, and the occupation bounds from the f2
// comparison chain, with a reduced path count.
//
//     cargo run --release --example area_growth

use parabolicity::cli::config::{ExperimentConfig, MartingaleSection};
use parabolicity::cli::recipes;
use parabolicity::Result;

pub fn run_example() -> Result<f64> {
    let mut cfg = ExperimentConfig {
        seed: Some(99),
        martingale: Some(MartingaleSection {
            paths: Some(200),
            ..Default::default()
        }),
        ..Default::default()
    };
    let (run, _) = recipes::area_growth(&mut cfg)?;
    for row in &run.occupation {
        println!(
            "rho = e^{}: occupation {:.1} +- {:.1}, area {:.1}, ratio {:.3}",
            row.level,
            row.occupation.mean,
            row.occupation.std_error,
            row.analytic_area.unwrap_or(f64::NAN),
            row.ratio.unwrap_or(f64::NAN)
        );
    }
    println!("log-log slope {:.3}", run.slope);
    for b in &run.bounds {
        println!(
            "k = {}: measured {:.3e} <= bound {:.3e}: {}",
            b.k, b.measured.mean, b.bound, b.ok
        );
    }
    println!(
        "area constant for general rho: {:.3e}; catenoid area / (pi rho^2) at rho = 100: {:?}",
        run.general_rho_constant, run.catenoid_area_ratio_at_100
    );
    Ok(run.slope)
}

fn main() -> Result<()> {
    run_example().map(|_| ())
}
