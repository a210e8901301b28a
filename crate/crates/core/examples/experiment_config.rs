// Writing, loading and resolving an experiment config; the resolved TOML is what a run
// directory records.
//
//     cargo run --example experiment_config

use parabolicity::cli::config::{self, ExperimentConfig};
use parabolicity::cli::recipes;
use parabolicity::Result;

const TEXT: &str = r#"
seed = 17

[chain]
kind = "envelope_f1"
c = 1.0
m_max = 20
"#;

pub fn run_example() -> Result<String> {
    let mut cfg = ExperimentConfig::from_toml(TEXT)?;
    let report = recipes::chain_report(&mut cfg)?;
    println!(
        "verdict {:?}, crossover {:?}",
        report.parabolicity.verdict, report.parabolicity.crossover
    );
    let resolved = cfg.to_toml()?;
    println!("resolved config:\n{resolved}");

    let again = ExperimentConfig::from_toml(&resolved)?;
    assert_eq!(again, cfg);
    println!("seed {} (default {})", again.seed(), config::DEFAULT_SEED);

    match ExperimentConfig::from_toml("[chain]\nkind = \"harmonic\"\ntypo = 1\n") {
        Err(e) => println!("rejected: {e}"),
        Ok(_) => println!("unexpectedly accepted"),
    }
    Ok(resolved)
}

fn main() -> Result<()> {
    run_example().map(|_| ())
}
