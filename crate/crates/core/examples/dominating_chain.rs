// Coupling a walk with a dominating birth-death chain through shared uniforms.
//
//     cargo run --example dominating_chain

use parabolicity::chain::ChainSpec;
use parabolicity::coupling::{self, PhiTable, ReplayOracle, SyntheticOracle};
use parabolicity::pathstats::DiscretizedWalk;
use parabolicity::rng::replication_rng;
use parabolicity::{Error, Result};
use rand::Rng;

pub fn run_example() -> Result<f64> {
    let spec = ChainSpec::constant(0, 0.5)?;
    let table = PhiTable::two_regime(0, 10, 0.4, 0.45);

    // The first seed whose walk X survives a dozen steps.
    let (uniforms, run) = (0..)
        .map(|seed| -> Result<_> {
            let mut rng = replication_rng(seed, 0);
            let uniforms: Vec<f64> = (0..40).map(|_| rng.random()).collect();
            let mut oracle = SyntheticOracle::new(table.clone(), &spec, replication_rng(seed, 1))?;
            let run = coupling::build_dominating_chain(&mut oracle, &spec, &uniforms)?;
            Ok((uniforms, run))
        })
        .find(|r| r.as_ref().map_or(true, |(_, run)| run.x.len() > 12))
        .unwrap()?;
    println!("X: {:?}", run.x);
    println!("Y: {:?}", run.y);
    println!("Y >= X throughout: {}", run.domination_held);

    // A replayed walk carries no conditional probabilities, so equal levels cannot be resolved.
    let walk = DiscretizedWalk::from_levels(0, vec![1, 2, 1, 0])?;
    match coupling::build_dominating_chain(&mut ReplayOracle::new(&walk), &spec, &uniforms) {
        Err(Error::Capability(msg)) => println!("replay oracle: {msg}"),
        other => println!("replay oracle: unexpected {other:?}"),
    }

    let summary = coupling::run_coupled(&table, &spec, 5_000, 500, 42)?;
    let marginals = coupling::marginal_check(&summary.y_departures, &spec, 500, 3.0)?;
    println!(
        "{} runs: domination rate {}, Y marginals match p on {} levels: {}",
        summary.runs,
        summary.domination_rate(),
        marginals.levels.len(),
        marginals.all_pass
    );
    Ok(summary.domination_rate())
}

fn main() -> Result<()> {
    run_example().map(|_| ())
}
