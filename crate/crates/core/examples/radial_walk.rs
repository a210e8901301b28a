// From a simulated path to its radial walk: level crossings, first hits, upcrossing counts
// and exit times.
//
//     cargo run --example radial_walk

use parabolicity::geometry::{self, NormalStrategy};
use parabolicity::martingale::{self, SimConfig, StepSize};
use parabolicity::pathstats::{self, LevelDepartures};
use parabolicity::Result;

pub fn run_example() -> Result<LevelDepartures> {
    let floor = 0;
    let strategy = NormalStrategy::catenoid(0.5)?;
    let start = geometry::catenoid_point_at_radius(0.5, 1f64.exp(), 0.0)?;
    let mut cfg = SimConfig::new(floor);
    cfg.step = StepSize::ScaleCovariant { eta: 0.01 };
    cfg.max_time = 1e4;
    cfg.master_seed = 3;
    let paths = martingale::run_replications(&strategy, start, &cfg, 200)?;

    let mut departures = LevelDepartures::default();
    let mut hits = 0;
    for p in &paths {
        let walk = pathstats::discretize_radial(p, floor)?;
        departures.add_walk(&walk);
        if pathstats::hitting_and_upcrossings(&walk, 2)?.first == pathstats::FirstHit::Ceiling {
            hits += 1;
        }
    }
    println!("paths reaching level 3 before the floor: {hits} of {}", paths.len());
    for (m, (up, down)) in departures.counts.iter().take(5) {
        println!("level {m}: {up} up, {down} down");
    }
    let exit = pathstats::first_passage_time_bound_check(&paths, floor, 2)?;
    println!(
        "E[exit time] = {:.3} +- {:.3}, bound {:.3}, censored {}",
        exit.mean_exit_time.mean, exit.mean_exit_time.std_error, exit.bound, exit.censored
    );
    Ok(departures)
}

fn main() -> Result<()> {
    run_example().map(|_| ())
}
