//! The per-level dominance test on surfaces where the answer is known in advance.

use parabolicity::chain::ChainSpec;
use parabolicity::coupling;
use parabolicity::envelope::Envelope;
use parabolicity::geometry::{NormalStrategy, Point3};
use parabolicity::martingale::{self, SimConfig, StepSize, TraceMode};
use parabolicity::pathstats::{self, LevelDepartures};

const FLOOR: i64 = 6;

fn departures(strategy: &NormalStrategy, paths: u64, max_time: f64) -> LevelDepartures {
    let start = Point3::new(((FLOOR + 1) as f64).exp(), 0.0, 0.0);
    let mut cfg = SimConfig::new(FLOOR);
    cfg.step = StepSize::ScaleCovariant { eta: 0.01 };
    cfg.max_time = max_time;
    cfg.trace = TraceMode::Endpoints;
    cfg.master_seed = 8;
    let mut d = LevelDepartures::default();
    for p in martingale::run_replications(strategy, start, &cfg, paths).unwrap() {
        d.add_walk(&pathstats::discretize_radial(&p, FLOOR).unwrap());
    }
    d
}

fn f2_chain() -> ChainSpec {
    ChainSpec::from_envelope(Envelope::f2(1.0, FLOOR).unwrap()).unwrap()
}

#[test]
fn helicoid_never_beats_the_chain() {
    // log r is superharmonic on the helicoid, so its up-rate stays at or below 1/2.
    let d = departures(
        &NormalStrategy::helicoid(1.0).unwrap(),
        400,
        (2.0 * (FLOOR + 20) as f64).exp(),
    );
    let report = coupling::statistical_dominance_test(&d, &f2_chain(), 200, 3.0).unwrap();
    assert!(!report.levels.is_empty());
    assert!(report.all_pass, "{report:?}");
}

#[test]
fn radial_control_is_caught() {
    // With n = e_r the radius only grows, so every departure is upward.
    let d = departures(&NormalStrategy::RadialControl, 50, (2.0 * (FLOOR + 8) as f64).exp());
    let report = coupling::statistical_dominance_test(&d, &f2_chain(), 20, 3.0).unwrap();
    assert!(!report.levels.is_empty());
    assert!(!report.all_pass);
    assert!(report.levels.iter().all(|l| l.frequency == 1.0));
}
