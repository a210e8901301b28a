//! Monte Carlo checks of the path simulator against planar closed forms, plus seeding and
//! error reporting.

use parabolicity::geometry::{self, NormalStrategy, Point3, UnitVector3};
use parabolicity::martingale::{self, SimConfig, StepSize, StopReason, TraceMode};
use parabolicity::pathstats::{self, EstimateWithCI, FirstHit};
use parabolicity::Error;

fn planar_annulus(eta: f64, seed: u64) -> SimConfig {
    let mut cfg = SimConfig::new(0);
    cfg.step = StepSize::ScaleCovariant { eta };
    cfg.outer_level = Some(2);
    cfg.stop_at_outer = true;
    cfg.max_time = 1e4;
    cfg.trace = TraceMode::Endpoints;
    cfg.master_seed = seed;
    cfg
}

/// `E[tau]` for planar BM from radius `r` in the annulus `a < r < b`.
fn planar_exit_time(r: f64, a: f64, b: f64) -> f64 {
    (a * a - r * r) / 2.0 + (b * b - a * a) / 2.0 * (r / a).ln() / (b / a).ln()
}

#[test]
fn planar_annulus_hitting_and_exit_time() {
    let start = Point3::new(1f64.exp(), 0.0, 0.0);
    let strategy = NormalStrategy::horizontal_plane(0.0);
    let n = 4000;
    let paths = martingale::run_replications(&strategy, start, &planar_annulus(0.001, 21), n).unwrap();
    let outer = paths
        .iter()
        .filter(|p| p.stop_reason == StopReason::OuterBarrier)
        .count() as u64;
    let hit = EstimateWithCI::from_counts(outer, n).unwrap();
    assert!(hit.within(0.5, 3.0), "{hit:?}");
    let times: Vec<f64> = paths.iter().map(|p| p.duration).collect();
    let t = EstimateWithCI::from_samples(&times).unwrap();
    let exact = planar_exit_time(1f64.exp(), 1.0, 2f64.exp());
    // Barriers are only checked at the samples, so excursions between them are missed; that
    // widens the annulus by about 0.58 sqrt(eta) in log r, roughly 5% on the exit time here.
    assert!(
        (t.mean - exact).abs() <= 3.0 * t.std_error + 0.06 * exact,
        "{t:?} vs {exact}"
    );
}

#[test]
fn halving_the_step_is_stable() {
    let start = Point3::new(1f64.exp(), 0.0, 0.0);
    let strategy = NormalStrategy::horizontal_plane(0.0);
    let mean = |eta: f64| {
        let paths = martingale::run_replications(&strategy, start, &planar_annulus(eta, 4), 2000).unwrap();
        let t: Vec<f64> = paths.iter().map(|p| p.duration).collect();
        EstimateWithCI::from_samples(&t).unwrap()
    };
    let (coarse, fine) = (mean(0.004), mean(0.002));
    let se = (coarse.std_error.powi(2) + fine.std_error.powi(2)).sqrt();
    assert!((coarse.mean - fine.mean).abs() <= 4.0 * se, "{coarse:?} vs {fine:?}");
}

#[test]
fn replications_are_reproducible_and_distinct() {
    let strategy = NormalStrategy::catenoid(1.0).unwrap();
    let start = geometry::catenoid_point_at_radius(1.0, 1f64.exp(), 0.0).unwrap();
    let mut cfg = SimConfig::new(0);
    cfg.step = StepSize::Fixed(1e-3);
    cfg.max_time = 0.5;
    cfg.master_seed = 77;
    let a = martingale::run_replications(&strategy, start, &cfg, 8).unwrap();
    let b = martingale::run_replications(&strategy, start, &cfg, 8).unwrap();
    assert_eq!(a, b);
    assert_ne!(a[0].positions, a[1].positions);
    let single = martingale::simulate_path(&strategy, start, &cfg, 5).unwrap();
    assert_eq!(single, a[5]);
    for p in &a {
        assert!(p.max_surface_residual < 1e-9);
    }
}

#[test]
fn helicoid_residuals_are_centered() {
    let strategy = NormalStrategy::helicoid(1.0).unwrap();
    let start = Point3::new(2.0, 0.0, 0.0);
    let mut cfg = SimConfig::new(-5);
    cfg.step = StepSize::Fixed(1e-3);
    cfg.max_time = 0.25;
    cfg.master_seed = 12;
    let paths = martingale::run_replications(&strategy, start, &cfg, 2000).unwrap();
    let stats = martingale::drift_residual_check(&paths).unwrap();
    assert!(stats.all_within(4.0), "{stats:?}");
}

#[test]
fn walk_from_annulus_paths_is_consistent() {
    let start = Point3::new(1f64.exp(), 0.0, 0.0);
    let strategy = NormalStrategy::horizontal_plane(0.0);
    let paths = martingale::run_replications(&strategy, start, &planar_annulus(0.002, 9), 300).unwrap();
    for p in &paths {
        let walk = pathstats::discretize_radial(p, 0).unwrap();
        // The outer stop at level 2 sits below the ceiling 3 for k = 2.
        let up = pathstats::hitting_and_upcrossings(&walk, 2).unwrap();
        match p.stop_reason {
            StopReason::InnerBarrier => assert_eq!(*walk.levels.last().unwrap(), 0),
            StopReason::OuterBarrier => {
                assert_eq!(up.first, FirstHit::Neither);
                assert_eq!(*walk.levels.last().unwrap(), 2);
            }
            _ => {}
        }
    }
}

#[test]
fn failing_control_reports_the_replication() {
    let strategy = NormalStrategy::custom("fails far out", |p: &Point3| {
        if p.r() > 3.0 {
            Err(Error::Domain("outside the chart".into()))
        } else {
            Ok(UnitVector3::e3())
        }
    });
    let mut cfg = SimConfig::new(0);
    cfg.step = StepSize::Fixed(0.01);
    cfg.max_time = 100.0;
    cfg.master_seed = 1;
    match martingale::run_replications(&strategy, Point3::new(2.0, 0.0, 0.0), &cfg, 4) {
        Err(Error::Replication { index, source }) => {
            assert_eq!(index, 0);
            assert!(matches!(*source, Error::Simulation { .. }));
        }
        other => panic!("unexpected {other:?}"),
    }
}
