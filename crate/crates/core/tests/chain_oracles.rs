//! Chain quantities against brute-force linear algebra and simulation.

use approx::assert_relative_eq;
use nalgebra::{DMatrix, DVector};
use parabolicity::chain::{ChainSpec, WalkOutcome};
use parabolicity::rng::replication_rng;
use proptest::prelude::*;

/// `P(hit k before floor | start floor + 1)` from the absorbing-chain linear system.
fn brute_force_hit(p: &[f64], floor: i64, k: i64) -> f64 {
    // Unknowns h_m for m = floor+1 ..= k-1; h_floor = 0, h_k = 1.
    let n = (k - floor - 1) as usize;
    let mut a = DMatrix::<f64>::zeros(n, n);
    let mut b = DVector::<f64>::zeros(n);
    for i in 0..n {
        let pm = p[i];
        a[(i, i)] = 1.0;
        if i + 1 < n {
            a[(i, i + 1)] = -pm;
        } else {
            b[i] = pm;
        }
        if i > 0 {
            a[(i, i - 1)] = -(1.0 - pm);
        }
    }
    a.lu().solve(&b).unwrap()[0]
}

#[test]
fn harmonic_chain_closed_forms() {
    let spec = ChainSpec::harmonic(0).unwrap();
    // q_j/p_j = j/(j+1), so R_j = 1/(j+1) and A_m is the harmonic number H_{m+1}.
    for m in 1..50 {
        let h: f64 = (1..=m + 1).map(|j| 1.0 / j as f64).sum();
        assert_relative_eq!(spec.a_value(m).unwrap(), h, max_relative = 1e-12);
    }
}

#[test]
fn hitting_matches_linear_system_on_random_tables() {
    let mut rng = replication_rng(31, 0);
    use rand::Rng;
    for _ in 0..25 {
        let floor = rng.random_range(0..5);
        let values: Vec<f64> = (0..6).map(|_| rng.random_range(0.05..0.95)).collect();
        let spec = ChainSpec::table(floor, values.clone()).unwrap();
        for k in floor + 2..=floor + 6 {
            let direct = brute_force_hit(&values, floor, k);
            let ours = spec.hit_up_before_floor(k - 1).unwrap();
            assert!((ours - direct).abs() < 1e-12, "k {k}: {ours} vs {direct}");
        }
    }
}

#[test]
fn walk_simulation_matches_hitting_probability() {
    let spec = ChainSpec::table(0, vec![0.3, 0.6, 0.5, 0.7]).unwrap();
    let target = spec.hit_up_before_floor(3).unwrap();
    let n = 20_000;
    let mut rng = replication_rng(8, 0);
    let mut hits = 0;
    for _ in 0..n {
        if spec.run_to_ceiling(1, 4, 10_000, &mut rng).unwrap() == WalkOutcome::Ceiling {
            hits += 1;
        }
    }
    let f = hits as f64 / n as f64;
    let se = (target * (1.0 - target) / n as f64).sqrt();
    assert!((f - target).abs() <= 4.0 * se, "{f} vs {target}");
}

proptest! {
    #[test]
    fn a_is_increasing_and_hit_in_unit_interval(
        floor in 0i64..20,
        values in proptest::collection::vec(0.01f64..0.99, 1..30),
    ) {
        let spec = ChainSpec::table(floor, values.clone()).unwrap();
        let mut prev = 0.0;
        for m in floor + 1..=floor + values.len() as i64 {
            let a = spec.a_value(m).unwrap();
            prop_assert!(a >= 1.0 && a > prev);
            let h = spec.hit_up_before_floor(m).unwrap();
            prop_assert!(h > 0.0 && h <= 1.0);
            prop_assert!((h * a - 1.0).abs() < 1e-12);
            prev = a;
        }
    }

    #[test]
    fn constant_chain_matches_gambler_ruin(p in 0.05f64..0.95, m in 1i64..60) {
        let spec = ChainSpec::constant(0, p).unwrap();
        let r = (1.0 - p) / p;
        let expected: f64 = (0..=m).map(|j| r.powi(j as i32)).sum();
        let a = spec.a_value(m).unwrap();
        prop_assert!((a - expected).abs() <= 1e-9 * expected.max(1.0), "{a} vs {expected}");
    }

    #[test]
    fn upcrossings_equal_a_over_ratio(values in proptest::collection::vec(0.05f64..0.95, 2..20)) {
        let spec = ChainSpec::table(0, values.clone()).unwrap();
        for m in 1..=values.len() as i64 {
            let e = spec.expected_upcrossings(m).unwrap();
            let direct = spec.a_value(m).unwrap() / spec.ratio_product(m).unwrap();
            prop_assert!((e - direct).abs() <= 1e-9 * direct);
        }
    }
}
