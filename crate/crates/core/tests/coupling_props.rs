//! Pathwise domination and marginal laws of the coupled chain.

use parabolicity::chain::ChainSpec;
use parabolicity::coupling::{self, PhiRule, PhiTable, ReplayOracle, SyntheticOracle};
use parabolicity::pathstats::DiscretizedWalk;
use parabolicity::rng::replication_rng;
use parabolicity::Error;
use proptest::prelude::*;
use rand::Rng;

fn uniforms(seed: u64, n: usize) -> Vec<f64> {
    let mut rng = replication_rng(seed, 0);
    (0..n).map(|_| rng.random()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn y_dominates_x_for_any_admissible_table(
        ps in proptest::collection::vec(0.2f64..0.9, 12),
        fractions in proptest::collection::vec(0.0f64..1.0, 12),
        end_prob in 0.0f64..0.1,
        seed in 0u64..10_000,
    ) {
        let floor = 3;
        // Padded so that 200 steps can never leave the table.
        let mut values = ps.clone();
        values.resize(250, 0.5);
        let spec = ChainSpec::table(floor, values).unwrap();
        let mut rules: Vec<PhiRule> = fractions
            .iter()
            .enumerate()
            .map(|(i, f)| {
                let m = floor + 1 + i as i64;
                let phi = f * ps[i] * (1.0 - end_prob);
                PhiRule { end_prob, ..PhiRule::levels(m, Some(m), phi) }
            })
            .collect();
        rules.push(PhiRule::levels(floor + 13, None, 0.0));
        let table = PhiTable { rules };
        let mut oracle = SyntheticOracle::new(table, &spec, replication_rng(seed, 1)).unwrap();
        let run = coupling::build_dominating_chain(&mut oracle, &spec, &uniforms(seed, 200)).unwrap();
        prop_assert!(run.domination_held);
        prop_assert!(coupling::verify_domination(&run.x, &run.y));
        prop_assert!(run.y.windows(2).all(|w| (w[1] - w[0]).abs() == 1));
    }
}

#[test]
fn phi_above_p_is_rejected() {
    let spec = ChainSpec::constant(0, 0.5).unwrap();
    let table = PhiTable {
        rules: vec![PhiRule::levels(1, None, 0.6)],
    };
    assert!(table.validate(&spec).is_err());
    assert!(SyntheticOracle::new(table, &spec, replication_rng(0, 0)).is_err());
}

#[test]
fn replay_oracle_lacks_phi() {
    let spec = ChainSpec::constant(0, 0.5).unwrap();
    let walk = DiscretizedWalk::from_levels(0, vec![1, 2, 3, 2]).unwrap();
    let r = coupling::build_dominating_chain(&mut ReplayOracle::new(&walk), &spec, &uniforms(1, 10));
    assert!(matches!(r, Err(Error::Capability(_))));
}

#[test]
fn coupled_marginals_follow_the_chain() {
    let spec = ChainSpec::harmonic(0).unwrap();
    let table = PhiTable::matching(&spec, 2000).unwrap();
    let half: Vec<PhiRule> = table.rules.iter().map(|r| PhiRule { phi: r.phi * 0.8, ..*r }).collect();
    let summary = coupling::run_coupled(&PhiTable { rules: half }, &spec, 20_000, 300, 5).unwrap();
    assert_eq!(summary.domination_rate(), 1.0);
    let y = coupling::marginal_check(&summary.y_departures, &spec, 500, 3.5).unwrap();
    assert!(y.all_pass && y.levels.len() > 5, "{y:?}");
    let x = coupling::statistical_dominance_test(&summary.x_departures, &spec, 500, 3.5).unwrap();
    assert!(x.all_pass);
}

#[test]
fn matching_table_copies_x() {
    let spec = ChainSpec::harmonic(0).unwrap();
    let table = PhiTable::matching(&spec, 500).unwrap();
    let summary = coupling::run_coupled(&table, &spec, 2000, 200, 3).unwrap();
    assert_eq!(summary.identical_prefix_runs, summary.runs);
}
