// Admissible floors, borderline crossovers and transition probabilities for the two
// closed-form envelopes and a tabulated one.
//
//     cargo run --example envelope_admissibility

use parabolicity::envelope::{self, Envelope, LogTable, ProfileKind};
use parabolicity::Result;

pub fn run_example() -> Result<(i64, i64)> {
    let f1_floor = envelope::min_valid_floor(ProfileKind::F1, 1.0, 1000)?;
    let f2_floor = envelope::min_valid_floor(ProfileKind::F2, 1.0, 1000)?;
    println!("smallest admissible floor: f1 {f1_floor}, f2 {f2_floor}");

    for kind in [ProfileKind::F1, ProfileKind::F2] {
        match envelope::borderline_crossover(kind, 1.0)? {
            Some(m) => println!("{kind:?}: p_m <= (m+1)/(2m+1) from m = {m}"),
            None => println!("{kind:?}: no crossover found"),
        }
    }

    let env = Envelope::f2(1.0, f2_floor)?;
    for m in [f2_floor + 1, 50, 1000, 100_000] {
        let x = env.excess(m)?;
        println!(
            "m = {m:>6}: excess {x:.3e}, p_m {:.12}, closed form {:.12}, Taylor estimate {}",
            env.pm(m)?,
            envelope::pm_closed_form(ProfileKind::F2, 1.0, m)?,
            envelope::taylor_estimate_holds(x)
        );
    }
    let sum = envelope::log_ratio_sum_bound(1.0, f2_floor + 1, 100_000)?;
    println!(
        "sum of log(p/q) up to 1e5: {:.6}, series bound holds on {} terms: {}",
        sum.sum, sum.checked_terms, sum.bound_ok
    );

    // A cone-like tabulated profile f(r) = r / 50 on [1, e^30].
    let nodes: Vec<(f64, f64)> = (0..=30).map(|j| (j as f64, (j as f64).exp() / 50.0)).collect();
    let custom = Envelope::custom(LogTable::from_log_radii(nodes)?, 1.0, 5)?;
    println!(
        "custom profile on floor 5: admissible = {}, p_6 = {:.6}",
        custom.condition_holds(),
        custom.pm(6)?
    );
    Ok((f1_floor, f2_floor))
}

fn main() -> Result<()> {
    run_example().map(|_| ())
}
