// Level tables and parabolicity verdicts for the three standard chains, plus a simulated walk.
//
//     cargo run --example chain_analytics

use parabolicity::chain::{ChainSpec, Verdict, DEFAULT_BLOWUP_THRESHOLD, DEFAULT_HORIZON};
use parabolicity::envelope::Envelope;
use parabolicity::rng::replication_rng;
use parabolicity::Result;

pub fn run_example() -> Result<Vec<Verdict>> {
    let harmonic = ChainSpec::harmonic(0)?;
    println!("{}", harmonic.description);
    println!(
        "{:>4} {:>10} {:>12} {:>12} {:>12}",
        "m", "p_m", "A_m", "P(hit m)", "E[U_m]"
    );
    for row in harmonic.level_table(8)? {
        println!(
            "{:>4} {:>10.6} {:>12.6} {:>12.6} {:>12.6}",
            row.m, row.p, row.a_value, row.hit_up_before_floor, row.expected_upcrossings
        );
    }

    let chains = [
        harmonic,
        ChainSpec::constant(0, 2.0 / 3.0)?,
        ChainSpec::from_envelope(Envelope::f1(1.0, 10)?)?,
    ];
    let mut verdicts = Vec::new();
    for spec in &chains {
        let rep = spec.is_parabolic(DEFAULT_HORIZON, DEFAULT_BLOWUP_THRESHOLD)?;
        println!(
            "{:<40} {:?} via {:?}, A_h = {:.4}, A_inf ~ {:?}",
            spec.description, rep.verdict, rep.reason, rep.a_horizon, rep.a_limit_estimate
        );
        verdicts.push(rep.verdict);
    }

    let mut rng = replication_rng(7, 0);
    let walk = chains[0].simulate(1, 200, &mut rng)?;
    println!("harmonic walk: {} steps, absorbed = {}", walk.steps_used, walk.absorbed);
    Ok(verdicts)
}

fn main() -> Result<()> {
    run_example().map(|_| ())
}
