//! Dominating chain: from the moves of a walk `X_n` whose conditional up-probabilities
//! `phi` never exceed `p_m`, plus one auxiliary uniform per step, build a Markov chain
//! `Y_n` with transition probabilities `p_m` and `Y_n >= X_n`.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::ChainSpec;
use crate::error::{Error, Result};
use crate::pathstats::{DiscretizedWalk, LevelDepartures};
use crate::rng::{self, SimRng};

/// Levels checked past the start of an unbounded rule when validating `phi <= p_m`.
pub const UNBOUNDED_RULE_CHECK: i64 = 10_000;

/// Stream offset that separates the oracle's draws from the coupling uniforms.
const ORACLE_STREAM_BIT: u64 = 1 << 63;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Move {
    Up,
    Down,
    /// The walk does not exist after this step.
    Ended,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleStep {
    pub step: Move,
    /// `P(X_n = m+1 | past)`, when the source knows it.
    pub phi: Option<f64>,
}

/// Source of the moves of `X`.
pub trait StepOracle {
    /// Move of `X` at step `n` (1-based) from level `m`.
    fn next_move(&mut self, n: u64, m: i64) -> Result<OracleStep>;
}

/// `phi` (and the probability that `X` ends) on a block of levels and steps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhiRule {
    pub level_from: i64,
    #[serde(default)]
    pub level_to: Option<i64>,
    #[serde(default)]
    pub step_from: Option<u64>,
    #[serde(default)]
    pub step_to: Option<u64>,
    pub phi: f64,
    #[serde(default)]
    pub end_prob: f64,
}

impl PhiRule {
    pub fn levels(level_from: i64, level_to: Option<i64>, phi: f64) -> Self {
        PhiRule {
            level_from,
            level_to,
            step_from: None,
            step_to: None,
            phi,
            end_prob: 0.0,
        }
    }

    fn matches(&self, n: u64, m: i64) -> bool {
        m >= self.level_from
            && self.level_to.is_none_or(|t| m <= t)
            && self.step_from.is_none_or(|s| n >= s)
            && self.step_to.is_none_or(|s| n <= s)
    }
}

/// First matching rule wins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhiTable {
    pub rules: Vec<PhiRule>,
}

impl PhiTable {
    /// `phi` for levels below `split`, `phi_high` from `split` on.
    pub fn two_regime(floor: i64, split: i64, phi_low: f64, phi_high: f64) -> Self {
        PhiTable {
            rules: vec![
                PhiRule::levels(floor + 1, Some(split - 1), phi_low),
                PhiRule::levels(split, None, phi_high),
            ],
        }
    }

    /// `phi = p_m` everywhere.
    pub fn matching(spec: &ChainSpec, max_level: i64) -> Result<Self> {
        let rules = (spec.floor() + 1..=max_level)
            .map(|m| Ok(PhiRule::levels(m, Some(m), spec.up_prob(m)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(PhiTable { rules })
    }

    pub fn lookup(&self, n: u64, m: i64) -> Option<&PhiRule> {
        self.rules.iter().find(|r| r.matches(n, m))
    }

    /// `0 <= phi <= p_m`, `phi + end_prob <= 1`, and coverage of every level above the floor.
    pub fn validate(&self, spec: &ChainSpec) -> Result<()> {
        let lo = spec.floor() + 1;
        for (i, r) in self.rules.iter().enumerate() {
            if !(0.0..1.0).contains(&r.phi) || !(0.0..=1.0).contains(&r.end_prob) || r.phi + r.end_prob > 1.0 {
                return Err(Error::validation(format!(
                    "rule {i}: phi = {}, end_prob = {} do not form probabilities",
                    r.phi, r.end_prob
                )));
            }
            let first = r.level_from.max(lo);
            let last = match (r.level_to, spec.max_level()) {
                (Some(t), Some(max)) => t.min(max),
                (Some(t), None) => t,
                (None, Some(max)) => max,
                (None, None) => first + UNBOUNDED_RULE_CHECK,
            };
            for m in first..=last {
                let p = spec.up_prob(m)?;
                if r.phi > p {
                    return Err(Error::validation(format!(
                        "rule {i}: phi = {} exceeds p_{m} = {p}",
                        r.phi
                    )));
                }
            }
        }
        if self.lookup(1, lo).is_none() {
            return Err(Error::validation(format!("no rule covers the start level {lo}")));
        }
        Ok(())
    }
}

/// Inhomogeneous walk driven by a `phi` table; it draws its own moves.
#[derive(Debug, Clone)]
pub struct SyntheticOracle {
    table: PhiTable,
    rng: SimRng,
}

impl SyntheticOracle {
    pub fn new(table: PhiTable, spec: &ChainSpec, rng: SimRng) -> Result<Self> {
        table.validate(spec)?;
        Ok(SyntheticOracle { table, rng })
    }
}

impl StepOracle for SyntheticOracle {
    fn next_move(&mut self, n: u64, m: i64) -> Result<OracleStep> {
        let rule = self
            .table
            .lookup(n, m)
            .ok_or_else(|| Error::validation(format!("no phi rule for level {m} at step {n}")))?;
        let v: f64 = self.rng.random();
        let step = if v < rule.phi {
            Move::Up
        } else if v < rule.phi + rule.end_prob {
            Move::Ended
        } else {
            Move::Down
        };
        Ok(OracleStep {
            step,
            phi: Some(rule.phi),
        })
    }
}

/// Replays an observed walk; `phi` is unknown.
#[derive(Debug, Clone)]
pub struct ReplayOracle {
    levels: Vec<i64>,
}

impl ReplayOracle {
    pub fn new(walk: &DiscretizedWalk) -> Self {
        ReplayOracle {
            levels: walk.levels.clone(),
        }
    }
}

impl StepOracle for ReplayOracle {
    fn next_move(&mut self, n: u64, _m: i64) -> Result<OracleStep> {
        let i = n as usize;
        let step = match (self.levels.get(i - 1), self.levels.get(i)) {
            (Some(a), Some(b)) if b > a => Move::Up,
            (Some(_), Some(_)) => Move::Down,
            _ => Move::Ended,
        };
        Ok(OracleStep { step, phi: None })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoupledRun {
    pub y: Vec<i64>,
    /// `X` up to its last completed step.
    pub x: Vec<i64>,
    pub domination_held: bool,
}

/// Builds `Y` from the moves of `X` and `uniforms`, consuming one uniform per step.
///
/// * `Y > X`, or `X` gone: `Y` moves up iff `U <= p_m`.
/// * `Y = X = m`: `Y` copies an up-move of `X`; otherwise it moves up iff
///   `U <= (p_m - phi) / (1 - phi)`.
///
/// `Y` stops at the floor; `X` is absorbed there.
pub fn build_dominating_chain<O: StepOracle + ?Sized>(
    oracle: &mut O,
    spec: &ChainSpec,
    uniforms: &[f64],
) -> Result<CoupledRun> {
    let floor = spec.floor();
    let mut y = vec![floor + 1];
    let mut x = vec![floor + 1];
    let mut x_alive = true;
    for (i, &u) in uniforms.iter().enumerate() {
        let ym = *y.last().unwrap();
        if ym == floor {
            break;
        }
        let n = i as u64 + 1;
        let p = spec.up_prob(ym)?;
        let y_up = if x_alive {
            let xm = *x.last().unwrap();
            let mv = oracle.next_move(n, xm)?;
            match mv.step {
                Move::Up => x.push(xm + 1),
                Move::Down => x.push(xm - 1),
                Move::Ended => x_alive = false,
            }
            if x.last() == Some(&floor) {
                x_alive = false;
            }
            if ym > xm {
                u <= p
            } else {
                let phi = mv.phi.ok_or_else(|| {
                    Error::Capability(format!(
                        "step {n}: equal levels need the conditional up-probability of X"
                    ))
                })?;
                mv.step == Move::Up || u <= (p - phi) / (1.0 - phi)
            }
        } else {
            u <= p
        };
        y.push(if y_up { ym + 1 } else { ym - 1 });
    }
    let domination_held = verify_domination(&x, &y);
    Ok(CoupledRun { y, x, domination_held })
}

/// `Y_n >= X_n` wherever both are defined.
pub fn verify_domination(x: &[i64], y: &[i64]) -> bool {
    x.iter().zip(y).all(|(a, b)| b >= a)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevelCheck {
    pub m: i64,
    pub departures: u64,
    pub ups: u64,
    pub frequency: f64,
    pub p_m: f64,
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominanceReport {
    pub levels: Vec<LevelCheck>,
    pub min_departures: u64,
    pub all_pass: bool,
}

/// One-sided check `freq <= p_m + z sqrt(p_m q_m / n)` at every level with enough departures.
pub fn statistical_dominance_test(
    departures: &LevelDepartures,
    spec: &ChainSpec,
    min_departures: u64,
    z: f64,
) -> Result<DominanceReport> {
    let levels = level_checks(departures, spec, min_departures, z, |freq, p, se| freq <= p + z * se)?;
    Ok(DominanceReport {
        all_pass: levels.iter().all(|l| l.pass),
        levels,
        min_departures,
    })
}

/// Two-sided check `|freq - p_m| <= z sqrt(p_m q_m / n)`, for the marginal law of `Y`.
pub fn marginal_check(
    departures: &LevelDepartures,
    spec: &ChainSpec,
    min_departures: u64,
    z: f64,
) -> Result<DominanceReport> {
    let levels = level_checks(departures, spec, min_departures, z, |freq, p, se| {
        (freq - p).abs() <= z * se
    })?;
    Ok(DominanceReport {
        all_pass: levels.iter().all(|l| l.pass),
        levels,
        min_departures,
    })
}

fn level_checks(
    departures: &LevelDepartures,
    spec: &ChainSpec,
    min_departures: u64,
    z: f64,
    rule: impl Fn(f64, f64, f64) -> bool,
) -> Result<Vec<LevelCheck>> {
    let mut out = Vec::new();
    for (&m, &(ups, downs)) in &departures.counts {
        let n = ups + downs;
        if n < min_departures || m <= spec.floor() {
            continue;
        }
        let p = spec.up_prob(m)?;
        let freq = ups as f64 / n as f64;
        let se = (p * (1.0 - p) / n as f64).sqrt();
        out.push(LevelCheck {
            m,
            departures: n,
            ups,
            frequency: freq,
            p_m: p,
            threshold: p + z * se,
            pass: rule(freq, p, se),
        });
    }
    Ok(out)
}

/// Adds the departures of a raw level sequence.
pub fn add_sequence(d: &mut LevelDepartures, levels: &[i64]) {
    for w in levels.windows(2) {
        let e = d.counts.entry(w[0]).or_insert((0, 0));
        if w[1] > w[0] {
            e.0 += 1;
        } else {
            e.1 += 1;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CouplingSummary {
    pub runs: u64,
    pub dominated_runs: u64,
    /// Runs where `Y` and `X` agreed up to the end of `X`.
    pub identical_prefix_runs: u64,
    pub y_departures: LevelDepartures,
    pub x_departures: LevelDepartures,
}

impl CouplingSummary {
    pub fn domination_rate(&self) -> f64 {
        self.dominated_runs as f64 / self.runs as f64
    }
}

impl CouplingSummary {
    fn empty() -> Self {
        CouplingSummary {
            runs: 0,
            dominated_runs: 0,
            identical_prefix_runs: 0,
            y_departures: LevelDepartures::default(),
            x_departures: LevelDepartures::default(),
        }
    }

    fn add(&mut self, r: &CoupledRun) {
        self.runs += 1;
        self.dominated_runs += r.domination_held as u64;
        self.identical_prefix_runs += (r.y[..r.x.len()] == r.x[..]) as u64;
        add_sequence(&mut self.y_departures, &r.y);
        add_sequence(&mut self.x_departures, &r.x);
    }

    fn merge(&mut self, other: &CouplingSummary) {
        self.runs += other.runs;
        self.dominated_runs += other.dominated_runs;
        self.identical_prefix_runs += other.identical_prefix_runs;
        self.y_departures.merge(&other.y_departures);
        self.x_departures.merge(&other.x_departures);
    }
}

/// Runs folded per worker task; keeps memory flat in the number of runs.
const COUPLING_CHUNK: u64 = 1024;

/// Runs `n` coupled pairs; run `i` takes its uniforms from stream `i` and the oracle's
/// moves from a separate stream.
pub fn run_coupled(
    table: &PhiTable,
    spec: &ChainSpec,
    n: u64,
    max_steps: usize,
    master_seed: u64,
) -> Result<CouplingSummary> {
    table.validate(spec)?;
    let one = |i: u64| -> Result<CoupledRun> {
        let mut rng = rng::replication_rng(master_seed, i);
        let uniforms: Vec<f64> = (0..max_steps).map(|_| rng.random()).collect();
        let mut oracle = SyntheticOracle {
            table: table.clone(),
            rng: rng::replication_rng(master_seed, i | ORACLE_STREAM_BIT),
        };
        build_dominating_chain(&mut oracle, spec, &uniforms).map_err(|e| e.in_replication(i))
    };
    // Chunks come back in order, so the first error is the lowest failing run.
    let parts: Vec<Result<CouplingSummary>> = (0..n.div_ceil(COUPLING_CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut part = CouplingSummary::empty();
            for i in c * COUPLING_CHUNK..((c + 1) * COUPLING_CHUNK).min(n) {
                part.add(&one(i)?);
            }
            Ok(part)
        })
        .collect();
    let mut summary = CouplingSummary::empty();
    for p in parts {
        summary.merge(&p?);
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::replication_rng;

    fn uniforms(seed: u64, n: usize) -> Vec<f64> {
        let mut rng = replication_rng(seed, 0);
        (0..n).map(|_| rng.random()).collect()
    }

    #[test]
    fn phi_equal_p_copies_x() {
        let spec = ChainSpec::constant(0, 0.5).unwrap();
        let table = PhiTable {
            rules: vec![PhiRule {
                end_prob: 0.0,
                ..PhiRule::levels(1, None, 0.5)
            }],
        };
        for seed in 0..20 {
            let mut o = SyntheticOracle::new(table.clone(), &spec, replication_rng(seed, 99)).unwrap();
            let run = build_dominating_chain(&mut o, &spec, &uniforms(seed, 400)).unwrap();
            assert_eq!(&run.y[..run.x.len()], &run.x[..]);
            assert!(run.domination_held);
        }
    }

    #[test]
    fn phi_zero_dominates() {
        let spec = ChainSpec::constant(0, 0.6).unwrap();
        let table = PhiTable {
            rules: vec![PhiRule::levels(1, None, 0.0)],
        };
        let mut o = SyntheticOracle::new(table, &spec, replication_rng(1, 1)).unwrap();
        let run = build_dominating_chain(&mut o, &spec, &uniforms(1, 100)).unwrap();
        assert_eq!(run.x, vec![1, 0]);
        assert!(run.domination_held);
    }

    #[test]
    fn verify_domination_examples() {
        assert!(verify_domination(&[1, 2, 3], &[1, 2, 3]));
        assert!(!verify_domination(&[5, 6], &[5, 4]));
        assert!(verify_domination(&[3, 2], &[3, 4, 5]));
    }

    #[test]
    fn replay_oracle_lacks_phi() {
        let spec = ChainSpec::constant(0, 0.5).unwrap();
        let walk = DiscretizedWalk::from_levels(0, vec![1, 2, 1, 0]).unwrap();
        let mut o = ReplayOracle::new(&walk);
        let err = build_dominating_chain(&mut o, &spec, &uniforms(0, 10)).unwrap_err();
        assert!(matches!(err, Error::Capability(_)));
    }

    #[test]
    fn phi_above_p_rejected() {
        let spec = ChainSpec::constant(0, 0.5).unwrap();
        let table = PhiTable::two_regime(0, 10, 0.4, 0.55);
        assert!(matches!(table.validate(&spec), Err(Error::Validation(_))));
        let bad_end = PhiTable {
            rules: vec![PhiRule {
                end_prob: 0.7,
                ..PhiRule::levels(1, None, 0.4)
            }],
        };
        assert!(bad_end.validate(&spec).is_err());
    }

    #[test]
    fn ending_x_keeps_marginals_and_domination() {
        let spec = ChainSpec::constant(0, 0.5).unwrap();
        let table = PhiTable {
            rules: vec![PhiRule {
                end_prob: 0.05,
                ..PhiRule::levels(1, None, 0.45)
            }],
        };
        let s = run_coupled(&table, &spec, 4000, 300, 17).unwrap();
        assert_eq!(s.dominated_runs, s.runs);
        assert!(marginal_check(&s.y_departures, &spec, 500, 4.0).unwrap().all_pass);
    }
}
