//! Nearest-neighbour walks on `{L, L+1, ...}` absorbed at the floor `L`.
//!
//! All ratio products and their sums are carried as logarithms. With
//! `R_m = prod_{j=L+1}^m q_j/p_j` (and `R_L = 1`):
//!
//! * `A_m = sum_{j=L}^m R_j`, the reciprocal of `P_{L+1}(hit m+1 before L)`;
//! * the expected number of `m -> m+1` passages given the walk reaches `m+1` is `A_m / R_m`.

use std::cmp::Ordering;

use rand::Rng;
use serde::Serialize;

use crate::envelope::{self, Envelope, Profile};
use crate::error::{Error, Result};

pub const DEFAULT_HORIZON: i64 = 10_000;
pub const DEFAULT_BLOWUP_THRESHOLD: f64 = 1e6;

/// Largest `q/p` on the checked tail that still counts as geometric decay.
const TRANSIENT_MAX_RATIO: f64 = 0.99;
/// Tail mass, relative to `A_h`, below which the limit is considered pinned down.
const TRANSIENT_TAIL_TOLERANCE: f64 = 1e-9;

/// Rule that assigns `p_m` to each level `m >= L + 1`.
#[derive(Debug, Clone, PartialEq)]
pub enum UpProb {
    Constant(f64),
    /// `p_m = (m+1)/(2m+1)`.
    HarmonicBorderline,
    Envelope(Envelope),
    /// `values[i] = p_{L+1+i}`.
    Table(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainSpec {
    floor: i64,
    up: UpProb,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainTrajectory {
    pub states: Vec<i64>,
    pub absorbed: bool,
    pub steps_used: u64,
}

/// How a walk run against a ceiling finished.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WalkOutcome {
    Floor,
    Ceiling,
    StepCap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Parabolic,
    Transient,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictReason {
    /// `p_m <= (m+1)/(2m+1)` from an index on, proven for the closed-form kind.
    BorderlineCertificate,
    /// `p_m <= (m+1)/(2m+1)` on the whole checked tail.
    BorderlineScan,
    /// `A_horizon` exceeds the blow-up threshold.
    Blowup,
    /// `q_m/p_m` bounded by a ratio below one on the checked tail.
    GeometricTail,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParabolicityReport {
    pub verdict: Verdict,
    pub reason: VerdictReason,
    pub horizon: i64,
    /// First level from which `p_m <= (m+1)/(2m+1)`, when known.
    pub crossover: Option<u128>,
    pub a_horizon: f64,
    /// `A_horizon` plus the geometric tail bound, for transient verdicts.
    pub a_limit_estimate: Option<f64>,
    pub tail_bound: Option<f64>,
}

/// One row of the per-level table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevelRow {
    pub m: i64,
    pub p: f64,
    pub ratio_product: f64,
    pub a_value: f64,
    pub hit_up_before_floor: f64,
    pub expected_upcrossings: f64,
}

fn check_prob(p: f64, what: &str) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::validation(format!("{what}: p = {p} must lie in (0, 1)")))
    }
}

fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

impl ChainSpec {
    pub fn constant(floor: i64, p: f64) -> Result<Self> {
        check_prob(p, "constant chain")?;
        Self::new(floor, UpProb::Constant(p), format!("constant p = {p}"))
    }

    pub fn harmonic(floor: i64) -> Result<Self> {
        Self::new(floor, UpProb::HarmonicBorderline, "p_m = (m+1)/(2m+1)".into())
    }

    /// Comparison chain of an admissible envelope, on the envelope's floor.
    pub fn from_envelope(env: Envelope) -> Result<Self> {
        if !env.condition_holds() {
            return Err(Error::Precondition(format!(
                "envelope {:?} with c = {} is not admissible on floor {}",
                env.kind(),
                env.c(),
                env.floor()
            )));
        }
        let description = format!("envelope {:?}, c = {}, L = {}", env.kind(), env.c(), env.floor());
        Self::new(env.floor(), UpProb::Envelope(env), description)
    }

    pub fn table(floor: i64, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::validation("table chain needs at least one level"));
        }
        for (i, &p) in values.iter().enumerate() {
            check_prob(p, &format!("table level {}", floor + 1 + i as i64))?;
        }
        let n = values.len();
        Self::new(floor, UpProb::Table(values), format!("table of {n} levels"))
    }

    fn new(floor: i64, up: UpProb, description: String) -> Result<Self> {
        if floor < 0 {
            return Err(Error::validation(format!("floor {floor} must be >= 0")));
        }
        Ok(ChainSpec { floor, up, description })
    }

    pub fn floor(&self) -> i64 {
        self.floor
    }

    pub fn up(&self) -> &UpProb {
        &self.up
    }

    /// Highest level with a defined `p_m`, if the rule is bounded.
    pub fn max_level(&self) -> Option<i64> {
        match &self.up {
            UpProb::Table(v) => Some(self.floor + v.len() as i64),
            UpProb::Envelope(env) => env.max_level(),
            _ => None,
        }
    }

    fn check_level(&self, m: i64) -> Result<()> {
        if m < self.floor + 1 {
            return Err(Error::domain(format!("level {m} below L + 1 = {}", self.floor + 1)));
        }
        if let Some(max) = self.max_level() {
            if m > max {
                return Err(Error::domain(format!("level {m} beyond the last defined level {max}")));
            }
        }
        Ok(())
    }

    pub fn up_prob(&self, m: i64) -> Result<f64> {
        self.check_level(m)?;
        let p = match &self.up {
            UpProb::Constant(p) => *p,
            UpProb::HarmonicBorderline => (m + 1) as f64 / (2 * m + 1) as f64,
            UpProb::Envelope(env) => 0.5 + env.excess(m)?,
            UpProb::Table(v) => v[(m - self.floor - 1) as usize],
        };
        Ok(p)
    }

    /// `ln(p_m / q_m)`.
    pub fn log_odds(&self, m: i64) -> Result<f64> {
        self.check_level(m)?;
        Ok(match &self.up {
            UpProb::HarmonicBorderline => ((m + 1) as f64 / m as f64).ln(),
            UpProb::Envelope(env) => envelope::log_odds_from_excess(env.excess(m)?),
            _ => {
                let p = self.up_prob(m)?;
                p.ln() - (-p).ln_1p()
            }
        })
    }

    /// `ln prod_{j=L+1}^m q_j/p_j`.
    pub fn log_ratio_product(&self, m: i64) -> Result<f64> {
        self.check_level(m)?;
        let mut s = 0.0;
        for j in self.floor + 1..=m {
            s -= self.log_odds(j)?;
        }
        Ok(s)
    }

    pub fn ratio_product(&self, m: i64) -> Result<f64> {
        Ok(self.log_ratio_product(m)?.exp())
    }

    /// `ln A_m`.
    pub fn log_a_value(&self, m: i64) -> Result<f64> {
        self.check_level(m)?;
        let mut log_r = 0.0;
        let mut log_a = 0.0;
        for j in self.floor + 1..=m {
            log_r -= self.log_odds(j)?;
            log_a = log_add_exp(log_a, log_r);
        }
        Ok(log_a)
    }

    pub fn a_value(&self, m: i64) -> Result<f64> {
        Ok(self.log_a_value(m)?.exp())
    }

    /// `P_{L+1}(hit m+1 before L) = 1/A_m`.
    pub fn hit_up_before_floor(&self, m: i64) -> Result<f64> {
        Ok((-self.log_a_value(m)?).exp())
    }

    /// `1 + p_m/q_m + ... + (p_m...p_{L+1})/(q_m...q_{L+1})`.
    pub fn expected_upcrossings(&self, m: i64) -> Result<f64> {
        let mut log_e = 0.0;
        for j in self.floor + 1..=m {
            log_e = log_add_exp(0.0, self.log_odds(j)? + log_e);
        }
        self.check_level(m)?;
        Ok(log_e.exp())
    }

    /// All per-level quantities for `m = L+1 ..= m_max` in one linear pass.
    pub fn level_table(&self, m_max: i64) -> Result<Vec<LevelRow>> {
        self.check_level(m_max)?;
        let mut rows = Vec::with_capacity((m_max - self.floor) as usize);
        let (mut log_r, mut log_a, mut log_e) = (0.0, 0.0, 0.0);
        for m in self.floor + 1..=m_max {
            let lo = self.log_odds(m)?;
            log_r -= lo;
            log_a = log_add_exp(log_a, log_r);
            log_e = log_add_exp(0.0, lo + log_e);
            rows.push(LevelRow {
                m,
                p: self.up_prob(m)?,
                ratio_product: log_r.exp(),
                a_value: log_a.exp(),
                hit_up_before_floor: (-log_a).exp(),
                expected_upcrossings: log_e.exp(),
            });
        }
        Ok(rows)
    }

    /// Proven index from which `p_m <= (m+1)/(2m+1)`, for kinds where it is known in closed form.
    fn borderline_certificate(&self) -> Result<Option<u128>> {
        let first = (self.floor + 1).max(2) as u128;
        Ok(match &self.up {
            UpProb::Constant(p) if *p <= 0.5 => Some(first),
            UpProb::HarmonicBorderline => Some(first),
            UpProb::Envelope(env) => match env.profile() {
                Profile::F1 | Profile::F2 => envelope::borderline_crossover(env.kind(), env.c())?.map(|m| m.max(first)),
                Profile::Custom(_) => None,
            },
            _ => None,
        })
    }

    /// Three-valued parabolicity surrogate over `[L+1, horizon]`.
    pub fn is_parabolic(&self, horizon: i64, blowup_threshold: f64) -> Result<ParabolicityReport> {
        if horizon < self.floor + 2 {
            return Err(Error::domain(format!(
                "horizon {horizon} must be >= L + 2 = {}",
                self.floor + 2
            )));
        }
        let rows = self.level_table(horizon)?;
        let last = rows[rows.len() - 1];
        let mut report = ParabolicityReport {
            verdict: Verdict::Inconclusive,
            reason: VerdictReason::None,
            horizon,
            crossover: None,
            a_horizon: last.a_value,
            a_limit_estimate: None,
            tail_bound: None,
        };

        if let Some(m) = self.borderline_certificate()? {
            report.verdict = Verdict::Parabolic;
            report.reason = VerdictReason::BorderlineCertificate;
            report.crossover = Some(m);
            return Ok(report);
        }

        let tail_start = self.floor + 1 + (horizon - self.floor) / 2;
        let tail = &rows[(tail_start - self.floor - 1) as usize..];
        let below = |r: &LevelRow| r.m >= 2 && r.p <= (r.m + 1) as f64 / (2 * r.m + 1) as f64;
        if tail.iter().all(below) {
            let suffix = rows.iter().rev().take_while(|r| below(r)).count();
            report.verdict = Verdict::Parabolic;
            report.reason = VerdictReason::BorderlineScan;
            report.crossover = Some(rows[rows.len() - suffix].m as u128);
            return Ok(report);
        }

        if last.a_value > blowup_threshold {
            report.verdict = Verdict::Parabolic;
            report.reason = VerdictReason::Blowup;
            return Ok(report);
        }

        let rho = tail.iter().map(|r| (1.0 - r.p) / r.p).fold(0.0f64, f64::max);
        if rho <= TRANSIENT_MAX_RATIO {
            let bound = last.ratio_product * rho / (1.0 - rho);
            if bound <= TRANSIENT_TAIL_TOLERANCE * last.a_value {
                report.verdict = Verdict::Transient;
                report.reason = VerdictReason::GeometricTail;
                report.tail_bound = Some(bound);
                report.a_limit_estimate = Some(last.a_value + bound);
            }
        }
        Ok(report)
    }

    fn step<R: Rng + ?Sized>(&self, m: i64, rng: &mut R) -> Result<i64> {
        let p = self.up_prob(m)?;
        Ok(if rng.random::<f64>() < p { m + 1 } else { m - 1 })
    }

    /// Runs the walk from `start` until absorption or `max_steps` transitions.
    pub fn simulate<R: Rng + ?Sized>(&self, start: i64, max_steps: u64, rng: &mut R) -> Result<ChainTrajectory> {
        if start < self.floor {
            return Err(Error::domain(format!("start {start} below the floor {}", self.floor)));
        }
        if max_steps < 1 {
            return Err(Error::validation("max_steps must be >= 1"));
        }
        let mut states = vec![start];
        let mut m = start;
        let mut steps = 0;
        while m > self.floor && steps < max_steps {
            m = self.step(m, rng)?;
            states.push(m);
            steps += 1;
        }
        Ok(ChainTrajectory {
            states,
            absorbed: m == self.floor,
            steps_used: steps,
        })
    }

    /// Runs the walk from `start` until it reaches the floor or `ceiling`, without storing it.
    pub fn run_to_ceiling<R: Rng + ?Sized>(
        &self,
        start: i64,
        ceiling: i64,
        max_steps: u64,
        rng: &mut R,
    ) -> Result<WalkOutcome> {
        if !(self.floor..=ceiling).contains(&start) {
            return Err(Error::domain(format!(
                "start {start} outside [{}, {ceiling}]",
                self.floor
            )));
        }
        let mut m = start;
        for _ in 0..max_steps {
            match m.cmp(&self.floor) {
                Ordering::Equal => return Ok(WalkOutcome::Floor),
                _ if m == ceiling => return Ok(WalkOutcome::Ceiling),
                _ => m = self.step(m, rng)?,
            }
        }
        Ok(if m == self.floor {
            WalkOutcome::Floor
        } else if m == ceiling {
            WalkOutcome::Ceiling
        } else {
            WalkOutcome::StepCap
        })
    }
}

impl ChainTrajectory {
    /// Checks the nearest-neighbour and absorption invariants.
    pub fn is_consistent(&self, floor: i64) -> bool {
        let steps_ok = self.states.windows(2).all(|w| (w[1] - w[0]).abs() == 1);
        let n = self.states.len();
        let floor_only_last = self.states[..n - 1].iter().all(|&s| s != floor);
        let absorbed_ok = !self.absorbed || self.states[n - 1] == floor;
        steps_ok && floor_only_last && absorbed_ok && self.steps_used as usize == n - 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::replication_rng;
    use approx::assert_relative_eq;

    #[test]
    fn ratio_product_examples() {
        assert_relative_eq!(ChainSpec::constant(0, 0.5).unwrap().ratio_product(5).unwrap(), 1.0);
        assert_relative_eq!(
            ChainSpec::harmonic(0).unwrap().ratio_product(4).unwrap(),
            0.2,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            ChainSpec::constant(0, 2.0 / 3.0).unwrap().ratio_product(3).unwrap(),
            0.125,
            max_relative = 1e-14
        );
        assert!(matches!(
            ChainSpec::harmonic(3).unwrap().ratio_product(3),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn a_value_examples() {
        assert_relative_eq!(
            ChainSpec::constant(0, 0.5).unwrap().a_value(4).unwrap(),
            5.0,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            ChainSpec::harmonic(0).unwrap().a_value(3).unwrap(),
            1.0 + 0.5 + 1.0 / 3.0 + 0.25,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            ChainSpec::constant(0, 2.0 / 3.0).unwrap().a_value(10).unwrap(),
            2.0 - 2f64.powi(-10),
            max_relative = 1e-14
        );
    }

    #[test]
    fn hit_probability_examples() {
        assert_relative_eq!(
            ChainSpec::constant(0, 0.5).unwrap().hit_up_before_floor(4).unwrap(),
            0.2,
            max_relative = 1e-14
        );
        assert!((ChainSpec::harmonic(0).unwrap().hit_up_before_floor(3).unwrap() - 0.48).abs() < 1e-12);
        assert_relative_eq!(
            ChainSpec::constant(0, 2.0 / 3.0)
                .unwrap()
                .hit_up_before_floor(200)
                .unwrap(),
            0.5,
            max_relative = 1e-14
        );
    }

    #[test]
    fn expected_upcrossings_examples() {
        assert_relative_eq!(
            ChainSpec::constant(0, 0.5).unwrap().expected_upcrossings(4).unwrap(),
            5.0,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            ChainSpec::harmonic(0).unwrap().expected_upcrossings(3).unwrap(),
            1.0 + 4.0 / 3.0 + 2.0 + 4.0,
            max_relative = 1e-14
        );
        let spec = ChainSpec::constant(2, 0.3).unwrap();
        assert_relative_eq!(
            spec.expected_upcrossings(3).unwrap(),
            1.0 + 0.3 / 0.7,
            max_relative = 1e-14
        );
    }

    #[test]
    fn level_table_matches_pointwise() {
        let spec = ChainSpec::table(1, vec![0.3, 0.6, 0.45, 0.52, 0.7]).unwrap();
        for row in spec.level_table(6).unwrap() {
            assert_relative_eq!(row.a_value, spec.a_value(row.m).unwrap(), max_relative = 1e-13);
            assert_relative_eq!(
                row.expected_upcrossings,
                spec.expected_upcrossings(row.m).unwrap(),
                max_relative = 1e-13
            );
            assert_relative_eq!(
                row.expected_upcrossings,
                row.a_value / row.ratio_product,
                max_relative = 1e-12
            );
        }
        assert!(spec.up_prob(7).is_err());
    }

    #[test]
    fn verdict_examples() {
        let half = ChainSpec::constant(0, 0.5).unwrap().is_parabolic(1000, 1e6).unwrap();
        assert_eq!(half.verdict, Verdict::Parabolic);
        let harm = ChainSpec::harmonic(0)
            .unwrap()
            .is_parabolic(DEFAULT_HORIZON, DEFAULT_BLOWUP_THRESHOLD)
            .unwrap();
        assert_eq!(harm.verdict, Verdict::Parabolic);
        let tr = ChainSpec::constant(0, 2.0 / 3.0)
            .unwrap()
            .is_parabolic(DEFAULT_HORIZON, 1e6)
            .unwrap();
        assert_eq!(tr.verdict, Verdict::Transient);
        assert!((tr.a_limit_estimate.unwrap() - 2.0).abs() < 1e-6);
        let slight = ChainSpec::table(0, vec![0.55; 20])
            .unwrap()
            .is_parabolic(20, 1e6)
            .unwrap();
        assert_eq!(slight.verdict, Verdict::Inconclusive);
        let scan = ChainSpec::table(0, vec![0.5; 50])
            .unwrap()
            .is_parabolic(50, 1e6)
            .unwrap();
        assert_eq!(
            (scan.verdict, scan.reason),
            (Verdict::Parabolic, VerdictReason::BorderlineScan)
        );
        assert!(ChainSpec::harmonic(5).unwrap().is_parabolic(6, 1e6).is_err());
    }

    #[test]
    fn f1_chain_is_parabolic_via_certificate() {
        let spec = ChainSpec::from_envelope(Envelope::f1(1.0, 10).unwrap()).unwrap();
        let rep = spec.is_parabolic(1000, 1e6).unwrap();
        assert_eq!(rep.verdict, Verdict::Parabolic);
        assert!(rep.crossover.unwrap() > 1u128 << 70);
        assert!(ChainSpec::from_envelope(Envelope::f1(1.0, 9).unwrap()).is_err());
    }

    #[test]
    fn simulate_basic() {
        let spec = ChainSpec::harmonic(2).unwrap();
        let mut rng = replication_rng(1, 0);
        let t = spec.simulate(2, 10, &mut rng).unwrap();
        assert_eq!(t.states, vec![2]);
        assert!(t.absorbed);
        for i in 0..50 {
            let mut rng = replication_rng(9, i);
            let t = spec.simulate(3, 500, &mut rng).unwrap();
            assert!(t.is_consistent(2));
            let mut rng2 = replication_rng(9, i);
            assert_eq!(t, spec.simulate(3, 500, &mut rng2).unwrap());
        }
        let short = ChainSpec::table(0, vec![0.99; 3]).unwrap();
        let mut rng = replication_rng(2, 0);
        assert!(matches!(short.simulate(3, 100, &mut rng), Err(Error::Domain(_))));
    }
}
