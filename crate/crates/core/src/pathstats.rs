//! Radial discretization of paths, hitting and upcrossing statistics, occupation times,
//! and Monte Carlo estimates with confidence intervals.

use std::collections::BTreeMap;

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::martingale::{self, PathRecord};
use crate::rng::{self, SimRng};

pub const DEFAULT_CONFIDENCE: f64 = 0.95;

/// Allowed mismatch between `log r(Z_0)` and `L + 1`.
pub const START_LEVEL_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EstimateWithCI {
    pub mean: f64,
    pub std_error: f64,
    pub count: u64,
    pub confidence: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl EstimateWithCI {
    pub fn from_samples(xs: &[f64]) -> Result<Self> {
        Self::with_confidence(xs, DEFAULT_CONFIDENCE)
    }

    pub fn with_confidence(xs: &[f64], confidence: f64) -> Result<Self> {
        let n = xs.len();
        if n < 2 {
            return Err(Error::Estimation(format!("need at least 2 samples, got {n}")));
        }
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
        Self::from_moments(mean, (var / n as f64).sqrt(), n as u64, confidence)
    }

    /// Binomial proportion with its normal-approximation interval.
    pub fn from_counts(successes: u64, n: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Estimation(format!("need at least 2 trials, got {n}")));
        }
        let p = successes as f64 / n as f64;
        Self::from_moments(p, (p * (1.0 - p) / n as f64).sqrt(), n, DEFAULT_CONFIDENCE)
    }

    fn from_moments(mean: f64, std_error: f64, count: u64, confidence: f64) -> Result<Self> {
        if !(confidence > 0.0 && confidence < 1.0) {
            return Err(Error::validation(format!("confidence {confidence} outside (0, 1)")));
        }
        let z = Normal::standard().inverse_cdf(0.5 + confidence / 2.0);
        Ok(EstimateWithCI {
            mean,
            std_error,
            count,
            confidence,
            ci_low: mean - z * std_error,
            ci_high: mean + z * std_error,
        })
    }

    /// `|mean - target| <= z * std_error`.
    pub fn within(&self, target: f64, z: f64) -> bool {
        (self.mean - target).abs() <= z * self.std_error
    }
}

/// Runs `n` independent replications of `runner` and summarizes them.
pub fn mc_estimate<F>(runner: F, n: u64, master_seed: u64) -> Result<EstimateWithCI>
where
    F: Fn(u64, &mut SimRng) -> Result<f64> + Sync,
{
    if n < 2 {
        return Err(Error::Estimation(format!("need at least 2 replications, got {n}")));
    }
    let xs = rng::run_indexed(n, master_seed, runner)?;
    EstimateWithCI::from_samples(&xs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WalkEnd {
    FloorHit,
    PathEndedMidInterval,
}

/// The walk `X_n = log r` at the successive unit crossing times `sigma_n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscretizedWalk {
    pub floor: i64,
    pub levels: Vec<i64>,
    /// `sigma_n`; `sigma_0 = 0`.
    pub crossing_times: Vec<f64>,
    pub terminated_by: WalkEnd,
}

impl DiscretizedWalk {
    /// Wraps a level sequence, e.g. a chain trajectory.
    pub fn from_levels(floor: i64, levels: Vec<i64>) -> Result<Self> {
        if levels.first() != Some(&(floor + 1)) {
            return Err(Error::validation(format!("walk must start at L + 1 = {}", floor + 1)));
        }
        if levels.windows(2).any(|w| (w[1] - w[0]).abs() != 1) {
            return Err(Error::validation("walk levels must move by exactly 1"));
        }
        let n = levels.len();
        if levels[..n - 1].iter().any(|&m| m <= floor) || levels[n - 1] < floor {
            return Err(Error::validation("walk may only touch the floor at its last step"));
        }
        let terminated_by = if levels[n - 1] == floor {
            WalkEnd::FloorHit
        } else {
            WalkEnd::PathEndedMidInterval
        };
        Ok(DiscretizedWalk {
            floor,
            crossing_times: (0..n).map(|i| i as f64).collect(),
            levels,
            terminated_by,
        })
    }

    /// `(up, down)` departures from every level.
    pub fn departures(&self) -> LevelDepartures {
        let mut d = LevelDepartures::default();
        d.add_walk(self);
        d
    }
}

/// Discretizes `path` with anchor `L + 1` and targets `anchor +- 1`.
pub fn discretize_radial(path: &PathRecord, floor: i64) -> Result<DiscretizedWalk> {
    let u0 = path.start().log_r();
    if (u0 - (floor + 1) as f64).abs() > START_LEVEL_TOLERANCE {
        return Err(Error::validation(format!(
            "path starts at log r = {u0}, expected L + 1 = {}",
            floor + 1
        )));
    }
    let mut anchor = floor + 1;
    let mut levels = vec![anchor];
    let mut times = vec![0.0];
    for c in &path.crossings {
        if c.level == anchor + 1 || c.level == anchor - 1 {
            anchor = c.level;
            levels.push(anchor);
            times.push(c.time);
            if anchor == floor {
                break;
            }
        }
    }
    let terminated_by = if anchor == floor {
        WalkEnd::FloorHit
    } else {
        WalkEnd::PathEndedMidInterval
    };
    Ok(DiscretizedWalk {
        floor,
        levels,
        crossing_times: times,
        terminated_by,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FirstHit {
    Floor,
    Ceiling,
    Neither,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Upcrossings {
    pub first: FirstHit,
    /// Number of `k -> k+1` moves, the first arrival at `k+1` included.
    pub u_k: u64,
}

/// Which of `L` and `k + 1` the walk reaches first, and the `k -> k+1` count `U_k`.
pub fn hitting_and_upcrossings(walk: &DiscretizedWalk, k: i64) -> Result<Upcrossings> {
    if k <= walk.floor + 1 {
        return Err(Error::domain(format!("k = {k} must exceed L + 1 = {}", walk.floor + 1)));
    }
    let first = walk
        .levels
        .iter()
        .find_map(|&m| {
            if m == walk.floor {
                Some(FirstHit::Floor)
            } else if m == k + 1 {
                Some(FirstHit::Ceiling)
            } else {
                None
            }
        })
        .unwrap_or(FirstHit::Neither);
    let u_k = walk.levels.windows(2).filter(|w| w[0] == k && w[1] == k + 1).count() as u64;
    Ok(Upcrossings { first, u_k })
}

/// Time spent in `{r <= rho}`, from the trace or the accumulator configured for `rho`.
pub fn occupation_time(path: &PathRecord, rho: f64) -> Result<f64> {
    if !(rho > 0.0) {
        return Err(Error::domain(format!("rho = {rho} must be positive")));
    }
    if path.full_trace {
        let mut total = 0.0;
        for i in 1..path.positions.len() {
            let (r0, r1) = (path.positions[i - 1].r(), path.positions[i].r());
            let dt = path.times[i] - path.times[i - 1];
            total += martingale::occupation_increment(r0, r1, rho, dt);
        }
        return Ok(total);
    }
    path.occupation_radii
        .iter()
        .position(|&r| (r - rho).abs() <= 1e-12 * rho)
        .map(|i| path.occupation[i])
        .ok_or_else(|| Error::Precondition(format!("path has no trace and no accumulator for rho = {rho}")))
}

/// `theta_L ^ theta_{k+1}`, or `None` when the path ended before either.
pub fn exit_time(path: &PathRecord, floor: i64, k: i64) -> Option<f64> {
    path.crossings
        .iter()
        .find(|c| (c.level == floor && !c.upward) || (c.level == k + 1 && c.upward))
        .map(|c| c.time)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExitTimeCheck {
    pub mean_exit_time: EstimateWithCI,
    pub bound: f64,
    pub ok: bool,
    /// Paths that ended before leaving `(e^L, e^{k+1})`, excluded from the mean.
    pub censored: u64,
}

/// Checks `E[theta_L ^ theta_{k+1}] + 3 SE <= e^{2(k+1)} - e^{2(L+1)}`.
pub fn first_passage_time_bound_check(paths: &[PathRecord], floor: i64, k: i64) -> Result<ExitTimeCheck> {
    if k < floor + 1 {
        return Err(Error::domain(format!("k = {k} must be at least L + 1 = {}", floor + 1)));
    }
    let mut times = Vec::with_capacity(paths.len());
    let mut censored = 0;
    for p in paths {
        let u0 = p.start().log_r();
        if (u0 - (floor + 1) as f64).abs() > START_LEVEL_TOLERANCE {
            return Err(Error::validation(format!(
                "path starts at log r = {u0}, expected {}",
                floor + 1
            )));
        }
        match exit_time(p, floor, k) {
            Some(t) => times.push(t),
            None => censored += 1,
        }
    }
    let est = EstimateWithCI::from_samples(&times)
        .map_err(|_| Error::Estimation(format!("only {} completed exits out of {}", times.len(), paths.len())))?;
    let bound = (2.0 * (k + 1) as f64).exp() - (2.0 * (floor + 1) as f64).exp();
    Ok(ExitTimeCheck {
        ok: est.mean + 3.0 * est.std_error <= bound,
        mean_exit_time: est,
        bound,
        censored,
    })
}

/// Up and down departure counts per level.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct LevelDepartures {
    pub counts: BTreeMap<i64, (u64, u64)>,
}

impl LevelDepartures {
    pub fn add_walk(&mut self, walk: &DiscretizedWalk) {
        for w in walk.levels.windows(2) {
            let e = self.counts.entry(w[0]).or_insert((0, 0));
            if w[1] > w[0] {
                e.0 += 1;
            } else {
                e.1 += 1;
            }
        }
    }

    pub fn merge(&mut self, other: &LevelDepartures) {
        for (&m, &(u, d)) in &other.counts {
            let e = self.counts.entry(m).or_insert((0, 0));
            e.0 += u;
            e.1 += d;
        }
    }

    pub fn total(&self, m: i64) -> u64 {
        self.counts.get(&m).map_or(0, |(u, d)| u + d)
    }
}

/// Least-squares `(slope, intercept)` of `y` on `x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::Estimation("linear fit needs at least two paired points".into()));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Estimation("linear fit needs distinct x values".into()));
    }
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point3;
    use crate::martingale::StopReason;
    use rand::Rng;

    fn radial_path(log_rs: &[f64]) -> PathRecord {
        let times = (0..log_rs.len()).map(|i| i as f64).collect();
        let pos = log_rs.iter().map(|u| Point3::new(u.exp(), 0.0, 0.0)).collect();
        PathRecord::from_samples(times, pos, StopReason::TimeCap).unwrap()
    }

    #[test]
    fn discretize_hand_built_paths() {
        let l = 2;
        let p = radial_path(&[3.0, 3.5, 4.0, 3.5, 3.0, 2.5, 2.0]);
        let w = discretize_radial(&p, l).unwrap();
        assert_eq!(w.levels, vec![3, 4, 3, 2]);
        assert_eq!(w.terminated_by, WalkEnd::FloorHit);
        assert_eq!(w.crossing_times, vec![0.0, 2.0, 4.0, 6.0]);

        let p = radial_path(&[3.0, 3.4, 2.6, 3.9, 2.1, 3.0]);
        let w = discretize_radial(&p, l).unwrap();
        assert_eq!(w.levels, vec![3]);
        assert_eq!(w.terminated_by, WalkEnd::PathEndedMidInterval);

        assert!(discretize_radial(&radial_path(&[3.2, 3.0]), l).is_err());
    }

    #[test]
    fn upcrossing_examples() {
        let w = DiscretizedWalk::from_levels(0, vec![1, 0]).unwrap();
        assert_eq!(
            hitting_and_upcrossings(&w, 3).unwrap(),
            Upcrossings {
                first: FirstHit::Floor,
                u_k: 0
            }
        );
        let w = DiscretizedWalk::from_levels(0, vec![1, 2, 3, 4, 3, 4, 3, 2, 1, 0]).unwrap();
        assert_eq!(
            hitting_and_upcrossings(&w, 3).unwrap(),
            Upcrossings {
                first: FirstHit::Ceiling,
                u_k: 2
            }
        );
        let w = DiscretizedWalk::from_levels(0, vec![1, 2, 1, 2]).unwrap();
        assert_eq!(hitting_and_upcrossings(&w, 3).unwrap().first, FirstHit::Neither);
        assert!(hitting_and_upcrossings(&w, 1).is_err());
    }

    #[test]
    fn occupation_examples() {
        let p = radial_path(&[1.0, 1.5, 2.0, 1.2]);
        assert_eq!(occupation_time(&p, 1.0).unwrap(), 0.0);
        assert_eq!(occupation_time(&p, 1e3).unwrap(), 3.0);
        let rho = 1.5f64.exp();
        let t = occupation_time(&p, rho).unwrap();
        assert!(t > 1.0 && t < 2.5);
    }

    #[test]
    fn estimate_examples() {
        let c = mc_estimate(|_, _| Ok(3.5), 100, 0).unwrap();
        assert_eq!((c.mean, c.std_error), (3.5, 0.0));
        let b = mc_estimate(
            |_, rng| Ok(if rng.random::<f64>() < 0.2 { 1.0 } else { 0.0 }),
            100_000,
            5,
        )
        .unwrap();
        assert!(b.within(0.2, 3.0), "{b:?}");
        assert!(b.ci_low < b.mean && b.mean < b.ci_high);
        assert!(mc_estimate(|_, _| Ok(1.0), 1, 0).is_err());
        let err = mc_estimate(
            |i, _| {
                if i == 40 {
                    Err(Error::Estimation("x".into()))
                } else {
                    Ok(0.0)
                }
            },
            50,
            0,
        );
        assert!(matches!(err, Err(Error::Replication { index: 40, .. })));
    }

    #[test]
    fn linear_fit_recovers_line() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v - 1.0).collect();
        let (s, b) = linear_fit(&x, &y).unwrap();
        assert!((s - 2.0).abs() < 1e-14 && (b + 1.0).abs() < 1e-14);
    }
}
