//! Euler–Maruyama simulation of `dZ = P(n_t) dW`, stopped at radial barriers.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{self, NormalStrategy, Point3, UnitVector3};
use crate::pathstats::EstimateWithCI;
use crate::rng::{self, SimRng};

/// Relative slack on the time cap so that exact multiples of `dt` are reached.
const TIME_CAP_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepSize {
    Fixed(f64),
    /// `dt = eta * r^2` at the current point.
    ScaleCovariant {
        eta: f64,
    },
}

impl StepSize {
    fn dt_at(&self, r: f64) -> f64 {
        match *self {
            StepSize::Fixed(dt) => dt,
            StepSize::ScaleCovariant { eta } => eta * r * r,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Retraction {
    None,
    ProjectToSurface,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceMode {
    /// Keep every sample.
    Full,
    /// Keep the first and last sample only.
    Endpoints,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub step: StepSize,
    /// Stop when `log r <= inner_level`.
    pub inner_level: i64,
    /// Record the first time `log r >= outer_level`.
    pub outer_level: Option<i64>,
    /// Also stop there.
    pub stop_at_outer: bool,
    pub max_time: f64,
    pub max_steps: u64,
    pub retraction: Retraction,
    /// Resolve barrier and level crossings by linear interpolation of `log r`.
    pub interpolate_crossings: bool,
    pub trace: TraceMode,
    /// Radii whose occupation times are accumulated along the way.
    pub occupation_radii: Vec<f64>,
    pub master_seed: u64,
}

impl SimConfig {
    /// Defaults scaled to the inner radius: `dt = 1e-4 e^{2L}`, `max_time = e^{2(L+4)}`.
    pub fn new(inner_level: i64) -> Self {
        let scale = (2.0 * inner_level as f64).exp();
        SimConfig {
            step: StepSize::Fixed(1e-4 * scale),
            inner_level,
            outer_level: None,
            stop_at_outer: false,
            max_time: (8.0f64).exp() * scale,
            max_steps: 100_000_000,
            retraction: Retraction::ProjectToSurface,
            interpolate_crossings: true,
            trace: TraceMode::Full,
            occupation_radii: Vec::new(),
            master_seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.step {
            StepSize::Fixed(dt) if !(dt > 0.0 && dt.is_finite()) => {
                return Err(Error::Config(format!("dt = {dt} must be positive")))
            }
            StepSize::ScaleCovariant { eta } if !(eta > 0.0 && eta.is_finite()) => {
                return Err(Error::Config(format!("eta = {eta} must be positive")))
            }
            _ => {}
        }
        if !(self.max_time > 0.0) {
            return Err(Error::Config(format!("max_time = {} must be positive", self.max_time)));
        }
        if self.max_steps == 0 {
            return Err(Error::Config("max_steps must be positive".into()));
        }
        if let Some(k) = self.outer_level {
            if k <= self.inner_level {
                return Err(Error::Config(format!(
                    "outer level {k} must exceed inner level {}",
                    self.inner_level
                )));
            }
        }
        if let Some(r) = self.occupation_radii.iter().find(|r| !(**r > 0.0)) {
            return Err(Error::Config(format!("occupation radius {r} must be positive")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    InnerBarrier,
    TimeCap,
    OuterBarrier,
    StepCap,
}

/// Passage of `log r` through an integer level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevelCrossing {
    pub time: f64,
    pub level: i64,
    pub upward: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathRecord {
    pub replication: u64,
    pub times: Vec<f64>,
    pub positions: Vec<Point3>,
    pub stop_reason: StopReason,
    pub steps: u64,
    pub duration: f64,
    pub integral_alpha: f64,
    pub integral_beta: f64,
    pub integral_gamma: f64,
    /// Integer-level crossings of `log r` in time order.
    pub crossings: Vec<LevelCrossing>,
    pub outer_hit_time: Option<f64>,
    /// Occupation times of `{r <= rho}` for the configured radii.
    pub occupation: Vec<f64>,
    pub occupation_radii: Vec<f64>,
    pub max_log_r: f64,
    pub max_surface_residual: f64,
    /// Whether `positions` holds every sample.
    pub full_trace: bool,
}

impl PathRecord {
    pub fn start(&self) -> Point3 {
        self.positions[0]
    }

    pub fn end(&self) -> Point3 {
        self.positions[self.positions.len() - 1]
    }
}

/// Appends the integer levels crossed by `log r` moving from `u0` to `u1` during
/// `[t, t + dt]`, up to the kept fraction `keep` of the step.
///
/// Upward moves cross `u0 < j <= u1`, downward moves `u1 <= j < u0`; landing exactly on a
/// level counts as crossing it.
fn push_level_crossings(out: &mut Vec<LevelCrossing>, u0: f64, u1: f64, t: f64, dt: f64, keep: f64, interpolate: bool) {
    if u1 == u0 {
        return;
    }
    let upward = u1 > u0;
    let (first, last, stride) = if upward {
        (u0.floor() as i64 + 1, u1.floor() as i64, 1)
    } else {
        (u0.ceil() as i64 - 1, u1.ceil() as i64, -1)
    };
    let mut j = first;
    while (upward && j <= last) || (!upward && j >= last) {
        let w = if interpolate {
            ((j as f64 - u0) / (u1 - u0)).clamp(0.0, 1.0)
        } else {
            1.0
        };
        if w > keep {
            break;
        }
        out.push(LevelCrossing {
            time: t + w * dt,
            level: j,
            upward,
        });
        j += stride;
    }
}

impl PathRecord {
    /// Wraps an externally produced trace; crossings are derived from the samples,
    /// drift integrals are left at zero.
    pub fn from_samples(times: Vec<f64>, positions: Vec<Point3>, stop_reason: StopReason) -> Result<Self> {
        if times.is_empty() || times.len() != positions.len() {
            return Err(Error::validation("trace needs matching, non-empty times and positions"));
        }
        if times.windows(2).any(|w| !(w[1] >= w[0])) {
            return Err(Error::validation("trace times must be non-decreasing"));
        }
        if let Some(p) = positions.iter().find(|p| !(p.r() > 0.0)) {
            return Err(Error::Singularity(format!("trace point {p:?} has r = 0")));
        }
        let mut crossings = Vec::new();
        let mut max_log_r = positions[0].log_r();
        for i in 1..times.len() {
            let (u0, u1) = (positions[i - 1].log_r(), positions[i].log_r());
            push_level_crossings(&mut crossings, u0, u1, times[i - 1], times[i] - times[i - 1], 1.0, true);
            max_log_r = max_log_r.max(u1);
        }
        let n = times.len();
        Ok(PathRecord {
            replication: 0,
            duration: times[n - 1] - times[0],
            steps: (n - 1) as u64,
            times,
            positions,
            stop_reason,
            integral_alpha: 0.0,
            integral_beta: 0.0,
            integral_gamma: 0.0,
            crossings,
            outer_hit_time: None,
            occupation: Vec::new(),
            occupation_radii: Vec::new(),
            max_log_r,
            max_surface_residual: 0.0,
            full_trace: true,
        })
    }
}

/// `p + sqrt(dt) P(n) g`.
pub fn euler_step(p: &Point3, n: &UnitVector3, dt: f64, gauss: [f64; 3]) -> Point3 {
    let s = dt.sqrt();
    let dot = n.n1() * gauss[0] + n.n2() * gauss[1] + n.n3() * gauss[2];
    Point3::new(
        p.x1 + s * (gauss[0] - n.n1() * dot),
        p.x2 + s * (gauss[1] - n.n2() * dot),
        p.x3 + s * (gauss[2] - n.n3() * dot),
    )
}

/// Time in `{r <= rho}` during a step of length `dt` from radius `r0` to `r1`, with `r`
/// linear in time.
pub(crate) fn occupation_increment(r0: f64, r1: f64, rho: f64, dt: f64) -> f64 {
    match (r0 <= rho, r1 <= rho) {
        (true, true) => dt,
        (false, false) => 0.0,
        (true, false) => dt * (rho - r0) / (r1 - r0),
        (false, true) => dt * (rho - r1) / (r0 - r1),
    }
}

/// Simulates replication `replication` under `cfg.master_seed`.
pub fn simulate_path(
    strategy: &NormalStrategy,
    start: Point3,
    cfg: &SimConfig,
    replication: u64,
) -> Result<PathRecord> {
    let mut rng = rng::replication_rng(cfg.master_seed, replication);
    simulate_with_rng(strategy, start, cfg, replication, &mut rng)
}

fn simulate_with_rng(
    strategy: &NormalStrategy,
    start: Point3,
    cfg: &SimConfig,
    replication: u64,
    rng: &mut SimRng,
) -> Result<PathRecord> {
    cfg.validate()?;
    let inner = cfg.inner_level as f64;
    let u_start = start.log_r();
    if !(u_start >= inner) {
        return Err(Error::domain(format!(
            "start log r = {u_start} below the inner level {}",
            cfg.inner_level
        )));
    }
    let start_res = strategy.surface_residual(&start);
    if strategy.has_surface() && start_res > geometry::DEFAULT_SURFACE_TOLERANCE * start.r().max(1.0) {
        return Err(Error::validation(format!(
            "start point is {start_res:e} away from the surface"
        )));
    }

    let mut rec = PathRecord {
        replication,
        times: vec![0.0],
        positions: vec![start],
        stop_reason: StopReason::TimeCap,
        steps: 0,
        duration: 0.0,
        integral_alpha: 0.0,
        integral_beta: 0.0,
        integral_gamma: 0.0,
        crossings: Vec::new(),
        outer_hit_time: None,
        occupation: vec![0.0; cfg.occupation_radii.len()],
        occupation_radii: cfg.occupation_radii.clone(),
        max_log_r: u_start,
        max_surface_residual: start_res,
        full_trace: cfg.trace == TraceMode::Full,
    };
    if u_start <= inner {
        rec.stop_reason = StopReason::InnerBarrier;
        return Ok(rec);
    }
    if let Some(k) = cfg.outer_level {
        if u_start >= k as f64 {
            rec.outer_hit_time = Some(0.0);
            if cfg.stop_at_outer {
                rec.stop_reason = StopReason::OuterBarrier;
                return Ok(rec);
            }
        }
    }

    let full = cfg.trace == TraceMode::Full;
    let mut p = start;
    let mut u0 = u_start;
    let mut t = 0.0;
    loop {
        if rec.steps >= cfg.max_steps {
            rec.stop_reason = StopReason::StepCap;
            break;
        }
        let r0 = p.r();
        let dt = cfg.step.dt_at(r0);
        if t + dt > cfg.max_time * (1.0 + TIME_CAP_SLACK) {
            rec.stop_reason = StopReason::TimeCap;
            break;
        }
        let step_index = rec.steps;
        let sim_err = |e: Error| Error::Simulation {
            step: step_index,
            message: e.to_string(),
        };
        let n = strategy.normal_at(&p).map_err(sim_err)?;
        let alpha = geometry::drift_r2(&n);
        let beta = geometry::drift_log_r(&p, &n).map_err(sim_err)?;
        let gamma = geometry::drift_x3_sq(&n);

        let g: [f64; 3] = [
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        ];
        let mut q = euler_step(&p, &n, dt, g);
        if cfg.retraction == Retraction::ProjectToSurface && strategy.has_surface() {
            q = strategy.retract(&q).map_err(sim_err)?;
        }
        let r1 = q.r();
        if !(r1 > 0.0 && r1.is_finite()) {
            return Err(Error::Simulation {
                step: step_index,
                message: format!("step reached r = {r1}"),
            });
        }
        let u1 = r1.ln();
        rec.steps += 1;

        // kept fraction of the step, below one when a stopping barrier is crossed
        let frac_at = |level: f64| {
            if cfg.interpolate_crossings && u1 != u0 {
                ((level - u0) / (u1 - u0)).clamp(0.0, 1.0)
            } else {
                1.0
            }
        };
        let mut keep = 1.0;
        let mut reason = None;
        if u1 <= inner {
            keep = frac_at(inner);
            reason = Some(StopReason::InnerBarrier);
        }
        if let Some(k) = cfg.outer_level {
            let kf = k as f64;
            if rec.outer_hit_time.is_none() && u1 >= kf {
                let w = frac_at(kf);
                rec.outer_hit_time = Some(t + w * dt);
                if cfg.stop_at_outer {
                    keep = w;
                    reason = Some(StopReason::OuterBarrier);
                }
            }
        }

        push_level_crossings(&mut rec.crossings, u0, u1, t, dt, keep, cfg.interpolate_crossings);

        let dt_eff = keep * dt;
        let q_eff = if keep < 1.0 {
            Point3::new(
                p.x1 + keep * (q.x1 - p.x1),
                p.x2 + keep * (q.x2 - p.x2),
                p.x3 + keep * (q.x3 - p.x3),
            )
        } else {
            q
        };
        let r_eff = r0 + keep * (r1 - r0);
        for (acc, &rho) in rec.occupation.iter_mut().zip(&cfg.occupation_radii) {
            // occupation fraction within the kept piece
            *acc += occupation_increment(r0, r_eff, rho, dt_eff);
        }
        rec.integral_alpha += alpha * dt_eff;
        rec.integral_beta += beta * dt_eff;
        rec.integral_gamma += gamma * dt_eff;
        t += dt_eff;
        let u_eff = if keep < 1.0 { q_eff.log_r() } else { u1 };
        rec.max_log_r = rec.max_log_r.max(u_eff);
        rec.max_surface_residual = rec.max_surface_residual.max(strategy.surface_residual(&q));
        if full {
            rec.times.push(t);
            rec.positions.push(q_eff);
        }
        p = q_eff;
        u0 = u_eff;
        if let Some(r) = reason {
            rec.stop_reason = r;
            break;
        }
    }
    rec.duration = t;
    if !full && rec.positions.len() == 1 && rec.steps > 0 {
        rec.times.push(t);
        rec.positions.push(p);
    }
    Ok(rec)
}

/// Runs replications `0..n` in parallel; the output is identical to a serial loop.
pub fn run_replications(strategy: &NormalStrategy, start: Point3, cfg: &SimConfig, n: u64) -> Result<Vec<PathRecord>> {
    cfg.validate()?;
    rng::run_indexed(n, cfg.master_seed, |i, rng| {
        simulate_with_rng(strategy, start, cfg, i, rng)
    })
}

/// Per-path residuals of the three drift identities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DriftResiduals {
    /// `r^2(end) - r^2(start) - int alpha`
    pub r2: f64,
    /// `x3^2(end) - x3^2(start) - int gamma`
    pub x3_sq: f64,
    /// `log r(end) - log r(start) - int beta`
    pub log_r: f64,
}

pub fn path_residuals(path: &PathRecord) -> DriftResiduals {
    let (a, b) = (path.start(), path.end());
    DriftResiduals {
        r2: b.r() * b.r() - a.r() * a.r() - path.integral_alpha,
        x3_sq: b.x3 * b.x3 - a.x3 * a.x3 - path.integral_gamma,
        log_r: b.log_r() - a.log_r() - path.integral_beta,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualStats {
    pub r2: EstimateWithCI,
    pub x3_sq: EstimateWithCI,
    pub log_r: EstimateWithCI,
}

impl ResidualStats {
    /// Every mean within `z` standard errors of zero.
    pub fn all_within(&self, z: f64) -> bool {
        [self.r2, self.x3_sq, self.log_r]
            .iter()
            .all(|e| e.mean.abs() <= z * e.std_error)
    }
}

/// Residual means across replications.
pub fn drift_residual_check(paths: &[PathRecord]) -> Result<ResidualStats> {
    let res: Vec<DriftResiduals> = paths.iter().map(path_residuals).collect();
    Ok(ResidualStats {
        r2: EstimateWithCI::from_samples(&res.iter().map(|d| d.r2).collect::<Vec<_>>())?,
        x3_sq: EstimateWithCI::from_samples(&res.iter().map(|d| d.x3_sq).collect::<Vec<_>>())?,
        log_r: EstimateWithCI::from_samples(&res.iter().map(|d| d.log_r).collect::<Vec<_>>())?,
    })
}
