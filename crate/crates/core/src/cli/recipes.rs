//! The five experiment recipes. Each resolves its part of the config in place, runs, and
//! returns a typed report with its pass/fail checks and CSV tables.

use std::f64::consts::PI;

use serde::Serialize;

use super::config::{self, ExperimentConfig, SimDefaults};
use crate::chain::{self, ChainSpec, LevelRow};
use crate::coupling::{self, CouplingSummary, DominanceReport};
use crate::envelope::{self, Envelope, LogRatioSum, ProfileKind};
use crate::error::{Error, Result};
use crate::geometry::{self, NormalStrategy, Point3};
use crate::martingale::{self, PathRecord, SimConfig, StopReason};
use crate::pathstats::{self, EstimateWithCI, ExitTimeCheck, FirstHit, LevelDepartures};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(name: &str, header: &[&str]) -> Self {
        Table {
            name: name.into(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

fn fmt_opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// Everything needed to re-run the simulation behind a report.
#[derive(Debug, Clone)]
pub struct SimSetup {
    pub strategy: NormalStrategy,
    pub start: Point3,
    pub sim: SimConfig,
}

pub trait Report: Serialize {
    fn checks(&self) -> Vec<Check>;
    fn tables(&self) -> Vec<Table>;
}

// ---- chain ----

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainReport {
    pub description: String,
    pub floor: i64,
    pub m_max: i64,
    pub levels: Vec<LevelRow>,
    pub parabolicity: chain::ParabolicityReport,
}

impl Report for ChainReport {
    fn checks(&self) -> Vec<Check> {
        Vec::new()
    }

    fn tables(&self) -> Vec<Table> {
        let mut t = Table::new(
            "levels",
            &[
                "m",
                "p",
                "ratio_product",
                "a_value",
                "hit_up_before_floor",
                "expected_upcrossings",
            ],
        );
        for r in &self.levels {
            t.push(vec![
                r.m.to_string(),
                r.p.to_string(),
                r.ratio_product.to_string(),
                r.a_value.to_string(),
                r.hit_up_before_floor.to_string(),
                r.expected_upcrossings.to_string(),
            ]);
        }
        vec![t]
    }
}

pub fn chain_report(cfg: &mut ExperimentConfig) -> Result<ChainReport> {
    let spec = config::resolve_chain(cfg)?;
    let s = cfg.chain.as_ref().unwrap();
    let (m_max, horizon, threshold) = (s.m_max.unwrap(), s.horizon.unwrap(), s.blowup_threshold.unwrap());
    Ok(ChainReport {
        description: spec.description.clone(),
        floor: spec.floor(),
        m_max,
        levels: spec.level_table(m_max)?,
        parabolicity: spec.is_parabolic(horizon, threshold)?,
    })
}

// ---- envelope ----

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeRow {
    pub m: i64,
    pub excess: f64,
    pub p_m: f64,
    pub p_m_closed_form: Option<f64>,
    pub borderline: f64,
    pub below_borderline: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeReport {
    pub kind: ProfileKind,
    pub c: f64,
    pub floor: i64,
    pub min_valid_floor: Option<i64>,
    pub condition_holds: bool,
    pub crossover: Option<u128>,
    pub rows: Vec<EnvelopeRow>,
    pub log_ratio_sum: Option<LogRatioSum>,
}

impl Report for EnvelopeReport {
    fn checks(&self) -> Vec<Check> {
        let mut out = vec![Check::new(
            "condition_holds",
            self.condition_holds,
            format!("floor {}", self.floor),
        )];
        let agree = self
            .rows
            .iter()
            .all(|r| r.p_m_closed_form.is_none_or(|q| (q - r.p_m).abs() <= 1e-12));
        out.push(Check::new(
            "closed_form_agreement",
            agree,
            "generic vs closed-form p_m to 1e-12",
        ));
        if let Some(s) = &self.log_ratio_sum {
            out.push(Check::new(
                "series_bound",
                s.bound_ok,
                format!("{} terms inside the Taylor radius", s.checked_terms),
            ));
        }
        out
    }

    fn tables(&self) -> Vec<Table> {
        let mut t = Table::new(
            "levels",
            &[
                "m",
                "excess",
                "p_m",
                "p_m_closed_form",
                "borderline",
                "below_borderline",
            ],
        );
        for r in &self.rows {
            t.push(vec![
                r.m.to_string(),
                r.excess.to_string(),
                r.p_m.to_string(),
                fmt_opt(r.p_m_closed_form),
                r.borderline.to_string(),
                r.below_borderline.to_string(),
            ]);
        }
        vec![t]
    }
}

pub fn envelope_report(cfg: &mut ExperimentConfig) -> Result<EnvelopeReport> {
    let env = config::resolve_envelope(cfg, ProfileKind::F1, 1.0)?;
    let s = cfg.envelope.as_ref().unwrap();
    let m_max = s.m_max.unwrap();
    let kind = env.kind();
    let closed = kind != ProfileKind::Custom;
    let mut rows = Vec::new();
    for m in env.floor() + 1..=m_max {
        let p = env.pm(m)?;
        let border = (m + 1) as f64 / (2 * m + 1) as f64;
        rows.push(EnvelopeRow {
            m,
            excess: env.excess(m)?,
            p_m: p,
            p_m_closed_form: if closed {
                Some(envelope::pm_closed_form(kind, env.c(), m)?)
            } else {
                None
            },
            borderline: border,
            below_borderline: p <= border,
        });
    }
    Ok(EnvelopeReport {
        kind,
        c: env.c(),
        floor: env.floor(),
        min_valid_floor: if closed {
            Some(envelope::min_valid_floor(kind, env.c(), s.search_bound.unwrap())?)
        } else {
            None
        },
        condition_holds: env.condition_holds(),
        crossover: if closed {
            envelope::borderline_crossover(kind, env.c())?
        } else {
            None
        },
        rows,
        log_ratio_sum: if kind == ProfileKind::F2 && m_max > env.floor() {
            Some(envelope::log_ratio_sum_bound(env.c(), (env.floor() + 1).max(2), m_max)?)
        } else {
            None
        },
    })
}

// ---- shared simulation plumbing ----

fn walks(paths: &[PathRecord], floor: i64) -> Result<Vec<pathstats::DiscretizedWalk>> {
    paths.iter().map(|p| pathstats::discretize_radial(p, floor)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HitCheck {
    pub k: i64,
    pub empirical: EstimateWithCI,
    pub chain_ceiling: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct StopCounts {
    pub inner_barrier: u64,
    pub time_cap: u64,
    pub outer_barrier: u64,
    pub step_cap: u64,
}

impl StopCounts {
    fn of(paths: &[PathRecord]) -> Self {
        let mut s = StopCounts::default();
        for p in paths {
            match p.stop_reason {
                StopReason::InnerBarrier => s.inner_barrier += 1,
                StopReason::TimeCap => s.time_cap += 1,
                StopReason::OuterBarrier => s.outer_barrier += 1,
                StopReason::StepCap => s.step_cap += 1,
            }
        }
        s
    }
}

fn simulate(setup: &SimSetup, paths: u64) -> Result<Vec<PathRecord>> {
    martingale::run_replications(&setup.strategy, setup.start, &setup.sim, paths)
}

// ---- parabolicity ----

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParabolicityRun {
    pub strategy: String,
    pub floor: i64,
    pub paths: u64,
    pub stops: StopCounts,
    pub stopped_fraction: EstimateWithCI,
    pub stopped_fraction_target: f64,
    pub mean_steps: f64,
    pub hit_checks: Vec<HitCheck>,
    pub dominance: DominanceReport,
}

impl Report for ParabolicityRun {
    fn checks(&self) -> Vec<Check> {
        let mut out = vec![Check::new(
            "stopped_fraction",
            self.stopped_fraction.mean >= self.stopped_fraction_target,
            format!(
                "{:.5} vs target {}",
                self.stopped_fraction.mean, self.stopped_fraction_target
            ),
        )];
        for h in &self.hit_checks {
            out.push(Check::new(
                format!("hit_before_floor_k{}", h.k),
                h.ok,
                format!("{:.5} + 3 SE vs 1/A_k = {:.5}", h.empirical.mean, h.chain_ceiling),
            ));
        }
        out.push(Check::new(
            "dominance",
            self.dominance.all_pass,
            format!("{} levels tested", self.dominance.levels.len()),
        ));
        out
    }

    fn tables(&self) -> Vec<Table> {
        let mut hits = Table::new("hitting", &["k", "empirical", "std_error", "chain_ceiling", "ok"]);
        for h in &self.hit_checks {
            hits.push(vec![
                h.k.to_string(),
                h.empirical.mean.to_string(),
                h.empirical.std_error.to_string(),
                h.chain_ceiling.to_string(),
                h.ok.to_string(),
            ]);
        }
        vec![hits, dominance_table("dominance", &self.dominance)]
    }
}

fn dominance_table(name: &str, d: &DominanceReport) -> Table {
    let mut t = Table::new(
        name,
        &["m", "departures", "ups", "frequency", "p_m", "threshold", "pass"],
    );
    for l in &d.levels {
        t.push(vec![
            l.m.to_string(),
            l.departures.to_string(),
            l.ups.to_string(),
            l.frequency.to_string(),
            l.p_m.to_string(),
            l.threshold.to_string(),
            l.pass.to_string(),
        ]);
    }
    t
}

pub fn parabolicity_setup(cfg: &mut ExperimentConfig) -> Result<(SimSetup, u64, Envelope)> {
    let env = config::resolve_envelope(cfg, ProfileKind::F2, 1.0)?;
    let floor = env.floor();
    let strategy = config::resolve_strategy(cfg)?;
    let start = config::start_point(&strategy, ((floor + 1) as f64).exp())?;
    let (sim, paths) = config::resolve_sim(
        cfg,
        floor,
        SimDefaults {
            paths: 10_000,
            eta: 0.01,
            max_time: (2.0 * (floor + 300) as f64).exp(),
            outer_level: None,
            stop_at_outer: false,
        },
    )?;
    Ok((SimSetup { strategy, start, sim }, paths, env))
}

pub fn parabolicity(cfg: &mut ExperimentConfig) -> Result<(ParabolicityRun, SimSetup)> {
    let (setup, n, env) = parabolicity_setup(cfg)?;
    let floor = env.floor();
    let stats = config::resolve_pathstats(cfg, (floor + 2..=floor + 5).collect(), Vec::new());
    let spec = ChainSpec::from_envelope(env)?;
    let paths = simulate(&setup, n)?;
    let walks = walks(&paths, floor)?;
    let stops = StopCounts::of(&paths);

    let mut hit_checks = Vec::new();
    for &k in stats.k_levels.as_ref().unwrap() {
        let mut hits = 0;
        for w in &walks {
            if pathstats::hitting_and_upcrossings(w, k)?.first == FirstHit::Ceiling {
                hits += 1;
            }
        }
        let e = EstimateWithCI::from_counts(hits, n)?;
        let ceiling = spec.hit_up_before_floor(k)?;
        hit_checks.push(HitCheck {
            k,
            ok: e.mean <= ceiling + 3.0 * e.std_error,
            empirical: e,
            chain_ceiling: ceiling,
        });
    }
    let mut deps = LevelDepartures::default();
    for w in &walks {
        deps.add_walk(w);
    }
    let dominance = coupling::statistical_dominance_test(&deps, &spec, stats.min_departures.unwrap(), 3.0)?;
    let run = ParabolicityRun {
        strategy: setup.strategy.name(),
        floor,
        paths: n,
        stops,
        stopped_fraction: EstimateWithCI::from_counts(stops.inner_barrier, n)?,
        stopped_fraction_target: stats.stopped_fraction_target.unwrap(),
        mean_steps: paths.iter().map(|p| p.steps as f64).sum::<f64>() / n as f64,
        hit_checks,
        dominance,
    };
    Ok((run, setup))
}

// ---- area growth ----

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OccupationRow {
    pub level: i64,
    pub rho: f64,
    pub occupation: EstimateWithCI,
    pub analytic_area: Option<f64>,
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundRow {
    pub k: i64,
    pub measured: EstimateWithCI,
    pub hit_prob: f64,
    pub expected_upcrossings: f64,
    pub bound: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExitRow {
    pub k: i64,
    pub check: ExitTimeCheck,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AreaGrowthRun {
    pub strategy: String,
    pub floor: i64,
    pub paths: u64,
    pub stops: StopCounts,
    pub occupation: Vec<OccupationRow>,
    pub slope: f64,
    pub slope_tolerance: f64,
    pub ratio_spread: Option<f64>,
    pub ratio_spread_tolerance: f64,
    pub exit_checks: Vec<ExitRow>,
    pub bounds: Vec<BoundRow>,
    /// `max_k bound_k / e^{2k}`, the constant for `rho = e^k`.
    pub level_constant: f64,
    /// `e^2` times the level constant, valid for every `rho >= e^{L+2}`.
    pub general_rho_constant: f64,
    pub catenoid_area_ratio_at_100: Option<f64>,
}

impl Report for AreaGrowthRun {
    fn checks(&self) -> Vec<Check> {
        let mut out = vec![Check::new(
            "log_log_slope",
            (self.slope - 2.0).abs() <= self.slope_tolerance,
            format!("{:.4} vs 2 +- {}", self.slope, self.slope_tolerance),
        )];
        if let Some(s) = self.ratio_spread {
            out.push(Check::new(
                "occupation_area_ratio_spread",
                s <= self.ratio_spread_tolerance,
                format!("{:.4} vs {}", s, self.ratio_spread_tolerance),
            ));
        }
        for e in &self.exit_checks {
            out.push(Check::new(
                format!("exit_time_k{}", e.k),
                e.check.ok,
                format!("{:.4e} + 3 SE vs {:.4e}", e.check.mean_exit_time.mean, e.check.bound),
            ));
        }
        for b in &self.bounds {
            out.push(Check::new(
                format!("occupation_bound_k{}", b.k),
                b.ok,
                format!("{:.4e} vs {:.4e}", b.measured.mean, b.bound),
            ));
        }
        out
    }

    fn tables(&self) -> Vec<Table> {
        let mut occ = Table::new(
            "occupation",
            &["level", "rho", "mean", "std_error", "analytic_area", "ratio"],
        );
        for r in &self.occupation {
            occ.push(vec![
                r.level.to_string(),
                r.rho.to_string(),
                r.occupation.mean.to_string(),
                r.occupation.std_error.to_string(),
                fmt_opt(r.analytic_area),
                fmt_opt(r.ratio),
            ]);
        }
        let mut exit = Table::new("exit_times", &["k", "mean", "std_error", "bound", "censored", "ok"]);
        for e in &self.exit_checks {
            exit.push(vec![
                e.k.to_string(),
                e.check.mean_exit_time.mean.to_string(),
                e.check.mean_exit_time.std_error.to_string(),
                e.check.bound.to_string(),
                e.check.censored.to_string(),
                e.check.ok.to_string(),
            ]);
        }
        let mut bounds = Table::new(
            "occupation_bounds",
            &[
                "k",
                "measured",
                "std_error",
                "hit_prob",
                "expected_upcrossings",
                "bound",
                "ok",
            ],
        );
        for b in &self.bounds {
            bounds.push(vec![
                b.k.to_string(),
                b.measured.mean.to_string(),
                b.measured.std_error.to_string(),
                b.hit_prob.to_string(),
                b.expected_upcrossings.to_string(),
                b.bound.to_string(),
                b.ok.to_string(),
            ]);
        }
        vec![occ, exit, bounds]
    }
}

/// Resolved inputs of the area-growth recipe.
#[derive(Debug, Clone)]
pub struct AreaSetup {
    pub sim: SimSetup,
    pub paths: u64,
    pub envelope: Envelope,
    pub k_levels: Vec<i64>,
    pub rho_levels: Vec<i64>,
}

pub fn area_growth_setup(cfg: &mut ExperimentConfig) -> Result<AreaSetup> {
    let env = config::resolve_envelope(cfg, ProfileKind::F2, 0.5)?;
    let floor = env.floor();
    let strategy = config::resolve_strategy(cfg)?;
    let start = config::start_point(&strategy, ((floor + 1) as f64).exp())?;
    let (mut sim, paths) = config::resolve_sim(
        cfg,
        floor,
        SimDefaults {
            paths: 1000,
            eta: 0.01,
            max_time: (2.0 * (floor + 300) as f64).exp(),
            outer_level: Some(floor + 100),
            stop_at_outer: true,
        },
    )?;
    let stats = config::resolve_pathstats(
        cfg,
        (floor + 2..=floor + 5).collect(),
        (floor + 2..=floor + 4).collect(),
    );
    let ks = stats.k_levels.clone().unwrap();
    let rhos = stats.rho_levels.clone().unwrap();
    if rhos.len() < 2 {
        return Err(Error::Config("the occupation grid needs at least two radii".into()));
    }
    if let Some(k) = ks.iter().find(|&&k| k <= floor + 1) {
        return Err(Error::Config(format!("k = {k} must exceed L + 1 = {}", floor + 1)));
    }
    let mut levels: Vec<i64> = rhos.iter().chain(&ks).copied().collect();
    levels.sort_unstable();
    levels.dedup();
    sim.occupation_radii = levels.iter().map(|&j| (j as f64).exp()).collect();
    Ok(AreaSetup {
        sim: SimSetup { strategy, start, sim },
        paths,
        envelope: env,
        k_levels: ks,
        rho_levels: rhos,
    })
}

pub fn area_growth(cfg: &mut ExperimentConfig) -> Result<(AreaGrowthRun, SimSetup)> {
    let AreaSetup {
        sim: setup,
        paths: n,
        envelope: env,
        k_levels: ks,
        rho_levels: rhos,
    } = area_growth_setup(cfg)?;
    let floor = env.floor();
    let stats = cfg.pathstats.clone().unwrap();
    let spec = ChainSpec::from_envelope(env)?;
    let paths = simulate(&setup, n)?;
    let stops = StopCounts::of(&paths);
    let catenoid_a = match setup.strategy {
        NormalStrategy::Catenoid { a, .. } => Some(a),
        _ => None,
    };
    let occupation_of = |level: i64| -> Result<EstimateWithCI> {
        let rho = (level as f64).exp();
        let xs = paths
            .iter()
            .map(|p| pathstats::occupation_time(p, rho))
            .collect::<Result<Vec<_>>>()?;
        EstimateWithCI::from_samples(&xs)
    };

    let mut occupation = Vec::new();
    for &j in &rhos {
        let rho = (j as f64).exp();
        let est = occupation_of(j)?;
        let area = match catenoid_a {
            Some(a) if rho >= a => Some(geometry::catenoid_area(rho, a)?),
            _ => None,
        };
        occupation.push(OccupationRow {
            level: j,
            rho,
            ratio: area.map(|a| est.mean / a),
            analytic_area: area,
            occupation: est,
        });
    }
    let xs: Vec<f64> = occupation.iter().map(|r| r.rho.ln()).collect();
    let ys: Vec<f64> = occupation.iter().map(|r| r.occupation.mean.ln()).collect();
    let (slope, _) = pathstats::linear_fit(&xs, &ys)?;
    let ratios: Option<Vec<f64>> = occupation.iter().map(|r| r.ratio).collect();
    let ratio_spread = ratios.map(|v| {
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        let (lo, hi) = v
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
        (hi - lo) / mean
    });

    let mut exit_checks = Vec::new();
    let mut bounds = Vec::new();
    let mut level_constant: f64 = 0.0;
    for &k in &ks {
        exit_checks.push(ExitRow {
            k,
            check: pathstats::first_passage_time_bound_check(&paths, floor, k)?,
        });
        let hit = spec.hit_up_before_floor(k)?;
        let up = spec.expected_upcrossings(k)?;
        let bound = envelope::occupation_bound(floor, k, hit, up)?;
        let measured = occupation_of(k)?;
        level_constant = level_constant.max(bound / (2.0 * k as f64).exp());
        bounds.push(BoundRow {
            k,
            ok: measured.mean <= bound,
            measured,
            hit_prob: hit,
            expected_upcrossings: up,
            bound,
        });
    }
    let run = AreaGrowthRun {
        strategy: setup.strategy.name(),
        floor,
        paths: n,
        stops,
        occupation,
        slope,
        slope_tolerance: stats.slope_tolerance.unwrap(),
        ratio_spread,
        ratio_spread_tolerance: stats.ratio_spread_tolerance.unwrap(),
        exit_checks,
        bounds,
        level_constant,
        general_rho_constant: level_constant * std::f64::consts::E.powi(2),
        catenoid_area_ratio_at_100: catenoid_a
            .filter(|&a| a <= 100.0)
            .map(|a| geometry::catenoid_area(100.0, a).map(|x| x / (PI * 1e4)))
            .transpose()?,
    };
    Ok((run, setup))
}

// ---- couple ----

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoupleRun {
    pub runs: u64,
    pub max_steps: usize,
    pub domination_rate: f64,
    pub identical_prefix_fraction: f64,
    /// Every rule has `phi = p_m` on its levels.
    pub boundary_config: bool,
    pub y_marginals: DominanceReport,
    pub x_dominance: DominanceReport,
    #[serde(skip)]
    pub summary: CouplingSummary,
}

impl Report for CoupleRun {
    fn checks(&self) -> Vec<Check> {
        let mut out = vec![
            Check::new(
                "domination_rate",
                self.domination_rate == 1.0,
                format!("{}", self.domination_rate),
            ),
            Check::new(
                "y_marginals",
                self.y_marginals.all_pass,
                format!("{} levels with enough visits", self.y_marginals.levels.len()),
            ),
        ];
        if self.boundary_config {
            out.push(Check::new(
                "identical_prefix",
                self.identical_prefix_fraction == 1.0,
                "phi = p_m: Y copies X until X ends",
            ));
        }
        out
    }

    fn tables(&self) -> Vec<Table> {
        vec![
            dominance_table("y_marginals", &self.y_marginals),
            dominance_table("x_dominance", &self.x_dominance),
        ]
    }
}

pub fn couple(cfg: &mut ExperimentConfig) -> Result<CoupleRun> {
    let setup = config::resolve_coupling(cfg)?;
    let seed = cfg.seed();
    let summary = coupling::run_coupled(&setup.table, &setup.spec, setup.runs, setup.max_steps, seed)?;
    let boundary_config = setup.table.rules.iter().all(|r| {
        r.step_from.is_none()
            && r.step_to.is_none()
            && r.end_prob == 0.0
            && (r.level_from..=r.level_to.unwrap_or(r.level_from + 10_000))
                .all(|m| setup.spec.up_prob(m).is_ok_and(|p| p == r.phi))
    });
    Ok(CoupleRun {
        runs: setup.runs,
        max_steps: setup.max_steps,
        domination_rate: summary.domination_rate(),
        identical_prefix_fraction: summary.identical_prefix_runs as f64 / setup.runs as f64,
        boundary_config,
        y_marginals: coupling::marginal_check(&summary.y_departures, &setup.spec, setup.min_visits, 3.0)?,
        x_dominance: coupling::statistical_dominance_test(&summary.x_departures, &setup.spec, setup.min_visits, 3.0)?,
        summary,
    })
}
