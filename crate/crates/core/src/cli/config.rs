//! Experiment config: one TOML file with a section per module. Every field is optional in
//! the file; each subcommand fills in its defaults and the fully resolved config is what
//! gets recorded next to the results.

use serde::{Deserialize, Serialize};

use crate::chain::{self, ChainSpec};
use crate::coupling::{PhiRule, PhiTable};
use crate::envelope::{self, Envelope, LogTable, ProfileKind};
use crate::error::{Error, Result};
use crate::geometry::{self, NormalStrategy, Point3};
use crate::martingale::{Retraction, SimConfig, StepSize, TraceMode};

pub const DEFAULT_SEED: u64 = 20_240_601;
const FLOOR_SEARCH_BOUND: i64 = 10_000;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chain: Option<ChainSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub envelope: Option<EnvelopeSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometry: Option<GeometrySection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub martingale: Option<MartingaleSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pathstats: Option<PathstatsSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling: Option<CouplingSection>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ChainKind {
    Constant,
    #[serde(alias = "harmonic_borderline")]
    Harmonic,
    EnvelopeF1,
    EnvelopeF2,
    Table,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<ChainKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub floor: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_max: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blowup_threshold: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvelopeSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<ProfileKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub floor: Option<i64>,
    /// `[r, f(r)]` nodes of a custom profile.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search_bound: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_max: Option<i64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum StrategyKind {
    HorizontalPlane,
    VerticalPlane,
    Catenoid,
    Helicoid,
    RadialControl,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategy: Option<StrategyKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pitch: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub height: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offset: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MartingaleSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub paths: Option<u64>,
    /// Fixed time step.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    /// Scale-covariant step `dt = eta r^2`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_time: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_steps: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub retraction: Option<Retraction>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interpolate: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outer_level: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop_at_outer: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathstatsSection {
    /// Levels `k` for hitting, exit-time and occupation-bound checks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_levels: Option<Vec<i64>>,
    /// `log rho` grid for occupation times.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho_levels: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_departures: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stopped_fraction_target: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slope_tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio_spread_tolerance: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub runs: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_visits: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rules: Option<Vec<PhiRule>>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        if self.seed.is_some_and(|s| s > i64::MAX as u64) {
            return Err(Error::Config("seeds above 2^63 - 1 cannot be stored in TOML".into()));
        }
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }
}

fn config_err(e: Error) -> Error {
    match e {
        Error::Config(_) => e,
        other => Error::Config(other.to_string()),
    }
}

/// Chain and analytics ranges for `chain`.
pub fn resolve_chain(cfg: &mut ExperimentConfig) -> Result<ChainSpec> {
    let s = cfg.chain.get_or_insert_with(Default::default);
    let kind = *s.kind.get_or_insert(ChainKind::Harmonic);
    let spec = match kind {
        ChainKind::Constant => {
            let p = *s.p.get_or_insert(0.5);
            ChainSpec::constant(*s.floor.get_or_insert(0), p)
        }
        ChainKind::Harmonic => ChainSpec::harmonic(*s.floor.get_or_insert(0)),
        ChainKind::EnvelopeF1 | ChainKind::EnvelopeF2 => {
            let pk = if kind == ChainKind::EnvelopeF1 {
                ProfileKind::F1
            } else {
                ProfileKind::F2
            };
            let c = *s.c.get_or_insert(1.0);
            let floor = match s.floor {
                Some(f) => f,
                None => envelope::min_valid_floor(pk, c, FLOOR_SEARCH_BOUND).map_err(config_err)?,
            };
            s.floor = Some(floor);
            Envelope::from_kind(pk, c, floor).and_then(ChainSpec::from_envelope)
        }
        ChainKind::Table => {
            let values = s
                .values
                .clone()
                .ok_or_else(|| Error::Config("table chains need `values`".into()))?;
            ChainSpec::table(*s.floor.get_or_insert(0), values)
        }
    }
    .map_err(config_err)?;
    let floor = spec.floor();
    let max = spec.max_level();
    let m_max = *s
        .m_max
        .get_or_insert(max.unwrap_or(100).min(floor + 100).max(floor + 1));
    if m_max < floor + 1 || max.is_some_and(|x| m_max > x) {
        return Err(Error::Config(format!(
            "m_max = {m_max} outside the defined levels of the chain"
        )));
    }
    let horizon = *s
        .horizon
        .get_or_insert(max.unwrap_or(chain::DEFAULT_HORIZON.max(m_max)).max(floor + 2));
    if horizon < floor + 2 || max.is_some_and(|x| horizon > x) {
        return Err(Error::Config(format!(
            "horizon = {horizon} outside the defined levels of the chain"
        )));
    }
    let t = *s.blowup_threshold.get_or_insert(chain::DEFAULT_BLOWUP_THRESHOLD);
    if !(t > 1.0) {
        return Err(Error::Config("blowup_threshold must exceed 1".into()));
    }
    Ok(spec)
}

/// Envelope with `default_kind`/`default_c` filling gaps; the floor defaults to the
/// smallest admissible one.
pub fn resolve_envelope(cfg: &mut ExperimentConfig, default_kind: ProfileKind, default_c: f64) -> Result<Envelope> {
    let s = cfg.envelope.get_or_insert_with(Default::default);
    let kind = *s.kind.get_or_insert(default_kind);
    let c = *s.c.get_or_insert(default_c);
    let bound = *s.search_bound.get_or_insert(FLOOR_SEARCH_BOUND);
    let env = match kind {
        ProfileKind::Custom => {
            let nodes = s
                .table
                .clone()
                .ok_or_else(|| Error::Config("custom envelopes need `table`".into()))?;
            let table =
                LogTable::from_radii(&nodes.iter().map(|n| (n[0], n[1])).collect::<Vec<_>>()).map_err(config_err)?;
            let floor = *s.floor.get_or_insert(table.log_range().0.ceil().max(0.0) as i64);
            Envelope::custom(table, c, floor).map_err(config_err)?
        }
        _ => {
            let floor = match s.floor {
                Some(f) => f,
                None => envelope::min_valid_floor(kind, c, bound).map_err(config_err)?,
            };
            s.floor = Some(floor);
            Envelope::from_kind(kind, c, floor).map_err(config_err)?
        }
    };
    if !env.condition_holds() {
        return Err(Error::Config(format!(
            "envelope {kind:?} with c = {c} is not admissible on floor {}",
            env.floor()
        )));
    }
    s.m_max
        .get_or_insert(env.max_level().unwrap_or(env.floor() + 100).min(env.floor() + 100));
    Ok(env)
}

pub fn resolve_strategy(cfg: &mut ExperimentConfig) -> Result<NormalStrategy> {
    let s = cfg.geometry.get_or_insert_with(Default::default);
    match *s.strategy.get_or_insert(StrategyKind::Catenoid) {
        StrategyKind::HorizontalPlane => Ok(NormalStrategy::horizontal_plane(*s.height.get_or_insert(0.0))),
        StrategyKind::VerticalPlane => Ok(NormalStrategy::vertical_plane(
            *s.phi.get_or_insert(0.0),
            *s.offset.get_or_insert(0.0),
        )),
        StrategyKind::Catenoid => NormalStrategy::catenoid(*s.a.get_or_insert(1.0)).map_err(config_err),
        StrategyKind::Helicoid => NormalStrategy::helicoid(*s.pitch.get_or_insert(1.0)).map_err(config_err),
        StrategyKind::RadialControl => Ok(NormalStrategy::RadialControl),
    }
}

/// Point on the strategy's surface at radius `r`.
pub fn start_point(strategy: &NormalStrategy, r: f64) -> Result<Point3> {
    match strategy {
        NormalStrategy::HorizontalPlane { height } => Ok(Point3::new(r, 0.0, *height)),
        NormalStrategy::VerticalPlane { phi, offset } => {
            if offset.abs() >= r {
                return Err(Error::Config(format!(
                    "vertical plane offset {offset} does not reach r = {r}"
                )));
            }
            let t = (r * r - offset * offset).sqrt();
            let (s, c) = phi.sin_cos();
            Ok(Point3::new(offset * c - t * s, offset * s + t * c, 0.0))
        }
        NormalStrategy::Catenoid { a, .. } => geometry::catenoid_point_at_radius(*a, r, 0.0).map_err(config_err),
        _ => Ok(Point3::new(r, 0.0, 0.0)),
    }
}

/// Defaults for a Monte Carlo recipe.
pub struct SimDefaults {
    pub paths: u64,
    pub eta: f64,
    pub max_time: f64,
    pub outer_level: Option<i64>,
    pub stop_at_outer: bool,
}

/// Simulation settings for inner level `floor`; returns the config and the path count.
pub fn resolve_sim(cfg: &mut ExperimentConfig, floor: i64, d: SimDefaults) -> Result<(SimConfig, u64)> {
    let seed = *cfg.seed.get_or_insert(DEFAULT_SEED);
    let s = cfg.martingale.get_or_insert_with(Default::default);
    let paths = *s.paths.get_or_insert(d.paths);
    let step = match (s.dt, s.eta) {
        (Some(_), Some(_)) => return Err(Error::Config("set either `dt` or `eta`, not both".into())),
        (Some(dt), None) => StepSize::Fixed(dt),
        (None, Some(eta)) => StepSize::ScaleCovariant { eta },
        (None, None) => StepSize::ScaleCovariant {
            eta: *s.eta.insert(d.eta),
        },
    };
    if s.outer_level.is_none() {
        s.outer_level = d.outer_level;
    }
    let sim = SimConfig {
        step,
        inner_level: floor,
        outer_level: s.outer_level,
        stop_at_outer: *s.stop_at_outer.get_or_insert(d.stop_at_outer),
        max_time: *s.max_time.get_or_insert(d.max_time),
        max_steps: *s.max_steps.get_or_insert(1_000_000_000),
        retraction: *s.retraction.get_or_insert(Retraction::ProjectToSurface),
        interpolate_crossings: *s.interpolate.get_or_insert(true),
        trace: TraceMode::Endpoints,
        occupation_radii: Vec::new(),
        master_seed: seed,
    };
    sim.validate()?;
    if paths < 2 {
        return Err(Error::Config("need at least 2 paths".into()));
    }
    Ok((sim, paths))
}

pub fn resolve_pathstats(cfg: &mut ExperimentConfig, default_k: Vec<i64>, default_rho: Vec<i64>) -> PathstatsSection {
    let s = cfg.pathstats.get_or_insert_with(Default::default);
    s.k_levels.get_or_insert(default_k);
    s.rho_levels.get_or_insert(default_rho);
    s.min_departures.get_or_insert(500);
    s.stopped_fraction_target.get_or_insert(0.99);
    s.slope_tolerance.get_or_insert(0.3);
    s.ratio_spread_tolerance.get_or_insert(0.2);
    s.clone()
}

pub struct CouplingSetup {
    pub spec: ChainSpec,
    pub table: PhiTable,
    pub runs: u64,
    pub max_steps: usize,
    pub min_visits: u64,
}

pub fn resolve_coupling(cfg: &mut ExperimentConfig) -> Result<CouplingSetup> {
    cfg.seed.get_or_insert(DEFAULT_SEED);
    {
        let c = cfg.chain.get_or_insert_with(Default::default);
        c.kind.get_or_insert(ChainKind::Constant);
        if c.kind == Some(ChainKind::Constant) {
            c.p.get_or_insert(0.5);
        }
    }
    let spec = resolve_chain(cfg)?;
    let floor = spec.floor();
    let s = cfg.coupling.get_or_insert_with(Default::default);
    let rules = s
        .rules
        .get_or_insert_with(|| PhiTable::two_regime(floor, floor + 10, 0.4, 0.45).rules)
        .clone();
    let table = PhiTable { rules };
    table.validate(&spec).map_err(config_err)?;
    let runs = *s.runs.get_or_insert(100_000);
    let max_steps = *s.max_steps.get_or_insert(1000);
    let min_visits = *s.min_visits.get_or_insert(500);
    if runs < 1 || max_steps < 1 {
        return Err(Error::Config("coupling needs at least one run and one step".into()));
    }
    Ok(CouplingSetup {
        spec,
        table,
        runs,
        max_steps,
        min_visits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_rejected() {
        assert!(ExperimentConfig::from_toml("seed = 1\n[chain]\nkind = \"harmonic\"\nbogus = 3\n").is_err());
        assert!(ExperimentConfig::from_toml("[nonsense]\n").is_err());
    }

    #[test]
    fn resolved_config_round_trips() {
        let mut cfg = ExperimentConfig::from_toml("[chain]\nkind = \"envelope_f1\"\nc = 1.0\n").unwrap();
        resolve_chain(&mut cfg).unwrap();
        assert_eq!(cfg.chain.as_ref().unwrap().floor, Some(10));
        let text = cfg.to_toml().unwrap();
        assert_eq!(ExperimentConfig::from_toml(&text).unwrap(), cfg);
    }

    #[test]
    fn malformed_phi_table_is_a_config_error() {
        let mut cfg = ExperimentConfig::from_toml("[coupling]\nrules = [{ level_from = 1, phi = 0.6 }]\n").unwrap();
        assert!(matches!(resolve_coupling(&mut cfg), Err(Error::Config(_))));
    }

    #[test]
    fn dt_and_eta_conflict() {
        let mut cfg = ExperimentConfig::from_toml("[martingale]\ndt = 0.1\neta = 0.01\n").unwrap();
        let d = SimDefaults {
            paths: 10,
            eta: 0.01,
            max_time: 1.0,
            outer_level: None,
            stop_at_outer: false,
        };
        assert!(resolve_sim(&mut cfg, 0, d).is_err());
    }
}
