//! Command-line driver. Each subcommand resolves a config, runs one recipe and writes a run
//! directory.
//!
//! Exit codes: 0 success, 1 io failure, 2 bad config or input, 3 simulation failure,
//! 4 a check failed.

pub mod config;
pub mod recipes;
pub mod report;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::envelope::ProfileKind;
use crate::error::{Error, Result};
use config::{ChainKind, ExperimentConfig, StrategyKind};
use recipes::Check;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_SIMULATION: i32 = 3;
pub const EXIT_CHECK_FAILED: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "parabolicity",
    version,
    about = "Chain analytics and martingale Monte Carlo experiments"
)]
pub struct Cli {
    /// TOML experiment config; command-line flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Number of Monte Carlo paths (coupled runs for `couple`).
    #[arg(long, global = true)]
    pub paths: Option<u64>,
    /// Fixed time step; replaces any scale-covariant step from the config.
    #[arg(long, global = true)]
    pub dt: Option<f64>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Also write full traces of the first few paths.
    #[arg(long, global = true)]
    pub trace: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Level table and parabolicity verdict for a birth-death chain.
    Chain(ChainArgs),
    /// Admissibility and transition probabilities of an envelope.
    Envelope(EnvelopeArgs),
    /// Stopped fraction, hitting probabilities and dominance for martingale paths.
    Parabolicity(SimArgs),
    /// Occupation times against area and the chain bounds.
    AreaGrowth(SimArgs),
    /// Coupling of a synthetic walk with its dominating chain.
    Couple(CoupleArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Chain(_) => "chain",
            Command::Envelope(_) => "envelope",
            Command::Parabolicity(_) => "parabolicity",
            Command::AreaGrowth(_) => "area-growth",
            Command::Couple(_) => "couple",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EnvelopeKindArg {
    F1,
    F2,
}

impl From<EnvelopeKindArg> for ProfileKind {
    fn from(k: EnvelopeKindArg) -> Self {
        match k {
            EnvelopeKindArg::F1 => ProfileKind::F1,
            EnvelopeKindArg::F2 => ProfileKind::F2,
        }
    }
}

#[derive(Debug, Args)]
pub struct ChainArgs {
    #[arg(long, value_enum)]
    pub kind: Option<ChainKind>,
    /// Floor level L.
    #[arg(long = "L", allow_negative_numbers = true)]
    pub floor: Option<i64>,
    #[arg(long)]
    pub m_max: Option<i64>,
    /// Envelope constant for the envelope kinds.
    #[arg(long)]
    pub c: Option<f64>,
    /// Up-probability for the constant kind.
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub horizon: Option<i64>,
}

#[derive(Debug, Args)]
pub struct EnvelopeArgs {
    #[arg(long, value_enum)]
    pub kind: Option<EnvelopeKindArg>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long = "L", allow_negative_numbers = true)]
    pub floor: Option<i64>,
    #[arg(long)]
    pub m_max: Option<i64>,
}

#[derive(Debug, Args)]
pub struct SimArgs {
    #[arg(long, value_enum)]
    pub kind: Option<EnvelopeKindArg>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long = "L", allow_negative_numbers = true)]
    pub floor: Option<i64>,
    #[arg(long, value_enum)]
    pub strategy: Option<StrategyKind>,
    /// Catenoid neck radius.
    #[arg(long)]
    pub a: Option<f64>,
    /// Scale-covariant step `dt = eta r^2`.
    #[arg(long, conflicts_with = "dt")]
    pub eta: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CoupleArgs {
    #[arg(long = "L", allow_negative_numbers = true)]
    pub floor: Option<i64>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub max_steps: Option<usize>,
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) => EXIT_IO,
        Error::Simulation { .. } | Error::Replication { .. } | Error::Estimation(_) | Error::SearchExhausted(_) => {
            EXIT_SIMULATION
        }
        _ => EXIT_CONFIG,
    }
}

/// Folds the command-line overrides into the config.
pub fn apply_overrides(cli: &Cli, cfg: &mut ExperimentConfig) {
    if let Some(s) = cli.seed {
        cfg.seed = Some(s);
    }
    match &cli.command {
        Command::Chain(a) => {
            let c = cfg.chain.get_or_insert_with(Default::default);
            if a.kind.is_some() {
                c.kind = a.kind;
            }
            set(&mut c.floor, a.floor);
            set(&mut c.m_max, a.m_max);
            set(&mut c.c, a.c);
            set(&mut c.p, a.p);
            set(&mut c.horizon, a.horizon);
        }
        Command::Envelope(a) => {
            let e = cfg.envelope.get_or_insert_with(Default::default);
            set(&mut e.kind, a.kind.map(Into::into));
            set(&mut e.c, a.c);
            set(&mut e.floor, a.floor);
            set(&mut e.m_max, a.m_max);
        }
        Command::Parabolicity(a) | Command::AreaGrowth(a) => {
            let e = cfg.envelope.get_or_insert_with(Default::default);
            set(&mut e.kind, a.kind.map(Into::into));
            set(&mut e.c, a.c);
            set(&mut e.floor, a.floor);
            let g = cfg.geometry.get_or_insert_with(Default::default);
            set(&mut g.strategy, a.strategy);
            set(&mut g.a, a.a);
            let m = cfg.martingale.get_or_insert_with(Default::default);
            set(&mut m.paths, cli.paths);
            if cli.dt.is_some() {
                m.dt = cli.dt;
                m.eta = None;
            }
            if a.eta.is_some() {
                m.eta = a.eta;
                m.dt = None;
            }
        }
        Command::Couple(a) => {
            let c = cfg.chain.get_or_insert_with(Default::default);
            set(&mut c.floor, a.floor);
            if a.p.is_some() {
                c.kind = Some(ChainKind::Constant);
                c.p = a.p;
            }
            let s = cfg.coupling.get_or_insert_with(Default::default);
            set(&mut s.runs, cli.paths);
            set(&mut s.max_steps, a.max_steps);
        }
    }
}

fn set<T>(slot: &mut Option<T>, value: Option<T>) {
    if value.is_some() {
        *slot = value;
    }
}

/// Runs one parsed command and writes its run directory.
pub fn execute(cli: &Cli) -> Result<Vec<Check>> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    apply_overrides(cli, &mut cfg);
    cfg.seed.get_or_insert(config::DEFAULT_SEED);
    let dir = cli.out.as_path();
    let name = cli.command.name();
    match &cli.command {
        Command::Chain(_) => {
            let run = recipes::chain_report(&mut cfg)?;
            report::write_run(dir, name, &cfg, &run)
        }
        Command::Envelope(_) => {
            let run = recipes::envelope_report(&mut cfg)?;
            report::write_run(dir, name, &cfg, &run)
        }
        Command::Parabolicity(_) => {
            let (run, setup) = recipes::parabolicity(&mut cfg)?;
            if cli.trace {
                report::write_traces(dir, &setup, run.paths)?;
            }
            report::write_run(dir, name, &cfg, &run)
        }
        Command::AreaGrowth(_) => {
            let (run, setup) = recipes::area_growth(&mut cfg)?;
            if cli.trace {
                report::write_traces(dir, &setup, run.paths)?;
            }
            report::write_run(dir, name, &cfg, &run)
        }
        Command::Couple(_) => {
            let run = recipes::couple(&mut cfg)?;
            report::write_run(dir, name, &cfg, &run)
        }
    }
}

/// Parses `args`, runs, prints the checks and returns the process exit code.
pub fn run_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(checks) => {
            for c in &checks {
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            println!("wrote {}", cli.out.display());
            if checks.iter().all(|c| c.passed) {
                EXIT_OK
            } else {
                EXIT_CHECK_FAILED
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn run() -> i32 {
    run_with_args(std::env::args_os())
}
