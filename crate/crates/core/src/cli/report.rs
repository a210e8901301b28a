//! Writes a run directory: `summary.json`, the resolved `config.toml`, one CSV per table
//! and, on request, a few full path traces.

use std::fs;
use std::path::Path;

use serde::Serialize;

use super::config::ExperimentConfig;
use super::recipes::{Check, Report, SimSetup, Table};
use crate::error::{Error, Result};
use crate::martingale::{self, TraceMode};

/// Number of paths re-simulated with a full trace when `--trace` is given.
pub const TRACED_PATHS: u64 = 10;

#[derive(Debug, Serialize)]
pub struct Summary<'a, R: Serialize> {
    pub command: &'a str,
    pub seed: u64,
    pub config: &'a ExperimentConfig,
    pub config_toml: String,
    pub report: &'a R,
    pub checks: Vec<Check>,
    pub passed: bool,
}

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::Io(e.to_string())
}

fn write_table(dir: &Path, t: &Table) -> Result<()> {
    let mut w = csv::Writer::from_path(dir.join(format!("{}.csv", t.name))).map_err(io_err)?;
    w.write_record(&t.header).map_err(io_err)?;
    for row in &t.rows {
        w.write_record(row).map_err(io_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes every artifact of a finished run and returns its checks.
pub fn write_run<R: Report>(dir: &Path, command: &str, cfg: &ExperimentConfig, report: &R) -> Result<Vec<Check>> {
    fs::create_dir_all(dir)?;
    let config_toml = cfg.to_toml()?;
    fs::write(dir.join("config.toml"), &config_toml)?;
    let checks = report.checks();
    let summary = Summary {
        command,
        seed: cfg.seed(),
        config: cfg,
        config_toml,
        report,
        passed: checks.iter().all(|c| c.passed),
        checks: checks.clone(),
    };
    let json = serde_json::to_string_pretty(&summary).map_err(io_err)?;
    fs::write(dir.join("summary.json"), json)?;
    for t in report.tables() {
        write_table(dir, &t)?;
    }
    Ok(checks)
}

/// Re-runs the first paths with a full trace; replication `i` reproduces path `i` exactly.
pub fn write_traces(dir: &Path, setup: &SimSetup, paths: u64) -> Result<()> {
    let traces = dir.join("traces");
    fs::create_dir_all(&traces)?;
    let mut sim = setup.sim.clone();
    sim.trace = TraceMode::Full;
    for i in 0..paths.min(TRACED_PATHS) {
        let rec = martingale::simulate_path(&setup.strategy, setup.start, &sim, i)?;
        let mut w = csv::Writer::from_path(traces.join(format!("path_{i:02}.csv"))).map_err(io_err)?;
        w.write_record(["t", "x1", "x2", "x3"]).map_err(io_err)?;
        for (t, p) in rec.times.iter().zip(&rec.positions) {
            w.write_record([t.to_string(), p.x1.to_string(), p.x2.to_string(), p.x3.to_string()])
                .map_err(io_err)?;
        }
        w.flush()?;
    }
    Ok(())
}
