//! Running a configuration and persisting the result as a run directory:
//! `config.json`, `series.csv`, optional snapshots, and `manifest.json`.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use serde_json::{json, Value};
use zkb_core::solver::initial::InitialField;
use zkb_core::{
    energy_residual, make_initial_field, Field64, Grid64, RunStatus, Simulation, TheoremConstants64,
    TimeSeries64, ZkbError,
};

use crate::config::{Resolved, RunConfig, WeightSpec};
use crate::error::{Exit, HarnessError, Result};
use crate::json::to_pretty;
use crate::manifest::{now, Manifest, CODE_VERSION};
use crate::series::{format_real, write_series, SERIES_FILE};

pub const CONFIG_FILE: &str = "config.json";
pub const SNAPSHOT_DIR: &str = "snapshots";

/// A finished run with its wall-clock bounds.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub series: TimeSeries64,
    pub started: String,
    pub finished: String,
    /// `‖u₀‖` after sampling (and truncation, if dealiasing).
    pub u0_norm: f64,
    pub u0_tail: f64,
}

impl RunRecord {
    pub fn exit(&self) -> Exit {
        exit_for(&self.series.status)
    }
}

pub fn exit_for(status: &RunStatus) -> Exit {
    match status {
        RunStatus::Clean => Exit::Clean,
        RunStatus::Contaminated { .. } => Exit::Contaminated,
        RunStatus::BlowUp { .. } => Exit::BlowUp,
    }
}

pub fn constants_json(c: &TheoremConstants64) -> Value {
    json!({
        "B": c.width,
        "b_star": c.b_star,
        "chi": c.chi,
        "gamma": c.gamma,
        "reg_threshold": c.reg_threshold,
        "weak_threshold": c.weak_threshold,
        "chi_closed_form": c.chi_closed_form,
    })
}

/// Samples the initial field of a resolved configuration.
pub fn initial_field(resolved: &Resolved) -> Result<(Arc<Grid64>, InitialField<f64>)> {
    let grid = Grid64::new(resolved.geometry)?;
    let init = make_initial_field(&resolved.initial, &grid)?;
    Ok((grid, init))
}

/// Integrates `u0` under the resolved solver settings.
pub fn execute_field(u0: Field64, resolved: &Resolved, label: &str) -> Result<RunRecord> {
    let started = now();
    let mut sim = Simulation::new(u0, resolved.solver.clone(), label)?;
    let u0_norm = sim.state().l2();
    let u0_tail = sim.series().samples[0].tail;
    drive(&mut sim)?;
    Ok(RunRecord {
        series: sim.finish(),
        started,
        finished: now(),
        u0_norm,
        u0_tail,
    })
}

pub fn execute(resolved: &Resolved, label: &str) -> Result<RunRecord> {
    let (_, init) = initial_field(resolved)?;
    execute_field(init.field, resolved, label)
}

/// Advances to the end or to blow-up, which is recorded in the status.
pub fn drive(sim: &mut Simulation<f64>) -> Result<()> {
    while !sim.is_finished() {
        match sim.advance() {
            Ok(_) => {}
            Err(ZkbError::BlowUp { .. }) => break,
            Err(e) => return Err(e.into()),
        }
    }
    Ok(())
}

/// Settings substituted for `"auto"`, plus the decay constants of the strip.
pub fn resolved_json(config: &RunConfig, resolved: &Resolved, record: Option<&RunRecord>) -> Value {
    let mut v = json!({
        "b": resolved.geometry.weight_rate,
        "b_auto": config.geometry.weight == WeightSpec::Auto,
        "absorber": resolved.solver.absorber,
        "constants": constants_json(&resolved.constants),
    });
    if let Some(r) = record {
        v["u0_norm"] = json!(r.u0_norm);
        v["u0_tail"] = json!(r.u0_tail);
        v["label"] = json!(r.series.label);
    }
    v
}

/// A manifest describing `record`, with an empty file inventory.
pub fn manifest_for(
    command: &str,
    config: &RunConfig,
    resolved: &Resolved,
    record: &RunRecord,
    report: Value,
) -> Manifest {
    let series = &record.series;
    let (blow_up_time, contamination_time) = match series.status {
        RunStatus::Clean => (None, None),
        RunStatus::Contaminated { first_time } => (None, Some(first_time)),
        RunStatus::BlowUp { time, .. } => (Some(time), None),
    };
    Manifest {
        command: command.to_string(),
        code_version: CODE_VERSION.to_string(),
        seed: config.seed,
        config: config.to_value(),
        resolved: resolved_json(config, resolved, Some(record)),
        started: record.started.clone(),
        finished: record.finished.clone(),
        status: series.status.name().to_string(),
        blow_up_time,
        contamination_time,
        energy_residual: energy_residual(series).ok(),
        absorbed_energy: series.absorbed,
        warnings: series.warnings.clone(),
        report,
        files: Vec::new(),
    }
}

pub fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| HarnessError::io(path, e))
}

/// Writes one snapshot as `x,y,u` rows.
fn write_snapshot(path: &Path, field: &Field64) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| HarnessError::format(path, e.to_string()))?;
    let wrap = |e: csv::Error| HarnessError::format(path, e.to_string());
    w.write_record(["x", "y", "u"]).map_err(wrap)?;
    let values = field.to_physical();
    let grid = field.grid();
    for (m, row) in values.outer_iter().enumerate() {
        for (i, u) in row.iter().enumerate() {
            w.write_record([format_real(grid.x()[i]), format_real(grid.y()[m]), format_real(*u)])
                .map_err(wrap)?;
        }
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}

/// Writes config, series and snapshots into `dir` and returns their names.
pub fn write_run_files(dir: &Path, config: &RunConfig, series: &TimeSeries64) -> Result<Vec<String>> {
    create_dir(dir)?;
    write_text(&dir.join(CONFIG_FILE), &to_pretty(&config.to_value()))?;
    write_series(&dir.join(SERIES_FILE), &series.samples)?;
    let mut files = vec![CONFIG_FILE.to_string(), SERIES_FILE.to_string()];
    if !series.snapshots.is_empty() {
        create_dir(&dir.join(SNAPSHOT_DIR))?;
        for (i, (_, field)) in series.snapshots.iter().enumerate() {
            let name = format!("{SNAPSHOT_DIR}/snap_{i:05}.csv");
            write_snapshot(&dir.join(&name), field)?;
            files.push(name);
        }
    }
    Ok(files)
}

/// Writes a complete run directory.
pub fn persist(
    dir: &Path,
    command: &str,
    config: &RunConfig,
    resolved: &Resolved,
    record: &RunRecord,
    report: Value,
) -> Result<Manifest> {
    let files = write_run_files(dir, config, &record.series)?;
    let mut report = report;
    if !record.series.snapshots.is_empty() {
        if report.is_null() {
            report = json!({});
        }
        let times: Vec<f64> = record.series.snapshots.iter().map(|(t, _)| *t).collect();
        report["snapshot_times"] = json!(times);
    }
    let mut manifest = manifest_for(command, config, resolved, record, report);
    manifest.write(dir, &files)?;
    Ok(manifest)
}
