use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use zkb_core::diagnostics::last_half_window;
use zkb_core::{check_smallness, constants_for_width, Regime};

use crate::commands::fit::{fit_report, FitReport};
use crate::config::{Amplitude, FitWindow, InitialSpec, RunConfig};
use crate::error::{Exit, HarnessError, Result};
use crate::manifest::{now, Manifest, CODE_VERSION};
use crate::run::{execute, persist, write_text};
use crate::series::format_real;

pub const SUMMARY_FILE: &str = "summary.csv";
/// Full per-cell results, including fit details.
pub const CELLS_FILE: &str = "cells.json";

/// Default amplitudes, as multiples of the weak-solution threshold.
pub const DEFAULT_AMPLITUDES: [f64; 3] = [0.5, 0.9, 1.1];

#[derive(Debug, Clone)]
pub struct SweepOptions {
    pub template: RunConfig,
    pub widths: Vec<f64>,
    /// Multiples of `weak_threshold(B)`.
    pub amplitudes: Vec<f64>,
    pub workers: usize,
    pub out: PathBuf,
}

/// Outcome of one `(B, amplitude)` cell.
#[derive(Debug, Clone, Serialize)]
pub struct Cell {
    pub index: usize,
    pub width: f64,
    pub amplitude_factor: f64,
    pub u0_norm: f64,
    /// Horizon actually run, after the drift cap.
    pub t_end: f64,
    pub reg_threshold: f64,
    pub weak_threshold: f64,
    pub regular_ok: bool,
    pub weak_ok: bool,
    /// Below the regular-solution threshold, where the decay theorem applies.
    pub in_scope: bool,
    pub status: String,
    pub chi: f64,
    pub fit: Option<FitReport>,
    /// `pass`, `fail`, `informational`, or `rejected: <reason>`.
    pub verdict: String,
    pub dir: String,
    /// Run outcome: clean, contaminated, blow-up, or usage for a cell that
    /// could not run.
    #[serde(skip)]
    pub outcome: Exit,
}

impl Cell {
    /// An in-scope cell whose decay check ran and failed.
    pub fn failed(&self) -> bool {
        self.in_scope && self.verdict == "fail"
    }
}

#[derive(Debug, Clone)]
pub struct SweepReport {
    pub cells: Vec<Cell>,
}

impl SweepReport {
    /// A failed in-scope decay check gives 4. Otherwise the most severe
    /// cell outcome is reported, so cells that could not be checked are
    /// never mistaken for passes.
    pub fn exit(&self) -> Exit {
        if self.cells.iter().any(Cell::failed) {
            return Exit::VerdictFailed;
        }
        self.cells.iter().fold(Exit::Clean, |acc, c| acc.worst(c.outcome))
    }
}

/// Fraction of the half-length the `j = 1` packet may drift during a cell.
pub const DRIFT_ALLOWANCE: f64 = 0.5;

/// Longest horizon keeping a packet moving left at the group speed
/// `λ₁ = (π/B)²` inside `DRIFT_ALLOWANCE·Lx`, as a whole number of steps.
/// Narrow strips drift fast but also decay fast, so the shorter horizon
/// still covers many e-folds.
pub fn drift_horizon(width: f64, half_length: f64, dt: f64) -> f64 {
    let lambda1 = (std::f64::consts::PI / width).powi(2);
    (DRIFT_ALLOWANCE * half_length / lambda1 / dt).floor() * dt
}

fn cell_config(template: &RunConfig, width: f64, factor: f64) -> Result<(RunConfig, f64)> {
    let weak = constants_for_width(width)?.weak_threshold;
    let norm = factor * weak;
    let mut config = template.clone();
    config.geometry.width = width;
    let s = &mut config.solver;
    s.t_end = s.t_end.min(drift_horizon(width, config.geometry.half_length, s.dt));
    config.initial = match &template.initial {
        InitialSpec::Gaussian { center, sigma, mode, .. } => InitialSpec::Gaussian {
            amplitude: Amplitude::Norm(norm),
            center: *center,
            sigma: *sigma,
            mode: *mode,
        },
        _ => {
            return Err(HarnessError::Usage(
                "sweep templates must use gaussian_mode initial data".into(),
            ))
        }
    };
    Ok((config, norm))
}

fn run_cell(index: usize, width: f64, factor: f64, opts: &SweepOptions) -> Cell {
    let dir_name = format!("cell_{index:03}");
    let constants = constants_for_width(width).ok();
    let mut cell = Cell {
        index,
        width,
        amplitude_factor: factor,
        u0_norm: f64::NAN,
        t_end: f64::NAN,
        reg_threshold: constants.map_or(f64::NAN, |c| c.reg_threshold),
        weak_threshold: constants.map_or(f64::NAN, |c| c.weak_threshold),
        regular_ok: false,
        weak_ok: false,
        in_scope: false,
        status: "error".into(),
        chi: constants.map_or(f64::NAN, |c| c.chi),
        fit: None,
        verdict: String::new(),
        dir: dir_name.clone(),
        outcome: Exit::Usage,
    };
    if let Err(e) = fill_cell(&mut cell, &opts.template, &opts.out.join(&dir_name)) {
        cell.verdict = format!("rejected: {e}");
        cell.outcome = e.exit();
    }
    cell
}

fn fill_cell(cell: &mut Cell, template: &RunConfig, dir: &Path) -> Result<()> {
    let (config, norm) = cell_config(template, cell.width, cell.amplitude_factor)?;
    cell.u0_norm = norm;
    cell.t_end = config.solver.t_end;
    let regular = check_smallness(norm, cell.width, Regime::Regular)?;
    let weak = check_smallness(norm, cell.width, Regime::Weak)?;
    cell.regular_ok = regular.holds;
    cell.weak_ok = weak.holds;
    cell.in_scope = regular.holds;
    let resolved = config.resolve()?;
    let record = execute(&resolved, config.initial_kind())?;
    cell.status = record.series.status.name().to_string();
    cell.outcome = record.exit();
    let fit = if record.series.status.is_clean() {
        let samples = &record.series.samples;
        let (t0, t1) = match config.experiment.window {
            FitWindow::Range(a, b) => (a, b),
            FitWindow::LastHalf => last_half_window(samples)?,
        };
        Some(fit_report(samples, cell.width, config.experiment.norm, t0, t1))
    } else {
        None
    };
    let verdict = match (&fit, cell.in_scope) {
        (None, _) => format!("rejected: {} run", cell.status),
        (Some(Err(e)), _) => format!("rejected: {e}"),
        (Some(Ok(_)), false) => "informational".to_string(),
        (Some(Ok(f)), true) if f.pass => "pass".to_string(),
        (Some(Ok(_)), true) => "fail".to_string(),
    };
    cell.fit = fit.and_then(|f| f.ok());
    cell.verdict = verdict;
    let report = json!({
        "sweep_cell": cell.index,
        "amplitude_factor": cell.amplitude_factor,
        "scope": scope_name(cell.in_scope),
        "fit": cell.fit,
        "verdict": cell.verdict,
    });
    persist(dir, "sweep", &config, &resolved, &record, report)?;
    Ok(())
}

fn scope_name(in_scope: bool) -> &'static str {
    if in_scope {
        "in_scope"
    } else {
        "outside theorem scope"
    }
}

const SUMMARY_COLUMNS: [&str; 16] = [
    "cell",
    "B",
    "amplitude_factor",
    "u0_norm",
    "t_end",
    "reg_threshold",
    "weak_threshold",
    "regular_ok",
    "weak_ok",
    "scope",
    "status",
    "chi",
    "fitted_rate",
    "fit_norm",
    "verdict",
    "dir",
];

fn write_summary(path: &Path, cells: &[Cell]) -> Result<()> {
    let wrap = |e: csv::Error| HarnessError::format(path, e.to_string());
    let mut w = csv::Writer::from_path(path).map_err(wrap)?;
    w.write_record(SUMMARY_COLUMNS).map_err(wrap)?;
    for c in cells {
        w.write_record([
            c.index.to_string(),
            format_real(c.width),
            format_real(c.amplitude_factor),
            format_real(c.u0_norm),
            format_real(c.t_end),
            format_real(c.reg_threshold),
            format_real(c.weak_threshold),
            c.regular_ok.to_string(),
            c.weak_ok.to_string(),
            scope_name(c.in_scope).to_string(),
            c.status.clone(),
            format_real(c.chi),
            c.fit.as_ref().map_or(String::new(), |f| format_real(f.rate)),
            c.fit.as_ref().map_or(String::new(), |f| f.norm.clone()),
            c.verdict.clone(),
            c.dir.clone(),
        ])
        .map_err(wrap)?;
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}

/// Runs every `(B, amplitude)` cell, each in its own directory under
/// `out`, and writes `summary.csv` plus a manifest covering the cells.
pub fn sweep(opts: &SweepOptions) -> Result<SweepReport> {
    if opts.widths.is_empty() || opts.amplitudes.is_empty() {
        return Err(HarnessError::Usage("sweep lists must be nonempty".into()));
    }
    if opts.workers < 1 {
        return Err(HarnessError::Usage("workers must be ≥ 1".into()));
    }
    // Reject unusable templates before starting any cell.
    cell_config(&opts.template, opts.widths[0], opts.amplitudes[0])?;
    crate::run::create_dir(&opts.out)?;
    let started = now();
    let grid: Vec<(usize, f64, f64)> = opts
        .widths
        .iter()
        .flat_map(|&w| opts.amplitudes.iter().map(move |&a| (w, a)))
        .enumerate()
        .map(|(i, (w, a))| (i, w, a))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers)
        .build()
        .map_err(|e| HarnessError::Usage(format!("cannot start workers: {e}")))?;
    let cells: Vec<Cell> = pool.install(|| {
        grid.par_iter()
            .map(|&(i, w, a)| run_cell(i, w, a, opts))
            .collect()
    });
    write_summary(&opts.out.join(SUMMARY_FILE), &cells)?;
    let report = SweepReport { cells };
    write_text(&opts.out.join(CELLS_FILE), &crate::json::to_pretty(&report.cells))?;
    let mut files = vec![SUMMARY_FILE.to_string(), CELLS_FILE.to_string()];
    for c in &report.cells {
        let name = format!("{}/{}", c.dir, crate::manifest::MANIFEST_FILE);
        if opts.out.join(&name).exists() {
            files.push(name);
        }
    }
    let failed = report.cells.iter().filter(|c| c.failed()).count();
    let mut manifest = Manifest {
        command: "sweep".into(),
        code_version: CODE_VERSION.into(),
        seed: opts.template.seed,
        config: opts.template.to_value(),
        resolved: json!({ "B": opts.widths, "amplitude_factors": opts.amplitudes, "workers": opts.workers }),
        started,
        finished: now(),
        status: if failed == 0 { "pass" } else { "fail" }.into(),
        blow_up_time: None,
        contamination_time: None,
        energy_residual: None,
        absorbed_energy: 0.0,
        warnings: Vec::new(),
        report: json!({ "cells": report.cells.len(), "failed_in_scope": failed }),
        files: Vec::new(),
    };
    manifest.write(&opts.out, &files)?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn horizon_caps_fast_drift_only() {
        assert_eq!(drift_horizon(PI / 2.0, 100.0, 1e-3), 12.5);
        let template = RunConfig::paper_ref();
        let (narrow, _) = cell_config(&template, PI / 2.0, 0.5).unwrap();
        assert_eq!(narrow.solver.t_end, 12.5);
        let (wide, norm) = cell_config(&template, 2.0 * PI, 0.5).unwrap();
        assert_eq!(wide.solver.t_end, 40.0);
        assert!((norm - 0.5 * 3.0 / 32.0).abs() < 1e-15);
    }

    #[test]
    fn non_gaussian_template_rejected() {
        let mut template = RunConfig::paper_ref();
        template.initial = InitialSpec::SingleMode { amplitude: 1.0, wavenumber: 0.0, mode: 1 };
        assert_eq!(cell_config(&template, PI, 1.0).unwrap_err().exit(), Exit::Usage);
    }
}
