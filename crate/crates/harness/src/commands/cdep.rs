//! Continuous dependence on the initial data: the base run and two
//! perturbed runs `u₀ + ε·φ`, `u₀ + (ε/2)·φ` advance in lockstep, and the
//! weighted size of each difference `z = u_ε − u` is tracked against its
//! initial value.

use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;
use zkb_core::{
    make_initial_field, weighted_inner, Field64, InitialData64, RunStatus, Simulation, ZkbError,
};

use crate::config::{InitialSpec, RunConfig};
use crate::error::{Exit, HarnessError, Result};
use crate::manifest::now;
use crate::run::{initial_field, manifest_for, write_run_files, RunRecord};
use crate::series::{format_real, write_series};

/// Largest relative disagreement between the growth factors of the `ε` and
/// `ε/2` runs.
pub const GROWTH_AGREEMENT: f64 = 0.1;
/// Width `s` of the Gaussian bump.
pub const BUMP_WIDTH: f64 = 2.0;

pub const DIFFERENCE_FILE: &str = "cdep.csv";
pub const SERIES_EPS_FILE: &str = "series_eps.csv";
pub const SERIES_HALF_FILE: &str = "series_half.csv";

#[derive(Debug, Clone)]
pub struct CdepOptions {
    pub config: RunConfig,
    pub eps: f64,
    pub out: PathBuf,
}

#[derive(Debug, Clone, Serialize)]
pub struct CdepReport {
    pub eps: f64,
    /// `max_t (e^{2bx}, z²)(t) / (e^{2bx}, z₀²)` for `ε` and `ε/2`.
    pub growth_eps: f64,
    pub growth_half: f64,
    /// `growth_eps / growth_half`.
    pub ratio: f64,
    pub agree: bool,
    /// `‖u₀ + ε·φ‖` is within the regular-solution threshold.
    pub in_scope: bool,
    pub perturbed_norm: f64,
    /// `clean`, `contaminated` or `blow-up`, worst over the three runs.
    pub status: String,
    /// `identical`, `pass`, `fail`, `informational` or `rejected`.
    pub verdict: String,
    pub times: Vec<f64>,
    pub z_eps: Vec<f64>,
    pub z_half: Vec<f64>,
}

impl CdepReport {
    pub fn exit(&self) -> Exit {
        match self.status.as_str() {
            "blow-up" => Exit::BlowUp,
            "contaminated" => Exit::Contaminated,
            _ if self.verdict == "fail" => Exit::VerdictFailed,
            _ => Exit::Clean,
        }
    }

    fn identical(eps: f64) -> Self {
        CdepReport {
            eps,
            growth_eps: 1.0,
            growth_half: 1.0,
            ratio: 1.0,
            agree: true,
            in_scope: true,
            perturbed_norm: f64::NAN,
            status: "clean".into(),
            verdict: "identical".into(),
            times: Vec::new(),
            z_eps: Vec::new(),
            z_half: Vec::new(),
        }
    }
}

/// Unit-norm `j = 1` Gaussian centred where the base data is.
fn bump(config: &RunConfig, grid: &std::sync::Arc<zkb_core::Grid64>) -> Result<Field64> {
    let center = match config.initial {
        InitialSpec::Gaussian { center, .. } => center,
        _ => 0.0,
    };
    let spec = InitialData64::gaussian_with_norm(1.0, center, BUMP_WIDTH, 1);
    let mut phi = make_initial_field(&spec, grid)?.field;
    let norm = phi.l2();
    phi.scale(1.0 / norm);
    Ok(phi)
}

fn worst_status(runs: &[&Simulation<f64>]) -> RunStatus {
    let mut worst = RunStatus::Clean;
    for sim in runs {
        match sim.series().status {
            s @ RunStatus::BlowUp { .. } => return s,
            s @ RunStatus::Contaminated { .. } if worst.is_clean() => worst = s,
            _ => {}
        }
    }
    worst
}

fn growth(z: &[f64]) -> f64 {
    match z.first() {
        Some(&z0) if z0 > 0.0 => z.iter().fold(0.0f64, |m, v| m.max(*v)) / z0,
        _ => f64::NAN,
    }
}

fn write_differences(path: &Path, report: &CdepReport) -> Result<()> {
    let wrap = |e: csv::Error| HarnessError::format(path, e.to_string());
    let mut w = csv::Writer::from_path(path).map_err(wrap)?;
    w.write_record(["t", "z_eps", "z_half"]).map_err(wrap)?;
    for i in 0..report.times.len() {
        w.write_record([report.times[i], report.z_eps[i], report.z_half[i]].map(format_real))
            .map_err(wrap)?;
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}

pub fn cdep(opts: &CdepOptions) -> Result<CdepReport> {
    let eps = opts.eps;
    if !(eps.is_finite() && eps >= 0.0) {
        return Err(HarnessError::Usage(format!("eps must be a nonnegative number, got {eps}")));
    }
    if eps == 0.0 {
        return Ok(CdepReport::identical(eps));
    }
    let config = &opts.config;
    let resolved = config.resolve()?;
    let (grid, init) = initial_field(&resolved)?;
    let phi = bump(config, &grid)?;
    let b = resolved.geometry.weight_rate;
    let perturbed = |scale: f64| -> Result<Field64> {
        let mut u = init.field.clone();
        u.add_scaled(scale, &phi)?;
        Ok(u)
    };
    let (u_eps, u_half) = (perturbed(eps)?, perturbed(0.5 * eps)?);
    let perturbed_norm = u_eps.l2();
    let started = now();
    let cfg = resolved.solver.clone();
    let mut base = Simulation::new(init.field.clone(), cfg.clone(), "base")?;
    let mut run_eps = Simulation::new(u_eps, cfg.clone(), format!("base + {eps:e}·bump"))?;
    let mut run_half = Simulation::new(u_half, cfg, format!("base + {:e}·bump", 0.5 * eps))?;
    let u0_norm = base.state().l2();
    let difference = |a: &Simulation<f64>, base: &Simulation<f64>| -> Result<f64> {
        let z = a.state().difference(base.state())?;
        Ok(weighted_inner(b, &z, &z)?)
    };
    let mut times = vec![0.0];
    let mut z_eps = vec![difference(&run_eps, &base)?];
    let mut z_half = vec![difference(&run_half, &base)?];
    while !base.is_finished() {
        let mut sampled = false;
        let mut blown = false;
        for sim in [&mut base, &mut run_eps, &mut run_half] {
            match sim.advance() {
                Ok(s) => sampled |= s,
                Err(ZkbError::BlowUp { .. }) => blown = true,
                Err(e) => return Err(e.into()),
            }
        }
        if blown || run_eps.is_finished() != base.is_finished() {
            break;
        }
        if sampled {
            times.push(base.time());
            z_eps.push(difference(&run_eps, &base)?);
            z_half.push(difference(&run_half, &base)?);
        }
    }
    let status = worst_status(&[&base, &run_eps, &run_half]);
    let finished = now();
    let (growth_eps, growth_half) = (growth(&z_eps), growth(&z_half));
    let ratio = growth_eps / growth_half;
    let agree = ratio.is_finite() && (ratio - 1.0).abs() <= GROWTH_AGREEMENT;
    let in_scope = perturbed_norm <= resolved.constants.reg_threshold;
    let verdict = if !status.is_clean() {
        "rejected"
    } else if !in_scope {
        "informational"
    } else if agree {
        "pass"
    } else {
        "fail"
    };
    let report = CdepReport {
        eps,
        growth_eps,
        growth_half,
        ratio,
        agree,
        in_scope,
        perturbed_norm,
        status: status.name().to_string(),
        verdict: verdict.to_string(),
        times,
        z_eps,
        z_half,
    };

    let dir = &opts.out;
    let series_eps = run_eps.finish();
    let series_half = run_half.finish();
    let record = RunRecord {
        series: base.finish(),
        started,
        finished,
        u0_norm,
        u0_tail: init.tail,
    };
    let mut files = write_run_files(dir, config, &record.series)?;
    write_series(&dir.join(SERIES_EPS_FILE), &series_eps.samples)?;
    write_series(&dir.join(SERIES_HALF_FILE), &series_half.samples)?;
    write_differences(&dir.join(DIFFERENCE_FILE), &report)?;
    files.extend([SERIES_EPS_FILE, SERIES_HALF_FILE, DIFFERENCE_FILE].map(String::from));
    let summary = json!({
        "eps": report.eps,
        "bump": { "kind": "gaussian_mode", "norm": 1.0, "s": BUMP_WIDTH, "mode": 1 },
        "growth_eps": report.growth_eps,
        "growth_half": report.growth_half,
        "ratio": report.ratio,
        "agree": report.agree,
        "in_scope": report.in_scope,
        "perturbed_norm": report.perturbed_norm,
        "cdep_status": report.status,
        "verdict": report.verdict,
        "perturbed_runs": [
            { "status": series_eps.status.name(), "absorbed_energy": series_eps.absorbed },
            { "status": series_half.status.name(), "absorbed_energy": series_half.absorbed },
        ],
    });
    let mut manifest = manifest_for("cdep", config, &resolved, &record, summary);
    manifest.write(dir, &files)?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn growth_of_profiles() {
        assert_eq!(growth(&[2.0, 3.0, 1.0]), 1.5);
        assert_eq!(growth(&[2.0, 1.0]), 1.0);
        assert!(growth(&[0.0, 1.0]).is_nan());
        assert!(growth(&[]).is_nan());
    }

    #[test]
    fn zero_eps_is_identical_and_negative_rejected() {
        let opts = CdepOptions {
            config: RunConfig::paper_ref(),
            eps: 0.0,
            out: PathBuf::from("/nonexistent"),
        };
        let r = cdep(&opts).unwrap();
        assert_eq!(r.verdict, "identical");
        assert_eq!(r.exit(), Exit::Clean);
        let bad = CdepOptions { eps: -1.0, ..opts };
        assert_eq!(cdep(&bad).unwrap_err().exit(), Exit::Usage);
    }
}
