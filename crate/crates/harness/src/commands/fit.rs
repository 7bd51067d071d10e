use std::path::Path;

use serde::Serialize;
use zkb_core::diagnostics::{fit_samples, last_half_window, NormKind};
use zkb_core::{constants_for_width, NormSample};

use crate::config::{FitWindow, RunConfig};
use crate::error::{Exit, HarnessError, Result};
use crate::manifest::Manifest;
use crate::series::{read_series, SERIES_FILE};

/// Relative shortfall of the fitted rate below `χ` still accepted. It only
/// absorbs finite-window fit error; faster decay is always compliant.
pub const RATE_TOLERANCE: f64 = 0.05;

/// Relative slack of the pointwise bound `w_l2(t) ≤ e^{−χt}·w_l2(0)`.
pub const POINTWISE_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, Serialize)]
pub struct FitReport {
    pub norm: String,
    pub t0: f64,
    pub t1: f64,
    pub samples: usize,
    pub rate: f64,
    pub intercept: f64,
    pub residual: f64,
    pub chi: f64,
    pub threshold: f64,
    pub pass: bool,
    /// Largest `w_l2(t)·e^{χt}/w_l2(0)` over all samples.
    pub pointwise_ratio: f64,
    pub pointwise_pass: bool,
}

/// Largest `w_l2(t)·e^{χt}/w_l2(0)` over `samples`.
pub fn pointwise_ratio(samples: &[NormSample<f64>], chi: f64) -> f64 {
    let w0 = samples.first().map_or(0.0, |s| s.w_l2);
    if w0 == 0.0 {
        return 0.0;
    }
    samples
        .iter()
        .map(|s| s.w_l2 * (chi * s.t).exp() / w0)
        .fold(0.0, f64::max)
}

/// Fits `samples` and compares the rate with `χ(width)`.
pub fn fit_report(
    samples: &[NormSample<f64>],
    width: f64,
    norm: NormKind,
    t0: f64,
    t1: f64,
) -> Result<FitReport> {
    let chi = constants_for_width(width)?.chi;
    let fit = fit_samples(samples, norm, t0, t1)?;
    let threshold = chi * (1.0 - RATE_TOLERANCE);
    let pointwise = pointwise_ratio(samples, chi);
    Ok(FitReport {
        norm: norm.name().to_string(),
        t0: fit.t0,
        t1: fit.t1,
        samples: fit.samples,
        rate: fit.rate,
        intercept: fit.intercept,
        residual: fit.residual,
        chi,
        threshold,
        pass: fit.rate >= threshold,
        pointwise_ratio: pointwise,
        pointwise_pass: pointwise <= 1.0 + POINTWISE_SLACK,
    })
}

/// Resolves the fit window: explicit bounds first, then the run's
/// experiment settings.
pub fn window(
    config: &RunConfig,
    samples: &[NormSample<f64>],
    t0: Option<f64>,
    t1: Option<f64>,
) -> Result<(f64, f64)> {
    let (d0, d1) = match config.experiment.window {
        FitWindow::Range(a, b) => (a, b),
        FitWindow::LastHalf => last_half_window(samples)?,
    };
    Ok((t0.unwrap_or(d0), t1.unwrap_or(d1)))
}

/// Reads a run directory, refusing runs that are not clean.
pub fn load_clean_run(dir: &Path) -> Result<(Manifest, RunConfig, Vec<NormSample<f64>>)> {
    let manifest = Manifest::read_verified(dir)?;
    let exit = match manifest.status.as_str() {
        "clean" => None,
        "contaminated" => Some(Exit::Contaminated),
        "blow-up" => Some(Exit::BlowUp),
        other => {
            return Err(HarnessError::format(
                &dir.join(crate::manifest::MANIFEST_FILE),
                format!("unknown status {other:?}"),
            ))
        }
    };
    if let Some(exit) = exit {
        return Err(HarnessError::Rejected {
            reason: format!("{} run is not eligible for a decay verdict", manifest.status),
            exit,
        });
    }
    let config = RunConfig::from_value(&manifest.config)?;
    let samples = read_series(&dir.join(SERIES_FILE))?;
    Ok((manifest, config, samples))
}

pub fn fit_decay(dir: &Path, norm: Option<NormKind>, t0: Option<f64>, t1: Option<f64>) -> Result<FitReport> {
    let (_, config, samples) = load_clean_run(dir)?;
    let norm = norm.unwrap_or(config.experiment.norm);
    let (t0, t1) = window(&config, &samples, t0, t1)?;
    fit_report(&samples, config.geometry.width, norm, t0, t1)
}
