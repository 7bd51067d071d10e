//! Run driver: steps the solution, samples diagnostics, and flags
//! contamination and blow-up.

use super::config::{DissipationMode, SolverConfig};
use super::integrator::{Stepper, CFL_LIMIT};
use crate::diagnostics::{NormSample, RunStatus, TimeSeries, CONTAMINATION_LIMIT};
use crate::error::{Result, ZkbError};
use crate::field::Field;
use crate::scalar::Real;

/// Growth factor of `‖u‖` over `‖u₀‖` treated as blow-up.
pub const BLOWUP_GROWTH: f64 = 1e6;

/// A run in progress. [`run`] drives it to completion; callers that need to
/// advance several runs in lockstep use [`Simulation::advance`] directly.
pub struct Simulation<T: Real> {
    stepper: Stepper<T>,
    cfg: SolverConfig<T>,
    state: Field<T>,
    step_index: usize,
    total_steps: usize,
    l2_initial: T,
    /// `2‖u_x‖²` at the last step (per-step mode) or last sample.
    last_rate: T,
    last_sample_t: T,
    diss_cum: T,
    last_drain: T,
    absorbed: T,
    series: TimeSeries<T>,
}

impl<T: Real> Simulation<T> {
    pub fn new(u0: Field<T>, cfg: SolverConfig<T>, label: impl Into<String>) -> Result<Self> {
        cfg.validate()?;
        if !u0.is_finite() {
            return Err(ZkbError::Numeric("initial field is not finite".into()));
        }
        let mut state = u0;
        if cfg.dealias {
            state.truncate_two_thirds();
        }
        let stepper = Stepper::new(state.grid(), &cfg)?;
        let mut warnings = Vec::new();
        if stepper.cfl_number().as_f64() >= CFL_LIMIT {
            warnings.push(format!(
                "dt·max|Im σ| = {:.3e} exceeds the advisory limit {CFL_LIMIT}",
                stepper.cfl_number()
            ));
        }
        let total_steps = cfg.steps();
        let t_final = cfg.dt * T::from_count(total_steps);
        if (t_final - cfg.t_end).abs() > T::lit(1e-9) * cfg.t_end.max(T::one()) {
            warnings.push(format!(
                "t_end = {} is not a multiple of dt; the run stops at {}",
                cfg.t_end, t_final
            ));
        }
        let rate = T::lit(2.0) * state.dx_l2_sq();
        let mut series = TimeSeries {
            geometry: *state.geometry(),
            config: cfg.clone(),
            label: label.into(),
            samples: Vec::new(),
            snapshots: Vec::new(),
            status: RunStatus::Clean,
            warnings,
            absorbed: T::zero(),
        };
        let drain = stepper.absorber_drain(&state);
        let first = NormSample::measure(&state, T::zero(), T::zero());
        record(&mut series, &cfg, first, &state);
        Ok(Self {
            stepper,
            l2_initial: state.l2_sq(),
            state,
            step_index: 0,
            total_steps,
            last_rate: rate,
            last_sample_t: T::zero(),
            diss_cum: T::zero(),
            last_drain: drain,
            absorbed: T::zero(),
            series,
            cfg,
        })
    }

    pub fn time(&self) -> T {
        self.cfg.dt * T::from_count(self.step_index)
    }

    pub fn state(&self) -> &Field<T> {
        &self.state
    }

    pub fn step_index(&self) -> usize {
        self.step_index
    }

    pub fn total_steps(&self) -> usize {
        self.total_steps
    }

    pub fn is_finished(&self) -> bool {
        self.step_index >= self.total_steps || matches!(self.series.status, RunStatus::BlowUp { .. })
    }

    pub fn series(&self) -> &TimeSeries<T> {
        &self.series
    }

    pub fn cfl_number(&self) -> T {
        self.stepper.cfl_number()
    }

    /// Whether the current step index is an output step.
    pub fn is_sample_step(&self) -> bool {
        self.step_index % self.cfg.output_every == 0 || self.step_index == self.total_steps
    }

    /// Takes one step. Returns `Ok(true)` when a sample was recorded.
    /// On blow-up the status is set and the error returned.
    pub fn advance(&mut self) -> Result<bool> {
        if self.is_finished() {
            return Ok(false);
        }
        let t = self.time();
        let next = match self.stepper.step(&self.state, t) {
            Ok(f) => f,
            Err(ZkbError::BlowUp { t, .. }) => return Err(self.blow_up(t, T::nan())),
            Err(e) => return Err(e),
        };
        self.state = next;
        self.step_index += 1;
        let t = self.time();
        let l2 = self.state.l2_sq();
        let limit = T::lit(BLOWUP_GROWTH * BLOWUP_GROWTH) * self.l2_initial;
        if !l2.is_finite() || (self.l2_initial > T::zero() && l2 > limit) {
            return Err(self.blow_up(t.as_f64(), l2));
        }
        let rate = T::lit(2.0) * self.state.dx_l2_sq();
        let drain = if self.cfg.absorber > T::zero() {
            self.stepper.absorber_drain(&self.state)
        } else {
            T::zero()
        };
        if self.cfg.dissipation == DissipationMode::PerStep {
            self.diss_cum += self.cfg.dt * T::lit(0.5) * (self.last_rate + rate);
            self.absorbed += self.cfg.dt * T::lit(0.5) * (self.last_drain + drain);
            self.last_rate = rate;
            self.last_drain = drain;
        }
        if !self.is_sample_step() {
            return Ok(false);
        }
        if self.cfg.dissipation == DissipationMode::PerSnapshot {
            let span = (t - self.last_sample_t) * T::lit(0.5);
            self.diss_cum += span * (self.last_rate + rate);
            self.absorbed += span * (self.last_drain + drain);
            self.last_rate = rate;
            self.last_drain = drain;
        }
        self.series.absorbed = self.absorbed;
        self.last_sample_t = t;
        let sample = NormSample::measure(&self.state, t, self.diss_cum);
        record(&mut self.series, &self.cfg, sample, &self.state);
        Ok(true)
    }

    fn blow_up(&mut self, t: f64, l2: T) -> ZkbError {
        self.series.status = RunStatus::BlowUp {
            time: t,
            last_l2: l2.as_f64(),
        };
        ZkbError::BlowUp { t, l2: l2.as_f64() }
    }

    pub fn finish(self) -> TimeSeries<T> {
        self.series
    }
}

fn record<T: Real>(
    series: &mut TimeSeries<T>,
    cfg: &SolverConfig<T>,
    sample: NormSample<T>,
    state: &Field<T>,
) {
    if sample.tail.as_f64() > CONTAMINATION_LIMIT && series.status.is_clean() {
        series.status = RunStatus::Contaminated {
            first_time: sample.t.as_f64(),
        };
    }
    if cfg.store_snapshots {
        series.snapshots.push((sample.t, state.clone()));
    }
    series.samples.push(sample);
}

/// Integrates from `u0` to `cfg.t_end`. Blow-up ends the run early and is
/// reported through [`TimeSeries::status`]; only invalid input is an error.
pub fn run<T: Real>(u0: &Field<T>, cfg: &SolverConfig<T>) -> Result<TimeSeries<T>> {
    run_labelled(u0, cfg, "")
}

pub fn run_labelled<T: Real>(
    u0: &Field<T>,
    cfg: &SolverConfig<T>,
    label: &str,
) -> Result<TimeSeries<T>> {
    let mut sim = Simulation::new(u0.clone(), cfg.clone(), label)?;
    while !sim.is_finished() {
        match sim.advance() {
            Ok(_) => {}
            Err(ZkbError::BlowUp { .. }) => break,
            Err(e) => return Err(e),
        }
    }
    Ok(sim.finish())
}
