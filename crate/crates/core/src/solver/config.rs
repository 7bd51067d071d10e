use std::fmt;
use std::str::FromStr;

use crate::error::{Result, ZkbError};
use crate::scalar::Real;

/// Time integrator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    /// Fourth-order exponential Runge–Kutta (Cox–Matthews) on the diagonal
    /// linear symbol.
    #[default]
    ExponentialRk4,
    /// Crank–Nicolson on the linear part, second-order Adams–Bashforth on
    /// the nonlinearity.
    ImexCnab2,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::ExponentialRk4 => "exponential-RK4",
            Scheme::ImexCnab2 => "IMEX-CNAB2",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = ZkbError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "exponential-rk4" | "etdrk4" | "exp-rk4" => Ok(Scheme::ExponentialRk4),
            "imex-cnab2" | "cnab2" => Ok(Scheme::ImexCnab2),
            other => Err(ZkbError::Config(format!("unknown scheme: {other}"))),
        }
    }
}

/// How `2∫₀ᵗ‖u_x‖²ds` is accumulated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DissipationMode {
    /// Trapezoid rule over output samples.
    #[default]
    PerSnapshot,
    /// Trapezoid rule over every time step.
    PerStep,
}

impl DissipationMode {
    pub fn name(self) -> &'static str {
        match self {
            DissipationMode::PerSnapshot => "per_snapshot",
            DissipationMode::PerStep => "per_step",
        }
    }
}

impl FromStr for DissipationMode {
    type Err = ZkbError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "per_snapshot" | "snapshot" => Ok(DissipationMode::PerSnapshot),
            "per_step" | "step" => Ok(DissipationMode::PerStep),
            other => Err(ZkbError::Config(format!(
                "unknown dissipation accumulation: {other}"
            ))),
        }
    }
}

/// Default absorber peak rate, capped by `1/dt`.
pub const DEFAULT_ABSORBER: f64 = 100.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig<T> {
    pub dt: T,
    pub t_end: T,
    pub scheme: Scheme,
    /// 2/3 truncation in `x` and exact products in `y`.
    pub dealias: bool,
    /// Coefficient `c ∈ {0, 1}` of the convection term `c·u_x`.
    pub convection: T,
    /// Record a sample every this many steps.
    pub output_every: usize,
    pub dissipation: DissipationMode,
    /// Disables the quadratic term; the linear flow is then integrated
    /// exactly by the exponential scheme.
    pub nonlinear: bool,
    /// Keep a copy of the field at every output sample.
    pub store_snapshots: bool,
    /// Peak rate `ν_max` of the absorbing layer at `x = ±Lx`; zero disables
    /// it. See [`super::absorber`].
    pub absorber: T,
}

impl<T: Real> SolverConfig<T> {
    pub fn new(dt: T, t_end: T) -> Self {
        Self {
            dt,
            t_end,
            scheme: Scheme::default(),
            dealias: true,
            convection: T::zero(),
            output_every: 1,
            dissipation: DissipationMode::default(),
            nonlinear: true,
            store_snapshots: false,
            absorber: T::zero(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > T::zero()) {
            return Err(ZkbError::Config(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end.is_finite() && self.t_end >= T::zero()) {
            return Err(ZkbError::Config(format!(
                "t_end must be nonnegative, got {}",
                self.t_end
            )));
        }
        if self.output_every < 1 {
            return Err(ZkbError::Config("output_every must be >= 1".into()));
        }
        if self.convection != T::zero() && self.convection != T::one() {
            return Err(ZkbError::Config(format!(
                "convection must be 0 or 1, got {}",
                self.convection
            )));
        }
        if !(self.absorber.is_finite() && self.absorber >= T::zero()) {
            return Err(ZkbError::Config(format!(
                "absorber strength must be nonnegative, got {}",
                self.absorber
            )));
        }
        Ok(())
    }

    /// Largest absorber strength kept well inside the explicit stability
    /// region of both schemes for this `dt`.
    pub fn stable_absorber(dt: T) -> T {
        (T::one() / dt).min(T::lit(DEFAULT_ABSORBER))
    }

    /// Number of steps taken: `round(t_end / dt)`.
    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round().to_usize().unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = SolverConfig::<f64>::new(1e-3, 1.0);
        assert_eq!(c.scheme, Scheme::ExponentialRk4);
        assert!(c.dealias);
        assert_eq!(c.convection, 0.0);
        assert_eq!(c.steps(), 1000);
        c.validate().unwrap();
    }

    #[test]
    fn validation() {
        let mut c = SolverConfig::<f64>::new(0.0, 1.0);
        assert!(c.validate().is_err());
        c.dt = 0.1;
        c.t_end = -1.0;
        assert!(c.validate().is_err());
        c.t_end = 1.0;
        c.output_every = 0;
        assert!(c.validate().is_err());
        c.output_every = 1;
        c.convection = 0.5;
        assert!(c.validate().is_err());
    }

    #[test]
    fn scheme_names() {
        assert_eq!("exponential-RK4".parse::<Scheme>().unwrap(), Scheme::ExponentialRk4);
        assert_eq!("IMEX-CNAB2".parse::<Scheme>().unwrap(), Scheme::ImexCnab2);
        assert!("rk45".parse::<Scheme>().is_err());
        assert_eq!(Scheme::ImexCnab2.to_string(), "IMEX-CNAB2");
    }
}
