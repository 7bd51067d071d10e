//! Galerkin–Fourier pseudospectral solver for the Zakharov–Kuznetsov–Burgers
//! equation
//!
//! `u_t − u_xx + u u_x + u_xxx + u_xyy = 0`, `y ∈ (0, B)`, `u = 0` at `y = 0, B`,
//!
//! together with the weighted norms, energy balance, decay-rate fits and
//! closed-form decay constants used to check small-data exponential decay.
//!
//! All numerics are generic over [`Real`] (`f32` or `f64`); the `*64`
//! aliases below name the double-precision instantiations used by the CLI.

pub mod corpus;
pub mod diagnostics;
pub mod error;
pub mod field;
pub mod geometry;
pub mod scalar;
pub mod sine;
pub mod solver;
pub mod theory;

pub use diagnostics::{
    compute_j0, energy_residual, fit_decay_rate, tail_mass, weighted_inner, DecayFit, NormKind,
    NormSample, RunStatus, TimeSeries,
};
pub use error::{Result, ZkbError};
pub use field::{Field, Grid};
pub use geometry::{coupling_coefficient, eigenvalue, evaluate_mode, DirichletBasis, StripGeometry};
pub use scalar::Real;
pub use sine::SineTransform;
pub use solver::{
    linear_symbol, make_initial_field, nonlinear_term, run, step, InitialData, Scheme,
    Simulation, SolverConfig,
};
pub use theory::{
    check_smallness, constants_for_width, gamma_tradeoff, verify_gn, verify_steklov,
    verify_sup_lemma, InequalityCheck, Regime, TheoremConstants,
};

pub type Geometry64 = StripGeometry<f64>;
pub type Geometry32 = StripGeometry<f32>;
pub type Field64 = Field<f64>;
pub type Field32 = Field<f32>;
pub type Grid64 = Grid<f64>;
pub type SolverConfig64 = SolverConfig<f64>;
pub type TimeSeries64 = TimeSeries<f64>;
pub type InitialData64 = InitialData<f64>;
pub type TheoremConstants64 = TheoremConstants<f64>;
