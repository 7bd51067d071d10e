//! Time integration of the truncated Galerkin system
//!
//! `∂t ĝ_j = σ(k, λ_j) ĝ_j − P_j(u u_x)`,
//!
//! one equation per `y` mode, Fourier-represented in `x`.

pub mod absorber;
pub mod config;
pub mod initial;
pub mod integrator;
pub mod linear;
pub mod nonlinear;
pub mod phi;
pub mod run;

pub use absorber::absorber_profile;
pub use config::{DissipationMode, Scheme, SolverConfig, DEFAULT_ABSORBER};
pub use initial::{make_initial_field, InitialData, InitialField};
pub use integrator::{step, Stepper};
pub use linear::linear_symbol;
pub use nonlinear::{nonlinear_term, NonlinearOperator};
pub use run::{run, run_labelled, Simulation};
