//! Command-line harness around `zkb-core`: configuration files, run
//! directories with checksummed manifests, and the verification experiments
//! behind the `zkb` binary.
//!
//! Exit codes are a stable contract: 0 clean, 1 usage or I/O error,
//! 2 contaminated run, 3 blow-up, 4 failed verdict. See [`error::Exit`].

pub mod commands;
pub mod config;
pub mod error;
pub mod json;
pub mod manifest;
pub mod run;
pub mod series;

pub use config::{RunConfig, PAPER_REF};
pub use error::{Exit, HarnessError, Result};
pub use manifest::Manifest;
