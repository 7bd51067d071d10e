//! One module per subcommand. Each returns the exit status to report, or
//! an error that maps to one through [`crate::error::HarnessError::exit`].

pub mod cdep;
pub mod constants;
pub mod fit;
pub mod simulate;
pub mod sweep;
pub mod verify;
