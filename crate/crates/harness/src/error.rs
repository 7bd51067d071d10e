//! Harness errors and the process exit-code contract.

use std::path::{Path, PathBuf};

use thiserror::Error;
use zkb_core::ZkbError;

/// Process exit status. The numeric values are a stable contract.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Clean = 0,
    /// Usage, configuration or I/O error.
    Usage = 1,
    /// A run was flagged as contaminated by boundary effects.
    Contaminated = 2,
    BlowUp = 3,
    /// Everything ran, but a verification verdict failed.
    VerdictFailed = 4,
}

impl Exit {
    pub fn code(self) -> i32 {
        self as i32
    }

    /// Combines two outcomes, keeping the more severe one. Blow-up outranks
    /// contamination, which outranks a failed verdict.
    pub fn worst(self, other: Exit) -> Exit {
        fn rank(e: Exit) -> u8 {
            match e {
                Exit::Clean => 0,
                Exit::VerdictFailed => 1,
                Exit::Contaminated => 2,
                Exit::BlowUp => 3,
                Exit::Usage => 4,
            }
        }
        if rank(other) > rank(self) {
            other
        } else {
            self
        }
    }
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{0}")]
    Usage(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },

    #[error("checksum mismatch for {file}: manifest has {expected}, file has {actual}")]
    Checksum {
        file: String,
        expected: String,
        actual: String,
    },

    #[error(transparent)]
    Core(#[from] ZkbError),

    /// A stored run cannot be used for a verdict.
    #[error("run rejected: {reason}")]
    Rejected { reason: String, exit: Exit },
}

impl HarnessError {
    pub fn exit(&self) -> Exit {
        match self {
            HarnessError::Rejected { exit, .. } => *exit,
            HarnessError::Core(ZkbError::BlowUp { .. }) => Exit::BlowUp,
            _ => Exit::Usage,
        }
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn format(path: &Path, message: impl Into<String>) -> Self {
        HarnessError::Format {
            path: path.to_path_buf(),
            message: message.into(),
        }
    }
}

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes_are_stable() {
        assert_eq!(Exit::Clean.code(), 0);
        assert_eq!(Exit::Usage.code(), 1);
        assert_eq!(Exit::Contaminated.code(), 2);
        assert_eq!(Exit::BlowUp.code(), 3);
        assert_eq!(Exit::VerdictFailed.code(), 4);
    }

    #[test]
    fn worst_prefers_severity() {
        assert_eq!(Exit::Clean.worst(Exit::VerdictFailed), Exit::VerdictFailed);
        assert_eq!(Exit::Contaminated.worst(Exit::VerdictFailed), Exit::Contaminated);
        assert_eq!(Exit::Contaminated.worst(Exit::BlowUp), Exit::BlowUp);
        assert_eq!(Exit::BlowUp.worst(Exit::Clean), Exit::BlowUp);
    }
}
