use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ZkbError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("shape error: expected {expected}, got {got}")]
    Shape { expected: String, got: String },

    #[error("grid mismatch: fields live on different grids")]
    GridMismatch,

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("support too wide for truncation: tail mass {tail:e} exceeds {limit:e}")]
    SupportTooWide { tail: f64, limit: f64 },

    #[error("blow-up at t = {t}: l2 = {l2:e}")]
    BlowUp { t: f64, l2: f64 },

    #[error("invalid solver config: {0}")]
    Config(String),

    #[error("fit error: {0}")]
    Fit(String),

    #[error("empty series")]
    EmptySeries,
}

pub type Result<T, E = ZkbError> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> ZkbError {
    ZkbError::Domain(msg.into())
}
