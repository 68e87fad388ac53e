use thiserror::Error;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("too few measurements: m = {m} but the scheme needs at least c = {c} (one per sub-signal)")]
    TooFewMeasurements { m: usize, c: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("refusing to densify an operator with n = {n} > {limit}")]
    DensifyRefused { n: usize, limit: usize },

    #[error("exhaustive support enumeration too large: C({n}, {s}) supports")]
    EnumerationTooLarge { n: usize, s: usize },

    #[error("rejected input: {0}")]
    RejectedInput(String),

    #[error("correlation undefined: {0} has zero variance")]
    UndefinedCorrelation(&'static str),

    #[error("numerically singular least-squares refit at support size {support}")]
    NumericallySingular {
        support: usize,
        partial: Box<crate::recon::ReconResult>,
    },

    #[error("solver diverged: residual grew from {initial:.3e} to {current:.3e}")]
    Diverged { initial: f64, current: f64 },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit code used by the CLI: 2 for bad configuration or input, 3 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidConfig(_)
            | Error::TooFewMeasurements { .. }
            | Error::Dimension { .. }
            | Error::DensifyRefused { .. }
            | Error::EnumerationTooLarge { .. }
            | Error::RejectedInput(_)
            | Error::Parse(_)
            | Error::Json(_) => 2,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
