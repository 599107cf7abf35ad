use thiserror::Error;

/// Errors raised by the estimation and testing routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("ingest error: {0}")]
    Ingest(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("insufficient sample: {0}")]
    Sample(String),

    #[error("rank deficient design: column `{column}` is linearly dependent on earlier columns")]
    Rank { column: String },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("no long-run solution: 1 - sum of autoregressive coefficients = {0:e}")]
    SingularLongRun(f64),

    #[error("critical value lookup failed: {0}")]
    Lookup(String),
}

pub type Result<T> = std::result::Result<T, Error>;
