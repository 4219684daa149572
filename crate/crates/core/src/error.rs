use thiserror::Error;

/// Errors raised by the channel, distribution and solver routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid channel: field `{field}`: {reason}")]
    InvalidChannel { field: &'static str, reason: String },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("distribution is not feasible for the channel: {0}")]
    Infeasible(String),

    #[error("mean mismatch: E[S] = {mean}, expected {target}")]
    MeanMismatch { mean: f64, target: f64 },

    #[error("sign pattern violated: {0}")]
    SignPattern(String),

    #[error("degenerate channel: {0}")]
    Degenerate(String),

    #[error("solver did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
