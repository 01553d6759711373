use thiserror::Error;

/// Errors raised by the analytic and Monte Carlo routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature did not converge: error estimate {err:e} above target {target:e} after {subdivisions} subdivisions")]
    NonConvergence {
        err: f64,
        target: f64,
        subdivisions: usize,
    },

    #[error("invalid decay class: polynomial order {0} must exceed 1")]
    InvalidDecay(f64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("numerical degeneracy: {0}")]
    NumericalDegeneracy(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
