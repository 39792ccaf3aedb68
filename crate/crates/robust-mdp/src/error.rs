use thiserror::Error;

/// Errors produced by model I/O, validation and the solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("action {action} outside the admissible domain: {reason}")]
    OutOfDomain { action: f64, reason: String },

    #[error("incompatible policy: {0}")]
    IncompatiblePolicy(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("matrix game solve failed: {0}")]
    MatrixGame(String),

    #[error("did not converge within {iterations} iterations (residual {residual:.3e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("instance too large for enumeration: {0}")]
    TooLarge(String),

    #[error("evaluation action {action} coincides with knot {knot} (within 1e-12)")]
    KnotSingularity { action: f64, knot: f64 },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
