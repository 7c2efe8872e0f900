use thiserror::Error;

/// Errors produced by the simulation toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("alpha({z}) = {value} lies outside the declared range [{a}, {b}]")]
    RangeViolation { z: f64, value: f64, a: f64, b: f64 },

    #[error("user-supplied alpha model does not declare a derivative-ratio bound M")]
    MissingBound,

    #[error("invalid alpha model: {0}")]
    InvalidModel(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("quadrature did not reach tolerance {tolerance:e} (estimated error {estimate:e})")]
    QuadratureFailure { tolerance: f64, estimate: f64 },

    #[error("expression error at byte {position}: {message}")]
    Expression { position: usize, message: String },

    #[error("point set needs at least two distinct x values")]
    TooFewPoints,

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("point set invariant violated{}: {message}", line.map(|l| format!(" on line {l}")).unwrap_or_default())]
    InvariantViolation { line: Option<usize>, message: String },

    #[error("operator is not contractive: contraction sum {sum} >= 1")]
    NotContractive { sum: f64 },

    #[error("Picard iteration did not converge after {iterations} iterations (last change {change:e})")]
    NoConvergence { iterations: usize, change: f64 },

    #[error("time {t} is outside the admissible range of [{t0}, {t1})")]
    OutOfInterval { t: f64, t0: f64, t1: f64 },

    #[error("truncation plan infeasible: {0}")]
    Infeasible(String),

    #[error("empty sample")]
    EmptySample,

    #[error("need at least 3 scales with nonzero increments, got {got}")]
    InsufficientScales { got: usize },

    #[error("all increments are zero over the requested scales")]
    AllIncrementsZero,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
