use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("point lies outside dom h")]
    Infeasible,

    #[error("non-finite objective at iteration {iteration}")]
    NonFinite { iteration: usize },

    #[error("divergence at iteration {iteration}: f = {value}")]
    Diverged { iteration: usize, value: f64 },

    #[error("post-prox point is inconsistent with prox(pre-prox point): residual {residual:e}")]
    InconsistentProx { residual: f64 },

    #[error("momentum weight tau = {tau} outside [0, 1] at iteration {iteration}")]
    ThetaRule { iteration: usize, tau: f64 },

    #[error("adaptive while-loop exceeded {limit} doublings at iteration {iteration}")]
    RetryLimit { iteration: usize, limit: usize },

    #[error("iteration {requested} is beyond the trace ({available} completed)")]
    OutOfRange { requested: usize, available: usize },

    #[error("oracle kind mismatch: trace was produced by {found}, expected {expected}")]
    OracleMismatch { expected: String, found: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
