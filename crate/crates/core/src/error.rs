use thiserror::Error;

/// Errors raised by the simulation and memory routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum QhamError {
    #[error("size error: {0}")]
    Size(String),
    #[error("{0} is not a unitary gate; run it through the shot executor instead")]
    UnsupportedHere(String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("degenerate weights: the weight matrix has no nonzero off-diagonal entry")]
    DegenerateWeights,
    #[error("rotation angle {phi} leaves [0, pi/2]; weights are not normalized")]
    NormalizationViolation { phi: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("not found: {0}")]
    NotFound(String),
    #[error("routing error: {0}")]
    Routing(String),
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },
}

pub type Result<T, E = QhamError> = std::result::Result<T, E>;

pub(crate) fn contract(msg: impl Into<String>) -> QhamError {
    QhamError::Contract(msg.into())
}
