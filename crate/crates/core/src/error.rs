use alloc::string::String;

/// Errors produced by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("divergent measure: {0}")]
    DivergentMeasure(String),
    #[error("singular operator: {0}")]
    SingularOperator(String),
    #[error("rank deficiency: basis element {index} is linearly dependent under the measure")]
    RankDeficient { index: usize },
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
