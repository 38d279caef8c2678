use thiserror::Error;

/// Errors raised by every fallible operation in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("validation error: {0}")]
    Validation(String),
    #[error("unresolved region reference: {0}")]
    Reference(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("unsupported domain: {0}")]
    UnsupportedDomain(String),
    #[error("construction failed: {0}")]
    Construction(String),
    #[error("failed to bracket the norm after {iterations} expansions")]
    Bracketing { iterations: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
