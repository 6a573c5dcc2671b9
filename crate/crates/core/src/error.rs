use thiserror::Error;

/// Errors raised by the library. Infeasibility and "not FC" are values, not errors.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("universe size mismatch: {left} vs {right}")]
    UniverseMismatch { left: usize, right: usize },

    #[error("universe size {n} exceeds the supported maximum of {max}")]
    UniverseTooLarge { n: usize, max: usize },

    #[error("element {element} lies outside the universe of size {n}")]
    ElementOutOfRange { element: usize, n: usize },

    #[error("{0}")]
    Usage(String),

    #[error("malformed family: {0}")]
    Parse(String),

    #[error("weights are not a weight function on the union of the family")]
    NotWeightFunction,

    #[error("arithmetic overflow while computing {0}")]
    Overflow(&'static str),

    #[error("linear objective is unbounded below")]
    Unbounded,

    #[error("classification did not converge within {0} iterations")]
    IterationCap(usize),

    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),

    #[error("certificate schema violation: {0}")]
    Schema(String),

    #[error("internal inconsistency: {0}")]
    Internal(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Schema(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
