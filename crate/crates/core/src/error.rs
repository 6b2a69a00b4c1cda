use thiserror::Error;

/// Errors produced by the pdsphere pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("series of length {len} is too short for m={m}, tau={tau} (need {needed})")]
    SeriesTooShort {
        len: usize,
        m: usize,
        tau: usize,
        needed: usize,
    },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("persistence diagram has no points to estimate a density from")]
    EmptyDiagram,

    #[error("shape mismatch: expected {expected}, found {found}")]
    Shape { expected: usize, found: usize },

    #[error("malformed filtration: {0}")]
    Structural(String),

    #[error("value {value} outside allowed range: {what}")]
    Range { value: f64, what: &'static str },

    #[error("configuration mismatch: {0}")]
    Config(String),

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }
}
