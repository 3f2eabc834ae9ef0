use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("grid {nlat}x{nlon} is too coarse for truncation T={truncation} (need nlat >= {min_nlat}, nlon >= {min_nlon})")]
    Resolution {
        truncation: usize,
        nlat: usize,
        nlon: usize,
        min_nlat: usize,
        min_nlon: usize,
    },

    #[error("degenerate case: {0}")]
    Degenerate(String),

    #[error("topology error: {0}")]
    Topology(String),

    #[error("solution is singular at t = 0")]
    SingularTime,

    #[error("stream-function relation is singular for nu = 0")]
    SingularRelation,

    #[error("missing capability: {0}")]
    Capability(String),

    #[error("ill-conditioned sample matrix: {0}")]
    IllConditioned(String),

    #[error("invalid parameters: constraint `{0}` violated")]
    InvalidParams(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("solver blew up at step {step}")]
    BlowUp { step: usize },

    #[error("phase undefined: tracked coefficient ({n},{m}) vanishes")]
    UndefinedPhase { n: usize, m: usize },

    #[error("validity error: {0}")]
    Validity(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
