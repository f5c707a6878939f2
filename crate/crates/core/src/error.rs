use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error)]
pub enum ZlabError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid mismatch between operands")]
    GridMismatch,
    #[error("field contains non-finite values")]
    NonFinite,
    #[error("dyadic frequency {lambda} exceeds the ladder top {top}")]
    BeyondNyquist { lambda: f64, top: f64 },
    #[error("{0} is not a dyadic number")]
    NotDyadic(f64),
    #[error("space-time block needs at least {needed} time samples, got {got}")]
    BlockTooShort { needed: usize, got: usize },
    #[error("time {t} is not on the mesh with step {dt}")]
    OffMesh { t: f64, dt: f64 },
    #[error("time {t} lies beyond the noise horizon {horizon}")]
    BeyondHorizon { t: f64, horizon: f64 },
    #[error("frame mismatch: expected {expected}, found {found}")]
    FrameMismatch { expected: String, found: String },
    #[error("invalid noise model: {0}")]
    InvalidNoise(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid configuration at `{path}`: {message}")]
    Config { path: String, message: String },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed container: {0}")]
    Format(String),
    #[error("serialization error: {0}")]
    Serde(String),
}

pub type Result<T> = std::result::Result<T, ZlabError>;

impl From<serde_json::Error> for ZlabError {
    fn from(e: serde_json::Error) -> Self {
        ZlabError::Serde(e.to_string())
    }
}

impl From<csv::Error> for ZlabError {
    fn from(e: csv::Error) -> Self {
        ZlabError::Serde(e.to_string())
    }
}
