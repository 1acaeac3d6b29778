use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = LaatError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum LaatError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid point cloud: {0}")]
    InvalidCloud(String),

    #[error("no active points remain after removing neighborhoods smaller than {min_size}")]
    EmptyAfterFilter { min_size: usize },

    #[error("zero-length jump between points {from} and {to}")]
    DegenerateJump { from: usize, to: usize },

    #[error("all local eigenvalues vanish at point {0}")]
    DegenerateNeighborhood(usize),

    #[error("point {0} is inactive or has no neighbors")]
    InactivePoint(usize),

    #[error("no eligible start points: {0}")]
    Placement(String),

    #[error("unknown attribute channel `{0}`")]
    UnknownAttribute(String),

    #[error("neighborhood graph has {components} connected components; analyse each component separately")]
    MultipleComponents { components: usize },

    #[error("power iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("no points survive threshold {0}")]
    NoSurvivors(f64),

    #[error("length mismatch: {what} has {got} entries, expected {expected}")]
    LengthMismatch {
        what: &'static str,
        got: usize,
        expected: usize,
    },

    #[error("malformed file {path}: {reason}")]
    Format { path: PathBuf, reason: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl LaatError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        LaatError::InvalidArgument(msg.into())
    }
}
