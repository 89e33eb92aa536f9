use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite value in {what} at node {index}")]
    NonFinite { what: &'static str, index: usize },

    #[error("field length {got} does not match node count {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("diffusion coefficient is not symmetric positive definite at ({x}, {y}): {matrix:?}")]
    Coefficient { x: f64, y: f64, matrix: [[f64; 2]; 2] },

    #[error("Carleman weight undefined at ({x}, {y}): distance {distance} to x0 must exceed 1")]
    WeightDomain { x: f64, y: f64, distance: f64 },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("non-finite {what} at ({x}, {y})")]
    Evaluation { what: &'static str, x: f64, y: f64 },

    #[error("linear solver failed: {reason} (achieved relative residual {residual:e})")]
    LinearSolver { reason: String, residual: f64 },

    #[error("need at least {needed} points, got {got}")]
    InsufficientPoints { needed: usize, got: usize },

    #[error("unknown benchmark id `{0}`")]
    UnknownId(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{context}: {source}")]
    Json {
        context: String,
        #[source]
        source: serde_json::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse { path: PathBuf, line: usize, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
