use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("operator must have dimension at least 1")]
    Empty,

    #[error("operator has a non-finite entry")]
    NonFinite,

    #[error("operator is not Hermitian: max |A - A^dag| = {deviation:e}")]
    NotHermitian { deviation: f64 },

    #[error("operator is not positive semidefinite: min eigenvalue {min_eigenvalue:e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("spectrum [{min}, {max}] is not contained in [0, 1]")]
    NotAnEffect { min: f64, max: f64 },

    #[error("trace {trace} is not 1")]
    NotNormalized { trace: f64 },

    #[error("operator is not a projection: max |E^2 - E| = {deviation:e}")]
    NotProjection { deviation: f64 },

    #[error("expected a rank-1 projection, got rank {rank}")]
    NotRankOne { rank: usize },

    #[error("effects do not sum to the identity: max deviation {deviation:e}")]
    PomNotNormalized { deviation: f64 },

    #[error("matrix is not column-stochastic: column {column} {reason}")]
    NotStochastic { column: usize, reason: String },

    #[error("outcome has probability {probability:e}, too small to condition on")]
    ZeroProbability { probability: f64 },

    #[error("outcome labels do not form a product grid: {0}")]
    NotProductLabels(String),

    #[error("unknown outcome {0:?}")]
    UnknownOutcome(String),

    #[error("remainder effect is not positive: min eigenvalue {min_eigenvalue:e}, cell total exceeds identity")]
    RemainderNotPositive { min_eigenvalue: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("I/O error: {0}")]
    Io(String),

    #[error("malformed input: {0}")]
    Parse(String),
}

impl Error {
    /// Numerical failures (PSD violations, normalization drift, zero-probability
    /// conditioning) as opposed to malformed requests.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonFinite
                | Error::NotPositive { .. }
                | Error::NotAnEffect { .. }
                | Error::NotNormalized { .. }
                | Error::NotProjection { .. }
                | Error::PomNotNormalized { .. }
                | Error::ZeroProbability { .. }
                | Error::RemainderNotPositive { .. }
        )
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
