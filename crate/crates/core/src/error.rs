use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("non-finite matrix entry")]
    NonFinite,

    #[error("state vector is not normalized (norm² = {0})")]
    NotNormalized(f64),

    #[error("not a density matrix: {0}")]
    NotState(String),

    #[error("matrix is not unitary (deviation {0:.3e})")]
    NotUnitary(f64),

    #[error("map is not CPTP: {0}")]
    NotCptp(String),

    #[error("eigendecomposition did not converge after {sweeps} sweeps (off-diagonal norm {residual:.3e})")]
    EigNoConvergence { sweeps: usize, residual: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("semidefinite program failed: {0}")]
    Solver(String),

    #[error("semidefinite program is infeasible: {0}")]
    Infeasible(String),

    #[error("resource below simulation cost: need cosdit rank at least {needed}, got {given}")]
    ResourceBelowCost { needed: usize, given: usize },

    #[error("malformed descriptor at position {position}: {message}")]
    Descriptor { position: usize, message: String },

    #[error("json: {0}")]
    Json(String),

    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
