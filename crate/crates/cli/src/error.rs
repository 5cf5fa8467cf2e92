use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] miocoh::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("{0}")]
    Usage(String),

    #[error("thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

impl CliError {
    /// Errors that are answers rather than failures: the requested operation does not exist.
    pub fn is_infeasible(&self) -> bool {
        matches!(self, CliError::Core(miocoh::Error::Infeasible(_) | miocoh::Error::ResourceBelowCost { .. }))
    }
}
