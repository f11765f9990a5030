use thiserror::Error;

/// Failures of a run, each mapped to its own process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Invalid configuration, bracket, tensor or a failed identity check.
    #[error("validation failed: {0}")]
    Validation(String),
    /// The orbit optimizer stopped on its iteration budget.
    #[error("optimizer budget exhausted: {0}")]
    Budget(String),
    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
    /// Malformed command line.
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn io(path: &std::path::Path, err: impl std::fmt::Display) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            message: err.to_string(),
        }
    }

    /// 1 validation, 2 optimizer budget, 3 i/o, 4 usage.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Budget(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Usage(_) => 4,
        }
    }
}

impl From<homlab_core::Error> for CliError {
    fn from(e: homlab_core::Error) -> Self {
        CliError::Validation(e.to_string())
    }
}
