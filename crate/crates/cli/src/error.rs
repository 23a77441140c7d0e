use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("invalid input: {0}")]
    Format(String),
    #[error(transparent)]
    Core(#[from] sympdd_core::Error),
    #[error("{failed} of {total} verification checks failed")]
    VerificationFailed { failed: usize, total: usize },
}

impl CliError {
    /// Process exit status: 1 for failed verification, 2 for bad input or parameters,
    /// 3 for I/O.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::VerificationFailed { .. } => 1,
            CliError::Usage(_) | CliError::Format(_) | CliError::Core(_) => 2,
            CliError::Io { .. } | CliError::Csv(_) => 3,
        }
    }

    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Self {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }
}
