use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] onebit_core::Error),
    #[error("cannot read {}: {source}", path.display())]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {}: {source}", path.display())]
    Write { path: PathBuf, source: std::io::Error },
    #[error("invalid config {}: {source}", path.display())]
    Config { path: PathBuf, source: serde_json::Error },
    #[error("{0}")]
    Invalid(String),
    #[error("CSV output failed: {0}")]
    Csv(#[from] csv::Error),
    #[error("output failed: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// Stable machine-readable category.
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.kind(),
            CliError::Read { .. } | CliError::Write { .. } | CliError::Io(_) => "io",
            CliError::Config { .. } => "config",
            CliError::Invalid(_) => "invalid-argument",
            CliError::Csv(_) => "csv",
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
