use std::path::PathBuf;

use thiserror::Error;

/// Failures of the CLI and harness layer.
#[derive(Debug, Error)]
pub enum AppError {
    #[error(transparent)]
    Model(#[from] rwfpp_core::Error),
    #[error("config: {0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("usage: {0}")]
    Usage(String),
}

impl AppError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        AppError::Io { path: path.into(), source }
    }

    /// Extra advice printed after the message, if any.
    pub fn hint(&self) -> Option<&'static str> {
        match self {
            AppError::Model(rwfpp_core::Error::MarginViolation { .. }) => {
                Some("hint: enlarge the window (--half-width) or drop --window to size it automatically")
            }
            _ => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, AppError>;
