use std::path::PathBuf;

use emosent::ErrorKind;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] emosent::Error),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// 2 usage / unreadable input, 3 bad data, 4 numeric failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } => 2,
            CliError::Core(e) => match e.kind() {
                ErrorKind::Io => 2,
                ErrorKind::Data => 3,
                ErrorKind::Numeric => 4,
            },
            CliError::Json(_) | CliError::Csv(_) => 3,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
