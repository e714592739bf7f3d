use railroute_core::irl::IrlError;
use railroute_core::nav::NavError;
use railroute_core::terrain::TerrainError;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {message}", path.display())]
    Format { path: PathBuf, message: String },
    #[error("no path: {0}")]
    NoPath(String),
    #[error("{}: {message}", path.display())]
    Model { path: PathBuf, message: String },
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } | CliError::Format { .. } => 2,
            CliError::NoPath(_) => 3,
            CliError::Model { .. } => 4,
            CliError::Internal(_) => 1,
        }
    }

    pub fn io(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
        move |source| CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn format(path: &Path, message: impl ToString) -> CliError {
        CliError::Format {
            path: path.to_path_buf(),
            message: message.to_string(),
        }
    }
}

impl From<NavError> for CliError {
    fn from(e: NavError) -> Self {
        match e {
            NavError::ExtensionOutOfBounds { clamped } => CliError::Usage(format!(
                "extension leaves the tile; nearest in-bounds cell is {clamped}"
            )),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<TerrainError> for CliError {
    fn from(e: TerrainError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<IrlError> for CliError {
    fn from(e: IrlError) -> Self {
        if e.is_no_path() {
            return CliError::NoPath(e.to_string());
        }
        match e {
            IrlError::Nav(n) => n.into(),
            other => CliError::Usage(other.to_string()),
        }
    }
}
