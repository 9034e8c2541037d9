use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] kgflow_core::Error),

    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        use kgflow_core::Error as E;
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(E::InvalidGrid(_) | E::InvalidOrder { .. } | E::InvalidArgument(_)) => 2,
            CliError::Core(E::StepFailure { .. }) => 1,
            CliError::Core(_) => 3,
            CliError::Io { .. } => 1,
        }
    }
}
