use std::path::PathBuf;

use thiserror::Error;

/// Errors surfaced to the user, mapped onto the exit-code contract:
/// 1 validation, 2 self-check failure, 3 I/O.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("self-check failed: {0}")]
    SelfCheck(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::SelfCheck(_) => 2,
            CliError::Io { .. } => 3,
        }
    }

    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }
}

impl From<ctrw_core::SimError> for CliError {
    fn from(e: ctrw_core::SimError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<ctrw_core::ModelError> for CliError {
    fn from(e: ctrw_core::ModelError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<ctrw_core::JumpLawError> for CliError {
    fn from(e: ctrw_core::JumpLawError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<ctrw_core::SpectralError> for CliError {
    fn from(e: ctrw_core::SpectralError) -> Self {
        CliError::Validation(e.to_string())
    }
}
