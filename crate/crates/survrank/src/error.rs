use std::path::Path;

use survrank_core::Error as CoreError;

/// Failure of a command, split by exit status.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad input, flags or configuration. Exit status 1.
    #[error("{0}")]
    Validation(String),
    /// The inputs were valid but the analysis could not be completed. Exit status 2.
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }

    pub fn validation(message: impl Into<String>) -> Self {
        CliError::Validation(message.into())
    }

    pub fn runtime(message: impl Into<String>) -> Self {
        CliError::Runtime(message.into())
    }

    pub fn read(path: &Path, err: impl std::fmt::Display) -> Self {
        CliError::Validation(format!("cannot read {}: {err}", path.display()))
    }

    pub fn write(path: &Path, err: impl std::fmt::Display) -> Self {
        CliError::Runtime(format!("cannot write {}: {err}", path.display()))
    }
}

impl From<CoreError> for CliError {
    fn from(err: CoreError) -> Self {
        match err {
            CoreError::NoComparablePairs | CoreError::DegenerateTest(_) | CoreError::AllRunsFailed(_) => {
                CliError::Runtime(err.to_string())
            }
            _ => CliError::Validation(err.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
