//! CLI-side error type with the exit-code mapping.

use std::path::Path;

/// Errors surfaced by the CLI: validation failures exit with 1, I/O and
/// parse failures with 2 (usage errors are handled by the argument parser
/// and exit with 64).
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn validation(msg: impl Into<String>) -> Self {
        CliError::Validation(msg.into())
    }

    pub fn parse(msg: impl Into<String>) -> Self {
        CliError::Parse(msg.into())
    }

    /// Parse error pinned to a file line (1-based).
    pub fn parse_at(path: &Path, line: usize, msg: impl AsRef<str>) -> Self {
        CliError::Parse(format!("{}:{line}: {}", path.display(), msg.as_ref()))
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Parse(_) | CliError::Io(_) => 2,
        }
    }
}

impl From<posbias_core::CoreError> for CliError {
    fn from(err: posbias_core::CoreError) -> Self {
        CliError::Validation(err.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(err: serde_json::Error) -> Self {
        CliError::Parse(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
