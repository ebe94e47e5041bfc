//! CLI error type and its mapping onto process exit codes.

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Model(#[from] paik_core::Error),

    #[error("config error: {0}")]
    Config(String),

    #[error("invalid flag: {0}")]
    Flag(String),

    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{failed} of {total} validation checks failed")]
    ValidationFailed { failed: usize, total: usize },
}

pub type Result<T> = std::result::Result<T, CliError>;

impl CliError {
    /// 2 for configuration problems, 3 for numerical singularities, 1 for
    /// everything else.
    pub fn exit_code(&self) -> u8 {
        use paik_core::Error as E;
        match self {
            CliError::Config(_) | CliError::Flag(_) => 2,
            CliError::Model(E::Config(_) | E::InvalidParameter { .. }) => 2,
            CliError::Model(E::Singular { .. }) => 3,
            _ => 1,
        }
    }
}
