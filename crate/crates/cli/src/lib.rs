//! Command implementations and the HTTP play service behind the `zdungeon` binary.

pub mod assets;
pub mod commands;
pub mod service;

use thiserror::Error;

/// Failure of a command, mapped to the process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Generation(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Generation(_) => 3,
        }
    }
}
