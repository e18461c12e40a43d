//! Experiment runner for `thermolimit`: JSON configs in, typed result tables
//! out.

pub mod config;
pub mod experiments;
pub mod runner;
pub mod table;

use thermolimit::Error as CoreError;

/// Why a run stopped before writing its tables.
#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("resource cap exceeded: {0}")]
    TooLarge(String),
    #[error("output: {0}")]
    Output(#[from] table::TableError),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::TooLarge(_) => 3,
            Self::Output(_) => 1,
        }
    }
}

impl From<CoreError> for RunError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::TooLarge { .. } => Self::TooLarge(e.to_string()),
            other => Self::Config(other.to_string()),
        }
    }
}

pub(crate) fn config_err(msg: impl Into<String>) -> RunError {
    RunError::Config(msg.into())
}
