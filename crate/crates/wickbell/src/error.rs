use std::path::PathBuf;

use wickbell_core::Error as CoreError;

use crate::config::ConfigError;

/// Process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_GUARD: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("numerical guard `{guard}` tripped: {source}")]
    Guard { guard: &'static str, source: CoreError },
    #[error("invalid parameter: {0}")]
    Parameter(CoreError),
    #[error("numerical failure: {0}")]
    Numerical(CoreError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::Parameter(_) => EXIT_CONFIG,
            RunError::Guard { .. } => EXIT_GUARD,
            _ => EXIT_FAILURE,
        }
    }
}

impl From<CoreError> for RunError {
    fn from(e: CoreError) -> Self {
        let guard = match e {
            CoreError::TraceCollapse(_) => "trace-collapse",
            CoreError::GridEscape(_) => "grid-escape",
            CoreError::Overflow => "overflow",
            CoreError::InvalidParameter { .. } => return RunError::Parameter(e),
            _ => return RunError::Numerical(e),
        };
        RunError::Guard { guard, source: e }
    }
}
