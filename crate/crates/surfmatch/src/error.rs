use std::io;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}:{line}: {msg}")]
    Parse { path: String, line: usize, msg: String },
    #[error(transparent)]
    Core(#[from] surfmatch_core::Error),
    #[error("io error: {0}")]
    Io(#[from] io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl CliError {
    /// Process exit code: 1 for bad input, 2 for a broken invariant.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if !e.is_usage() => 2,
            CliError::Internal(_) => 2,
            _ => 1,
        }
    }
}
