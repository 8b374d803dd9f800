use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{origin}:{line}:{column}: {msg}")]
    Config { origin: String, line: usize, column: usize, msg: String },
    #[error("io: {0}")]
    Io(String),
    #[error("{0} check(s) failed")]
    CheckFailed(usize),
    #[error(transparent)]
    Core(#[from] coordline::Error),
}

impl CliError {
    /// 2 for usage and configuration, 3 for failed checks, 4 for resource caps.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::CheckFailed(_) | CliError::Core(coordline::Error::Precondition(_)) => 3,
            CliError::Core(coordline::Error::Resource { .. }) => 4,
            _ => 2,
        }
    }
}
