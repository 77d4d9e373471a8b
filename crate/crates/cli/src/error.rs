use thiserror::Error;

/// A failed run, classified for the process exit code. Command-line usage
/// errors caught by the parser itself also exit with 2.
#[derive(Debug, Error)]
pub enum CliError {
    /// Invalid flag values or flag combinations (exit 2).
    #[error("{0}")]
    Argument(String),
    /// Invalid settings from the config file or the merged configuration
    /// (exit 3).
    #[error("{0}")]
    Config(String),
    /// Filesystem failures and unreadable or corrupt files (exit 4).
    #[error("{0}")]
    Io(String),
    /// Numerical failures: solver breakdowns, divergent training, failed
    /// validation checks (exit 5).
    #[error("{0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Argument(_) => 2,
            CliError::Config(_) => 3,
            CliError::Io(_) => 4,
            CliError::Numeric(_) => 5,
        }
    }
}

/// Shorthand for an [`CliError::Io`] with a context prefix.
pub fn io_error(context: impl std::fmt::Display, cause: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{context}: {cause}"))
}

/// Shorthand for a [`CliError::Numeric`] with a context prefix.
pub fn numeric_error(context: impl std::fmt::Display, cause: impl std::fmt::Display) -> CliError {
    CliError::Numeric(format!("{context}: {cause}"))
}
