use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },

    #[error("unknown key `{key}` (line {line}, column {column}): {message}")]
    UnknownKey { key: String, line: usize, column: usize, message: String },

    #[error("value out of range for `{key}`: {message}")]
    OutOfRange { key: String, message: String },

    /// A library call failed; `operation` names it.
    #[error("{operation} failed: {source}")]
    Experiment {
        operation: String,
        #[source]
        source: nfkit::NfError,
    },

    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

impl CliError {
    pub fn category(&self) -> &'static str {
        match self {
            CliError::Syntax { .. } => "config-syntax",
            CliError::UnknownKey { .. } => "config-unknown-key",
            CliError::OutOfRange { .. } => "config-out-of-range",
            CliError::Experiment { source, .. } => source.category(),
            CliError::Io { .. } => "io",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Syntax { .. } | CliError::UnknownKey { .. } | CliError::OutOfRange { .. } => 2,
            CliError::Experiment { .. } => 3,
            CliError::Io { .. } => 4,
        }
    }

    pub fn io(path: impl AsRef<std::path::Path>, e: impl std::fmt::Display) -> Self {
        CliError::Io { path: path.as_ref().display().to_string(), message: e.to_string() }
    }
}

/// Attaches the failing operation's name to a library error.
pub trait Context<T> {
    fn op(self, operation: &str) -> Result<T, CliError>;
}

impl<T> Context<T> for nfkit::Result<T> {
    fn op(self, operation: &str) -> Result<T, CliError> {
        self.map_err(|source| CliError::Experiment { operation: operation.to_string(), source })
    }
}
