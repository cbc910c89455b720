use std::fmt;

/// Everything that makes the CLI exit with status 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    Parse { line: usize, column: usize, message: String },
    Validation { object: String, reason: String },
    UnknownCommand(String),
    Core { context: String, error: homotopy_core::Error },
    Io(String),
}

impl CliError {
    pub fn validation(object: impl Into<String>, reason: impl fmt::Display) -> Self {
        CliError::Validation { object: object.into(), reason: reason.to_string() }
    }

    pub fn core(context: impl Into<String>, error: homotopy_core::Error) -> Self {
        CliError::Core { context: context.into(), error }
    }

    /// Stable upper-case code used in machine reports.
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Parse { .. } => "PARSE_ERROR",
            CliError::Validation { .. } => "VALIDATION_ERROR",
            CliError::UnknownCommand(_) => "UNKNOWN_COMMAND",
            CliError::Core { .. } => "MODULE_ERROR",
            CliError::Io(_) => "IO_ERROR",
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Parse { line, column, message } => write!(f, "PARSE_ERROR({line}, {column}): {message}"),
            CliError::Validation { object, reason } => write!(f, "VALIDATION_ERROR({object}): {reason}"),
            CliError::UnknownCommand(c) => write!(f, "UNKNOWN_COMMAND: {c}"),
            CliError::Core { context, error } => write!(f, "{context}: {error}"),
            CliError::Io(m) => write!(f, "IO_ERROR: {m}"),
        }
    }
}

impl std::error::Error for CliError {}
