use std::fmt;

/// Exit status for configuration and validation failures.
pub const EXIT_CONFIG: i32 = 2;
/// Exit status for numerical failures in the library.
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug)]
pub enum CliError {
    /// Bad input; the message names the offending field.
    Config { field: String, message: String },
    Numeric(helstrom::Error),
}

impl CliError {
    pub fn config(field: &str, message: impl Into<String>) -> Self {
        CliError::Config {
            field: field.to_string(),
            message: message.into(),
        }
    }

    /// A library error raised while validating user input.
    pub fn invalid(field: &str, e: helstrom::Error) -> Self {
        Self::config(field, format!("{}: {e}", e.name()))
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => EXIT_CONFIG,
            CliError::Numeric(_) => EXIT_NUMERIC,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config { field, message } => write!(f, "config error: {field}: {message}"),
            CliError::Numeric(e) => write!(f, "numerical error: {}: {e}", e.name()),
        }
    }
}

impl From<helstrom::Error> for CliError {
    fn from(e: helstrom::Error) -> Self {
        CliError::Numeric(e)
    }
}
