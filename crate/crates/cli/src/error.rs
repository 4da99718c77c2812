use std::fmt;

use tcollapse::Error as CoreError;

/// Failures the front-end reports, grouped by exit status.
#[derive(Debug)]
pub enum CliError {
    /// Bad configuration; `key` names the offending entry. Exit 2.
    Config { key: String, reason: String },
    /// The solver or an analysis routine failed on valid input. Exit 1.
    Numerical(String),
    /// Reading or writing files failed. Exit 1.
    Io(String),
}

impl CliError {
    pub fn config(key: impl Into<String>, reason: impl Into<String>) -> Self {
        CliError::Config {
            key: key.into(),
            reason: reason.into(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Numerical(_) | CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config { key, reason } => {
                write!(f, "configuration error in `{key}`: {reason}")
            }
            CliError::Numerical(m) => write!(f, "numerical error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Config { key, reason } => CliError::config(key, reason),
            CoreError::InitialData(m) => CliError::config("init_xi", m),
            CoreError::Cfl { .. } => CliError::config("ref_h", e.to_string()),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
