use std::fmt;

use starres_core::Error;

/// Failures mapped onto the exit-code contract.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Unsupported(String),
    Output(String),
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 64,
            CliError::Unsupported(_) => 65,
            CliError::Internal(_) => 70,
            CliError::Output(_) => 73,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "malformed input: {m}"),
            CliError::Unsupported(m) => write!(f, "unsupported: {m}"),
            CliError::Output(m) => write!(f, "cannot write output: {m}"),
            CliError::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Unsupported(m) => CliError::Unsupported(m),
            e @ Error::Size { .. } => CliError::Unsupported(e.to_string()),
            e @ (Error::Validation(_) | Error::Domain(_) | Error::DimensionMismatch { .. } | Error::Serialization(_)) => {
                CliError::Input(e.to_string())
            }
            e => CliError::Internal(e.to_string()),
        }
    }
}
