//! The exit-code contract: 0 success, 1 usage error, 2 data error,
//! 3 degenerate input.

use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Usage(String),
    Data(String),
    Degenerate(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Degenerate(_) => 3,
        }
    }

    /// Maps library errors onto the contract. Guards that only flag
    /// values can trip are usage errors. Whether a too-short input is
    /// a flag problem (simulate, oracle) or a file problem (everything
    /// else) depends on the caller, so it is passed in.
    pub fn from_library(err: kemeny::Error, length_is_usage: bool) -> Self {
        use kemeny::Error;
        match err {
            Error::Degenerate(_) => CliError::Degenerate(err.to_string()),
            Error::EnumerationTooLarge { .. } | Error::InsufficientReplicates { .. } => {
                CliError::Usage(err.to_string())
            }
            Error::TooShort { .. } if length_is_usage => CliError::Usage(err.to_string()),
            _ => CliError::Data(err.to_string()),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Data(msg) | CliError::Degenerate(msg) => {
                f.write_str(msg)
            }
        }
    }
}

impl std::error::Error for CliError {}
