use std::fmt;

use dualsteiner_core::Error;

use crate::json::to_json;

/// Process exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitCode {
    Ok = 0,
    Input = 2,
    Dimension = 3,
    /// Refusal or a negative verdict.
    Negative = 4,
    Invariant = 5,
}

impl ExitCode {
    pub fn code(self) -> i32 {
        self as i32
    }
}

/// A failed command: its exit code, a message for stderr and, for refusals,
/// the verdict for stdout.
#[derive(Debug)]
pub struct CliError {
    pub code: ExitCode,
    pub message: String,
    pub stdout: Option<String>,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError { code: ExitCode::Input, message: message.into(), stdout: None }
    }

    pub fn invariant(message: impl Into<String>) -> Self {
        CliError { code: ExitCode::Invariant, message: message.into(), stdout: None }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let message = e.to_string();
        match e {
            Error::InvalidInput(_) | Error::Json(_) | Error::ContainmentViolated(_) => CliError::input(message),
            Error::DimensionMismatch { .. } => CliError { code: ExitCode::Dimension, message, stdout: None },
            Error::Refusal { reason, verdict } => {
                let stdout = match verdict {
                    Some(v) => to_json(&*v),
                    None => to_json(&serde_json::json!({ "status": "REFUSED", "reason": reason })),
                };
                CliError { code: ExitCode::Negative, message, stdout: Some(stdout) }
            }
            Error::BudgetExhausted(_) => CliError { code: ExitCode::Negative, message, stdout: None },
            Error::InvariantViolation(_) => CliError::invariant(message),
        }
    }
}
