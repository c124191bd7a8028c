//! Failures of a run and their exit codes.

use std::fmt;

use qselberg::QsError;

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or a parameter set outside the domain.
    Invalid(String),
    /// A numerical routine failed.
    Numeric(QsError),
    /// Reading or writing a file failed.
    Io(String),
    /// At least one check failed; the reports were written.
    ChecksFailed { failed: usize, total: usize },
}

impl CliError {
    /// 1 for failed checks (including truncation failures), 2 for invalid
    /// or singular parameters, 3 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::ChecksFailed { .. } | CliError::Numeric(QsError::Truncation { .. }) => 1,
            CliError::Invalid(_) | CliError::Numeric(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Invalid(m) => write!(f, "invalid input: {m}"),
            CliError::Numeric(e) => write!(f, "{e}"),
            CliError::Io(m) => write!(f, "I/O error: {m}"),
            CliError::ChecksFailed { failed, total } => write!(f, "{failed} of {total} checks failed"),
        }
    }
}

impl From<QsError> for CliError {
    fn from(e: QsError) -> Self {
        CliError::Numeric(e)
    }
}
