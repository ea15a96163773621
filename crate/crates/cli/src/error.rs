use std::fmt;
use std::process::ExitCode;

use qss_core::QssError;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or preconditions; exit 2.
    Usage(String),
    /// A numerical invariant failed; exit 3.
    Numerical(String),
    /// Could not write the outputs; exit 1.
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Usage(_) => ExitCode::from(2),
            CliError::Numerical(_) => ExitCode::from(3),
            CliError::Io(_) => ExitCode::from(1),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<QssError> for CliError {
    fn from(e: QssError) -> Self {
        match e {
            QssError::InvalidArgument(_)
            | QssError::InvalidDimension(_)
            | QssError::BudgetExceeded(_)
            | QssError::EmptySiftedSet => CliError::Usage(e.to_string()),
            QssError::InvalidState(_)
            | QssError::ZeroProbabilityBranch(_)
            | QssError::InternalInconsistency(_) => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
