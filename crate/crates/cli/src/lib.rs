//! Command implementations behind the `witness` binary.

pub mod commands;
pub mod io;
pub mod report;

use std::fmt;

/// Exit code 0: success.
pub const EXIT_OK: u8 = 0;
/// Unreadable or malformed input.
pub const EXIT_PARSE: u8 = 2;
/// Input parsed but failed validation.
pub const EXIT_VALIDATION: u8 = 3;
/// An iterative method hit its budget; the report is still written.
pub const EXIT_NOT_CONVERGED: u8 = 4;
/// A precondition such as entanglement of the inputs does not hold.
pub const EXIT_PRECONDITION: u8 = 5;

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Parse(String),
    Validation(String),
    Precondition(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Parse(_) => EXIT_PARSE,
            Self::Validation(_) => EXIT_VALIDATION,
            Self::Precondition(_) => EXIT_PRECONDITION,
        }
    }

    pub fn context(self, what: &str) -> Self {
        match self {
            Self::Parse(m) => Self::Parse(format!("{what}: {m}")),
            Self::Validation(m) => Self::Validation(format!("{what}: {m}")),
            Self::Precondition(m) => Self::Precondition(format!("{what}: {m}")),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Parse(m) => write!(f, "parse error: {m}"),
            Self::Validation(m) => write!(f, "validation error: {m}"),
            Self::Precondition(m) => write!(f, "precondition failed: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<witness_core::Error> for CliError {
    fn from(e: witness_core::Error) -> Self {
        use witness_core::Error as E;
        match e {
            E::Dimension(_)
            | E::NotHermitian(_)
            | E::Trace(_)
            | E::NotPositive(_)
            | E::InvalidParameter(_)
            | E::InconsistentDelta(_) => Self::Validation(e.to_string()),
            E::NoNptWitness
            | E::NotWitnessable
            | E::NotBlockPositive(_)
            | E::NotEntangled
            | E::NoFamily
            | E::EmptySample => Self::Precondition(e.to_string()),
        }
    }
}
