//! Command-line front end for `meancut`: evaluation, comparison, fits and
//! verification suites, all emitting CSV.

pub mod app;
pub mod commands;
pub mod format;
pub mod grid;
pub mod row;

pub use grid::Grid;
pub use row::EvalRow;

/// Exit status for a run whose checks all passed.
pub const EXIT_PASS: i32 = 0;
/// Exit status for a verification or numeric failure.
pub const EXIT_FAIL: i32 = 1;
/// Exit status for invalid arguments.
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Numeric(meancut::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Numeric(_) | CliError::Io(_) => EXIT_FAIL,
        }
    }
}

impl From<meancut::Error> for CliError {
    fn from(e: meancut::Error) -> Self {
        use meancut::Error::*;
        match e {
            Domain { .. }
            | InvalidArgument(_)
            | GridViolatesRegime(_)
            | InvalidGrid(_)
            | Parse(_) => CliError::Usage(e.to_string()),
            other => CliError::Numeric(other),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}
