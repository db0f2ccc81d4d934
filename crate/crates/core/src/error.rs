use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A shape parameter or other integer argument was out of range.
    #[error("{name} must be >= {min}, got {value}")]
    Domain {
        name: &'static str,
        min: u64,
        value: u64,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("tolerance not reached: error estimate {achieved:e} exceeds {requested:e} after {subdivisions} subdivisions")]
    ToleranceNotReached {
        achieved: f64,
        requested: f64,
        subdivisions: usize,
    },

    #[error("series budget exceeded: {needed} terms required, cap is {cap}")]
    SeriesBudgetExceeded { needed: u64, cap: u64 },

    #[error("c_nu uniform bound violated: observed {observed} > {bound}")]
    UniformBoundViolated { observed: f64, bound: f64 },

    #[error("undecided at precision limit after {depth} refinements")]
    Undecided { depth: usize },

    #[error("grid violates {0}")]
    GridViolatesRegime(&'static str),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("parse error: {0}")]
    Parse(String),
}
