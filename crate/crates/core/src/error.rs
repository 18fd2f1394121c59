use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("bisection did not converge to {tolerance:e} within {iterations} iterations")]
    NonConvergence { iterations: usize, tolerance: f64 },

    #[error("no bound states: {0}")]
    Domain(String),

    #[error("level {n} exceeds n_max = {n_max:?} for beta = {beta}")]
    LevelOutOfRange { n: usize, n_max: Option<usize>, beta: f64 },

    #[error("functions live on different grids")]
    GridMismatch,

    #[error("degenerate norm: |<f,f>| = {0:e}")]
    DegenerateNorm(f64),

    #[error("finite differences are only available for real members (k = 0), got k = {0}")]
    ComplexMember(i64),

    #[error("measured ratio is not constant: spread {spread:e} exceeds {tolerance:e}")]
    NonConstant { spread: f64, tolerance: f64 },

    #[error("inadmissible target: {0}")]
    InadmissibleTarget(String),
}

pub type Result<T> = std::result::Result<T, Error>;
