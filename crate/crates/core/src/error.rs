use thiserror::Error;

/// Errors raised by model construction, diagonalization and the Maxwell engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model specification: {0}")]
    InvalidSpec(String),

    #[error("inconsistent sector: {0}")]
    Sector(String),

    #[error("term `{term}` is not defined on a {basis} basis")]
    TermMismatch { term: String, basis: &'static str },

    #[error(
        "Hilbert-space dimension {dimension} exceeds the safety cap {cap}; \
         reduce the number of sites, the particle numbers or the boson cutoff"
    )]
    DimensionCap { dimension: usize, cap: usize },

    #[error("operators act on different bases")]
    BasisMismatch,

    #[error("matrix is not Hermitian: max|A - A^T| = {max_deviation:e}")]
    NonHermitian { max_deviation: f64 },

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error("observable `{0}` was not stored with the spectrum")]
    MissingObservable(String),

    #[error("temperature {temperature} is outside the validity range of a truncated spectrum (max {max})")]
    TemperatureOutOfRange { temperature: f64, max: f64 },

    #[error("axis error: {0}")]
    Axis(String),

    #[error("{what} did not converge after {iterations} iterations (last residual {residual:e})")]
    Convergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("grid point {coordinates} failed: {source}")]
    GridPoint {
        coordinates: String,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
