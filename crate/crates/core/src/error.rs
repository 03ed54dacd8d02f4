use thiserror::Error;

/// Errors raised by the simulation core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid pseudospin symbol {0:?} (expected one of u, d, +, -)")]
    InvalidSymbol(char),

    #[error("chain length {0} not supported (need even L with 2 <= L <= 63)")]
    InvalidLength(usize),

    #[error("{what} index {index} out of range 1..={max}")]
    OutOfRange { what: &'static str, index: usize, max: usize },

    #[error("fragment exceeds capacity: more than {limit} states reachable")]
    Capacity { limit: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("signal amplitude {0} outside [-1, 1]")]
    SignalOutOfRange(f64),

    #[error("staggered amplitude h must be nonzero")]
    ZeroStaggeredAmplitude,

    #[error("pseudospin chain length N = {0} must be even and positive")]
    OddChain(usize),

    #[error("signal condition violated in sector {sector}: epsilon * t' = {value} not in [-pi, 0]")]
    SignalCondition { sector: usize, value: f64 },

    #[error("Chebyshev expansion did not converge within order {max_order}")]
    ChebyshevNotConverged { max_order: usize },

    #[error("norm drift {drift:e} exceeds limit {limit:e}")]
    NormDrift { drift: f64, limit: f64 },

    #[error("dense path limited to dimension {limit}, got {dim}")]
    TooLargeForDense { dim: usize, limit: usize },

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error("QSP condition '{condition}' violated: residual {residual:e}")]
    QspCondition { condition: &'static str, residual: f64 },

    #[error("factorization needs at least two non-wall regions, found {0}")]
    TooFewRegions(usize),

    #[error("pseudospin {site} is a fracton; the free-fermion description needs a spin-only string")]
    Fracton { site: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
