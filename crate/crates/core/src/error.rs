use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ShearError {
    #[error("dilation parameter a must be nonzero and finite")]
    ZeroDilation,
    #[error("non-finite group parameter")]
    NonFinite,
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("derivative or moment order {order} exceeds the cap {max}")]
    OrderTooHigh { order: usize, max: usize },
    #[error("invalid band edges: {0}")]
    BadBandEdges(String),
    #[error("quadrature did not converge: {0}")]
    QuadratureNotConverged(String),
    #[error("generator pair is not admissible: {0}")]
    NotAdmissible(String),
    #[error("input is degenerate: {0}")]
    DegenerateInput(String),
    #[error("field is not in the Lizorkin surrogate class (moment max {max_abs:.3e})")]
    NotLizorkin { max_abs: f64 },
    #[error("spectral division is singular: |f^| = {magnitude:.3e} on the guarded set")]
    SingularDivision { magnitude: f64 },
    #[error("frequency coverage gap: {uncovered_fraction:.3e} of the spectral energy is not covered")]
    CoverageGap { uncovered_fraction: f64 },
    #[error("parameter grid too coarse: {0}")]
    GridTooCoarse(String),
    #[error("no growth bound with exponents <= {cap}")]
    NoBoundWithinCap { cap: u32 },
    #[error("too few samples: {got} (need {need})")]
    TooFewSamples { got: usize, need: usize },
    #[error("distribution has {0} terms, the limit is 64")]
    TooManyTerms(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, ShearError>;
