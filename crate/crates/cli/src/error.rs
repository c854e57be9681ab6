use shearkit_core::ShearError;
use thiserror::Error;

/// Failures of the command-line layer, wrapping library errors.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("bad magic: expected {expected:?}, found {found:?}")]
    BadMagic { expected: String, found: String },
    #[error("unsupported format version {found} (this build reads {expected})")]
    VersionMismatch { found: u32, expected: u32 },
    #[error("malformed file: {0}")]
    Malformed(String),
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
    #[error("invalid distribution: {0}")]
    DistributionInvalid(String),
    #[error("bad CSV row: {0}")]
    CsvParse(String),
    #[error("{what} = {value:.3e} exceeds the tolerance {tol:.1e}")]
    ToleranceExceeded { what: &'static str, value: f64, tol: f64 },
    #[error("{0} acceptance criteria failed")]
    SelftestFailed(usize),
    #[error(transparent)]
    Core(#[from] ShearError),
}

pub type Result<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        CliError::Io { path: path.as_ref().display().to_string(), source }
    }

    /// Process exit code; see [`EXIT_CODES`].
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => 3,
            CliError::BadMagic { .. } => 4,
            CliError::VersionMismatch { .. } => 5,
            CliError::Malformed(_) => 6,
            CliError::ConfigInvalid(_) => 7,
            CliError::DistributionInvalid(_) => 8,
            CliError::CsvParse(_) => 9,
            CliError::ToleranceExceeded { .. } => 10,
            CliError::SelftestFailed(_) => 11,
            CliError::Core(e) => match e {
                ShearError::ZeroDilation => 20,
                ShearError::NonFinite => 21,
                ShearError::GridMismatch(_) => 22,
                ShearError::InvalidGrid(_) => 23,
                ShearError::OrderTooHigh { .. } => 24,
                ShearError::BadBandEdges(_) => 25,
                ShearError::QuadratureNotConverged(_) => 26,
                ShearError::NotAdmissible(_) => 27,
                ShearError::DegenerateInput(_) => 28,
                ShearError::NotLizorkin { .. } => 29,
                ShearError::SingularDivision { .. } => 30,
                ShearError::CoverageGap { .. } => 31,
                ShearError::GridTooCoarse(_) => 32,
                ShearError::NoBoundWithinCap { .. } => 33,
                ShearError::TooFewSamples { .. } => 34,
                ShearError::TooManyTerms(_) => 35,
                ShearError::InvalidArgument(_) => 36,
            },
        }
    }
}

/// Exit code table shown by `--help`.
pub const EXIT_CODES: &str = "\
Exit codes:
   0  success
   2  usage error
   3  I/O error
   4  bad magic in a .fld/.cvol file
   5  unsupported file version
   6  malformed or truncated file
   7  invalid configuration
   8  invalid distribution document
   9  unparsable CSV row
  10  a reported defect exceeds its configured tolerance
  11  selftest: at least one acceptance criterion failed
  20  zero dilation          21  non-finite parameter
  22  grid mismatch          23  invalid grid
  24  order too high         25  bad band edges
  26  quadrature not converged
  27  generator not admissible
  28  degenerate input       29  field not Lizorkin
  30  singular division      31  frequency coverage gap
  32  parameter grid too coarse
  33  no growth bound within cap
  34  too few samples        35  too many distribution terms
  36  invalid argument";
