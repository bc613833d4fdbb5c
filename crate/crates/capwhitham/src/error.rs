//! Error type shared by every module of the crate.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the library can report.
///
/// Variants are grouped by the class of failure they signal; the CLI maps
/// each class to its own exit code (see [`Error::exit_code`]).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument left the mathematical domain of a function.
    #[error("domain error: {0}")]
    Domain(String),
    /// A complex box touches the branch cut of the principal square root.
    #[error("complex box meets the branch cut (-inf, 0]")]
    BranchCut,
    /// A box is too wide for the requested enclosure; the caller should split it.
    #[error("box too wide for enclosure, subdivide")]
    SubdivideRequest,
    /// An inverse multiplier was requested without a verified strip certificate.
    #[error("inverse multiplier requested without a verified strip certificate")]
    MissingStripCertificate,
    /// The Gram matrix of the trace functionals could not be inverted rigorously.
    #[error("trace Gram matrix is not certifiably invertible")]
    SingularTraceGram,
    /// Newton's method did not reach the requested tolerance.
    #[error("Newton iteration did not converge after {iterations} steps (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    /// A dense floating-point solve or inversion failed.
    #[error("singular Jacobian in dense solve")]
    SingularJacobian,
    /// A standing assumption on the approximate data is violated.
    #[error("assumption violated: {0}")]
    AssumptionViolated(String),
    /// A subdivision-based verification could not certify the claim.
    #[error("verification failed: {0}")]
    VerificationFailed(String),
    /// No admissible threshold satisfies the side conditions.
    #[error("threshold condition unsatisfied: {0}")]
    ThresholdUnsatisfied(String),
    /// The monotone tail argument for a symbol minimum could not be certified.
    #[error("tail minimum not certified: {0}")]
    TailMinimumUnverified(String),
    /// The radii polynomial has no certified negative region.
    #[error("no admissible radius: {0}")]
    NoAdmissibleRadius(String),
    /// Existence holds but the regularity criterion failed.
    #[error("regularity not verified: {0}")]
    RegularityUnverified(String),
    /// The eigenpair bounds are too large to close the enclosure.
    #[error("eigenpair enclosure failed: {0}")]
    EnclosureFailed(String),
    /// The certified lower bound on the shifted operator is not positive.
    #[error("inverse floor is not positive at shift {shift} (C <= {floor:e})")]
    FloorNonpositive { shift: f64, floor: f64 },
    /// The injectivity sweep could not advance.
    #[error("coverage stalled, uncovered interval [{lo}, {hi}]")]
    CoverageStalled { lo: f64, hi: f64 },
    /// Operand sizes or half-periods do not agree.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    /// Invalid configuration.
    #[error("configuration error: {0}")]
    Config(String),
    /// Malformed input artifact.
    #[error("parse error: {0}")]
    Parse(String),
    /// Filesystem failure.
    #[error("I/O error: {0}")]
    Io(String),
}

impl Error {
    /// Process exit code for the CLI, one per failure class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Parse(_) | Error::DimensionMismatch(_) => 2,
            Error::NoConvergence { .. } | Error::SingularJacobian | Error::SingularTraceGram => 3,
            Error::Io(_) => 5,
            _ => 4,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
