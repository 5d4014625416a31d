use thiserror::Error;

/// Errors raised by the operator toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite scalar in {0}")]
    NonFinite(String),

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("image is not finitely representable: {0}")]
    UnboundedSupport(String),

    #[error("vector coordinate {index} lies outside a domain of dimension {dim}")]
    OutsideDomain { index: usize, dim: usize },

    #[error("operator is not positive (minimum eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("matrix is not Hermitian (max asymmetry {asymmetry:e})")]
    NotHermitian { asymmetry: f64 },

    #[error("operator is not self-adjoint (max asymmetry {asymmetry:e})")]
    NotSelfAdjoint { asymmetry: f64 },

    #[error("eigensolver did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("witness does not attain the norm: |Tx0| = {achieved}, |T| = {norm}")]
    WitnessInvalid { achieved: f64, norm: f64 },

    #[error("probe {index} is not orthogonal to the witness (|<y, x0>| = {overlap:e})")]
    ProbeNotOrthogonal { index: usize, overlap: f64 },

    #[error("attainment undecided for {0}")]
    Inconclusive(String),

    #[error("restriction norm {restricted} is not strictly below the norm {full}")]
    GapNotStrict { restricted: f64, full: f64 },

    #[error("projection ranks differ: {left} vs {right}")]
    RankMismatch { left: usize, right: usize },

    #[error("matrix is not an orthogonal projection (defect {defect:e})")]
    NotProjection { defect: f64 },

    #[error("operator is not a decreasing-to-positive-limit diagonal: {0}")]
    NotLotdShape(String),

    #[error("operator was classified as not absolutely norm attaining")]
    NotAn,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error at {path}: {message}")]
    Parse { path: String, message: String },

    #[error("unknown kind {kind:?} at {path}")]
    UnknownKind { path: String, kind: String },
}

impl Error {
    /// Short machine-readable tag used in CLI error objects.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonFinite(_) => "NonFinite",
            Error::InvariantViolation(_) => "InvariantViolation",
            Error::UnboundedSupport(_) => "UnboundedSupport",
            Error::OutsideDomain { .. } => "OutsideDomain",
            Error::NotPositive { .. } => "NotPositive",
            Error::NotHermitian { .. } => "NotHermitian",
            Error::NotSelfAdjoint { .. } => "NotSelfAdjoint",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::WitnessInvalid { .. } => "WitnessInvalid",
            Error::ProbeNotOrthogonal { .. } => "ProbeNotOrthogonal",
            Error::Inconclusive(_) => "Inconclusive",
            Error::GapNotStrict { .. } => "GapNotStrict",
            Error::RankMismatch { .. } => "RankMismatch",
            Error::NotProjection { .. } => "NotProjection",
            Error::NotLotdShape(_) => "NotLOTDShape",
            Error::NotAn => "NotAN",
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::Parse { .. } => "ParseError",
            Error::UnknownKind { .. } => "UnknownKind",
        }
    }

    /// Parse-class errors map to the usage exit code in the CLI.
    pub fn is_parse_error(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. } | Error::UnknownKind { .. } | Error::InvariantViolation(_) | Error::NonFinite(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
