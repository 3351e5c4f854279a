use thiserror::Error;

/// Every failure the library can report.
///
/// Variants map one-to-one onto the error conditions of the public
/// operations, so callers can match on the kind instead of parsing messages.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("field mismatch: {0}")]
    FieldMismatch(String),
    #[error("embedding index {index} out of range for a field with {count} embedding coordinates")]
    EmbeddingOutOfRange { index: usize, count: usize },
    #[error("sign could not be certified: {0}")]
    Uncertified(String),

    #[error("basis is singular")]
    SingularBasis,
    #[error("parameter `{0}` must be positive")]
    NonPositiveParameter(String),
    #[error("enumeration needs about {estimate:.3e} points, budget is {budget}")]
    RadiusTooLargeForBudget { estimate: f64, budget: u64 },

    #[error("unsupported scalar kind: {0}")]
    UnsupportedScalarKind(String),
    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),
    #[error("point is not in the dual slice lattice")]
    NotInDualSliceLattice,

    #[error("membership oracle failed: {0}")]
    OracleFailure(String),
    #[error("slice frame is degenerate")]
    DegenerateFrame,
    #[error("unsupported domain kind: {0}")]
    UnsupportedKind(String),

    #[error("count needs about {estimate:.3e} candidate points, budget is {budget}")]
    BudgetExceeded { estimate: f64, budget: u64 },
    #[error("slice window incomplete: {0}")]
    WindowIncomplete(String),
    #[error("multiplier has zero norm")]
    ZeroNorm,

    #[error("inconsistent regime parameters: {0}")]
    InconsistentParameters(String),
    #[error("only {usable} usable rows after exclusion, need at least {required}")]
    TooFewUsableRows { usable: usize, required: usize },

    #[error("invalid dimensions: {0}")]
    InvalidDims(String),

    #[error("polynomial is not squarefree")]
    NotSquarefree,
    #[error("polynomial is reducible: {0}")]
    ReducibleDetected(String),
    #[error("generators are linearly dependent")]
    DependentGenerators,
    #[error("frame is not orthonormal")]
    NonOrthonormalFrame,
    #[error("frame mismatch: {0}")]
    FrameMismatch(String),
    #[error("blocks do not span the ambient space orthogonally")]
    BlocksNotSpanning,

    #[error("parse error: {0}")]
    Parse(String),
    #[error("config error at `{field}`: {message}")]
    Config { field: String, message: String },
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
