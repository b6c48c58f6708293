use thiserror::Error;

/// Errors raised across the engine. Undecided limits are values, not errors.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("boundary composition is nonzero: d_out * d_in != 0")]
    CompositionNonzero,
    #[error("map does not commute with the differentials in degree {degree}")]
    NotChainMap { degree: i64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid complex: {0}")]
    InvalidComplex(String),
    #[error("windows do not match: {0}")]
    WindowMismatch(String),
    #[error("pivot {pivot} of pair ({from} -> {to}) is not invertible over the integers")]
    NonInvertiblePivot {
        from: String,
        to: String,
        pivot: String,
    },
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("not exact at chain level in degree {degree}: {reason}")]
    NotExactAtChainLevel { degree: i64, reason: String },
    #[error("grid too small: {0}")]
    GridTooSmall(String),
    #[error("not a Tate triple: {0}")]
    NotTateTriple(String),
    #[error("the zero vector has no degree")]
    ZeroVector,
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("bad parity: {0}")]
    BadParity(String),
    #[error("this model is only valid with rational coefficients")]
    RequiresRationalCoefficients,
    #[error("operation requires field coefficients")]
    RequiresField,
    #[error("density condition unverified: {0}")]
    DensityUnverified(String),
    #[error("integration failed at s = {s}: {reason}")]
    StepFailure { s: f64, reason: String },
    #[error("vector is not a cycle")]
    NotACycle,
    #[error("vector has non-integral entries")]
    NotIntegral,
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
