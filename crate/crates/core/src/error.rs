use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("modulus at position {index} is {value}; every modulus must be at least 1")]
    NonPositiveModulus { index: usize, value: i64 },

    #[error("group order {order} exceeds the cap of 2^20")]
    OrderTooLarge { order: u128 },

    #[error("shape mismatch: expected {expected} residues, found {found}")]
    ShapeMismatch { expected: usize, found: usize },

    #[error("residue {value} at position {index} is outside [0, {modulus})")]
    ResidueOutOfRange { index: usize, value: u64, modulus: u64 },

    #[error("base point `{0}` has no fibre")]
    MissingFibre(String),

    #[error("base point `{point}` has non-positive Haar weight {weight}")]
    NonPositiveWeight { point: String, weight: f64 },

    #[error("total bundle size {total} exceeds the cap of 2^20")]
    SizeCap { total: u128 },

    #[error("duplicate base point `{0}`")]
    DuplicateBasePoint(String),

    #[error("unknown base point `{0}`")]
    UnknownBasePoint(String),

    #[error("function does not live on this bundle: {0}")]
    BundleMismatch(String),

    #[error("function is not positive definite at `{point}`: transform value {value} below -{threshold}")]
    NotPositiveDefinite { point: String, value: f64, threshold: f64 },

    #[error("invalid trivialization at sequence index {index}: {reason}")]
    InvalidTrivialization { index: usize, reason: String },

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },

    #[error("validation error in `{field}`: {message}")]
    Validation { field: String, message: String },

    #[error("unknown function `{0}`")]
    UnknownFunction(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}
