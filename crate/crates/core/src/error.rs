use thiserror::Error;

/// Errors shared by every module in the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("field mismatch: {left} vs {right}")]
    SpecMismatch { left: String, right: String },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} out of range (need 2 <= p < 2^31)")]
    ModulusOutOfRange(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("operation requires characteristic {required}, field has characteristic {found}")]
    WrongCharacteristic { required: u64, found: u64 },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("zero vector where a nonzero vector is required")]
    ZeroVector,
    #[error("degenerate trivector: every 8x8 sub-Pfaffian vanishes identically")]
    DegenerateTrivector,
    #[error("not divisible: remainder {remainder}")]
    NotDivisible { remainder: String },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }
}
