use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not a prime characteristic")]
    NonPrimeCharacteristic(u64),
    #[error("field order {order} exceeds the cap {cap}")]
    OrderCapExceeded { order: u64, cap: u64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields ({0} vs {1})")]
    MixedFields(String, String),
    #[error("operation requires characteristic {expected}, field has characteristic {actual}")]
    CharacteristicMismatch { expected: u64, actual: u64 },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("ambient mismatch: {0}")]
    AmbientMismatch(String),
    #[error("matrix does not lie in the ambient: {0}")]
    MatrixNotInAmbient(String),
    #[error("kind mismatch: {0}")]
    KindMismatch(String),
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("enumeration of {count} items exceeds the cap {cap}")]
    EnumerationCapExceeded { count: u128, cap: u64 },
    #[error("domain with {size} elements exceeds the cap {cap}")]
    DomainTooLarge { size: u128, cap: u64 },
    #[error("matrix is not in the domain of the map")]
    NotInDomain,
    #[error("quotient map is ill-defined: {0}")]
    IllDefined(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;
