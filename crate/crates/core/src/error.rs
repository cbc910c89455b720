use alloc::string::String;

/// Errors raised while constructing or transforming algebraic data.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("degenerate symplectic form: {0}")]
    DegenerateForm(String),
    #[error("parity violation: {0}")]
    Parity(String),
    #[error("pre-Hodge map does not square to zero: {0}")]
    HNotSquareZero(String),
    #[error("pre-Hodge map is not compatible with the symplectic form: {0}")]
    HNotCompatible(String),
    #[error("seed is not a cocycle: {0}")]
    SeedNotCocycle(String),
    #[error("morphism is not certified: {0}")]
    MorphismNotCertified(String),
    #[error("base structure is not certified: {0}")]
    UncertifiedBase(String),
    #[error("inconsistent linear system: {0}")]
    Inconsistent(String),
    #[error("scalar field mismatch: {0}")]
    FieldMismatch(String),
    #[error("cannot parse scalar {0:?}")]
    ScalarParse(String),
}

pub type Result<T> = core::result::Result<T, Error>;
