use thiserror::Error;

/// Errors raised by field, ring, matrix and solver operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid field parameters: {0}")]
    InvalidField(String),
    #[error("field mismatch")]
    FieldMismatch,
    #[error("element {0} out of range for field of order {1}")]
    ElementOutOfRange(u64, u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("division by zero polynomial")]
    ZeroPolyDivision,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("LP of zero vector")]
    LpOfZeroVector,
    #[error("not a simple transformation: {0}")]
    NotSimpleTransform(String),
    #[error("singular triangular matrix")]
    SingularTriangular,
    #[error("matrix not full rank")]
    NotFullRank,
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("enumeration budget exceeded: {needed} candidates > {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
    #[error("points not independent")]
    PointsNotIndependent,
    #[error("invalid code parameters: {0}")]
    InvalidCode(String),
    #[error("decoding failure: {0}")]
    DecodingFailure(String),
    #[error("malformed input: {0}")]
    Parse(String),
    #[error("internal: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
