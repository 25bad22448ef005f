use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Error, Debug)]
pub enum Error {
    #[error("{0} is not congruent to 1 mod 3, no split prime")]
    NotSplit(i64),
    #[error("division has no exact quotient: {0}")]
    NotDivisible(String),
    #[error("generator images violate the cubic relation: {0}")]
    RelationViolated(String),
    #[error("element is not congruent to a prime-free section: {0}")]
    NotReducible(String),
    #[error("constraint solve ill-conditioned at the given precision: {0}")]
    PrecisionExhausted(String),
    #[error("analytic model validation failed: {0}")]
    ValidationFailed(String),
    #[error("rational reconstruction failed: {0}")]
    ReconstructionFailed(String),
    #[error("coset enumeration error: {0}")]
    CosetEnumeration(String),
    #[error("operator table missing entry: {0}")]
    MissingOperatorTable(String),
    #[error("truncation too shallow: {0}")]
    TruncationTooShallow(String),
    #[error("not an eigenform: {0}")]
    NotAnEigenform(String),
    #[error("all certified coefficients are zero")]
    AllCoefficientsZero,
    #[error("operator does not preserve the span: {0}")]
    NotInvariant(String),
    #[error("span is not closed under the cusp stabilizer action: {0}")]
    NotClosed(String),
    #[error("truncation cannot certify the rank: {0}")]
    TruncationAmbiguous(String),
    #[error("parameters outside the stated range: {0}")]
    OutOfStatedRange(String),
    #[error("unknown form name: {0}")]
    UnknownForm(String),
    #[error("cache lock is held by another process: {0}")]
    LockHeld(String),
    #[error("wedge arguments have mismatched shape: {0}")]
    ShapeMismatch(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("cache format error: {0}")]
    CacheFormat(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
