use thiserror::Error;

/// Errors produced by the library.
///
/// Out-of-range decryption (`⊥`) is *not* an error: it is a legitimate
/// protocol outcome and is reported through
/// [`DecryptOutcome`](crate::scheme::DecryptOutcome).
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is singular mod q")]
    SingularMatrix,

    #[error("invertible-matrix sampling exceeded {0} retries; randomness source looks broken")]
    SamplingRetriesExceeded(usize),

    #[error("plaintext bound violation: {0}")]
    BoundViolation(String),

    #[error("identity point is not a valid pairing input")]
    IdentityPoint,

    #[error("multi-pairing requires a non-empty pair list")]
    EmptyPairList,

    #[error("malformed encoding length: expected {expected} bytes, got {got}")]
    MalformedLength { expected: usize, got: usize },

    #[error("bad point encoding")]
    BadEncoding,

    #[error("point is not on the curve")]
    NotOnCurve,

    #[error("point is not in the prime-order subgroup")]
    WrongSubgroup,

    #[error("scalar is not canonical (must be < q)")]
    NonCanonicalScalar,

    #[error("bad file header: {0}")]
    BadHeader(String),

    #[error("integrity check failed: {0}")]
    IntegrityCheckFailed(String),

    #[error("discrete-log table mismatch: {0}")]
    TableMismatch(String),

    #[error("parse error at line {line}: {msg}")]
    Csv { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
