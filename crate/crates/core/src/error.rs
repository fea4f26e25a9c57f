use thiserror::Error;

/// Errors raised by lattice construction and the classification pipeline.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("Gram matrix is not positive definite (leading minor {0} is {1})")]
    NotPositiveDefinite(usize, String),
    #[error("unsupported rank {0}")]
    UnsupportedRank(usize),
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("form is not primitive (content {0})")]
    NotPrimitive(String),
    #[error("rescaled Gram matrix is not integral")]
    NonIntegral,
    #[error("{0} is not a prime")]
    NotPrime(String),
    #[error("prime {0} divides 2·d(L)")]
    BadPrime(u64),
    #[error("spinor norm group undecided at p={0}: {1}")]
    ThetaUndecided(u64, String),
    #[error("component does not have the required shape: {0}")]
    WrongComponent(String),
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),
    #[error("incomplete class set: found mass {found}, expected {expected}")]
    IncompleteGenus { found: String, expected: String },
    #[error("spinor genus labelling is inconsistent: {0}")]
    SpinorInconsistency(String),
    #[error("unsupported mass closure: {0}")]
    UnsupportedMass(String),
    #[error("iteration cap reached in {0}")]
    IterationCap(&'static str),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("catalogue: {0}")]
    Catalogue(String),
    #[error("io: {0}")]
    Io(String),
    #[error("unknown fixture {0}")]
    UnknownFixture(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
