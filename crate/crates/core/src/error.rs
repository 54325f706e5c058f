use thiserror::Error;

/// Every failure the library can report. Variants are named after the
/// condition, not the module, so callers can match across layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NonPrimeP(u64),
    #[error("modulus is reducible modulo {0}")]
    ReducibleModulus(u64),
    #[error("integer {0} is too large to factor at desk scale")]
    FactorizationTooLarge(u64),
    #[error("invalid ring description: {0}")]
    InvalidRing(String),
    #[error("operands live over different rings")]
    RingMismatch,
    #[error("element is not a unit")]
    NonUnit,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("matrix is not invertible")]
    NonInvertible,
    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),
    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("no such embedding: {0}")]
    NoSuchEmbedding(String),
    #[error("incompatible degrees: {0}")]
    IncompatibleDegrees(String),
    #[error("index {index} out of range for {len} generators")]
    IndexOutOfRange { index: i64, len: usize },
    #[error("words are over different alphabets")]
    AlphabetMismatch,
    #[error("identity word reduces to the empty word")]
    DegeneratePair,
    #[error("terminal letter condition violated: {0}")]
    TerminalLetterViolation(String),
    #[error("derivation tree budget {0} is below the smallest leaf size")]
    BudgetTooSmall(usize),
    #[error("ill-typed derivation tree: {0}")]
    TypeError(String),
    #[error("matrix is not in the leaf group")]
    NotInLeafGroup,
    #[error("invalid automorphism: {0}")]
    InvalidAutomorphism(String),
    #[error("matrix is not in the group")]
    NotInGroup,
    #[error("unsupported decomposition: {0}")]
    UnsupportedDecomposition(String),
    #[error("matrix does not have wreath-product shape")]
    NotWreathShaped,
    #[error("matrix is not a Kronecker product of the requested shape")]
    NotDecomposable,
    #[error("no solution")]
    NoSolution,
    #[error("exponent schedule mismatch: {0}")]
    ScheduleMismatch(String),
    #[error("bad party count {0}")]
    BadPartyCount(usize),
    #[error("degenerate key after {0} retries")]
    DegenerateKey(usize),
    #[error("enumeration exceeded cap {0}")]
    CapExceeded(usize),
    #[error("attack failed: {0}")]
    Failure(String),
    #[error("solution space is trivial")]
    NoSolutionSpace,
    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}
