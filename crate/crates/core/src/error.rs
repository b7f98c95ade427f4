use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("qudit dimension must be at least 2, got {0}")]
    InvalidDimension(u32),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("shape mismatch: {0}x{1} vs {2}x{3}")]
    ShapeMismatch(usize, usize, usize, usize),
    #[error("duplicate target wire {0}")]
    DuplicateTarget(usize),
    #[error("wire index {index} out of range for a {wires}-wire system")]
    WireOutOfRange { index: usize, wires: usize },
    #[error("measurement outcome {outcome} out of range for d={d}")]
    OutcomeOutOfRange { outcome: u32, d: u32 },
    #[error("operator is not unitary (deviation {0:e})")]
    NotUnitary(f64),
    #[error("reference operator is zero")]
    ZeroOperator,
    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),
    #[error("resource state needs at least 2 shares, got {0}")]
    TooFewShares(usize),
    #[error("register dimension {dim} exceeds cap {cap}")]
    DimensionCapExceeded { dim: u128, cap: u128 },
    #[error("classical wire `{0}` read before it was written")]
    ReadBeforeWrite(String),
    #[error("classical wire `{0}` written twice")]
    ClassicalRewrite(String),
    #[error("quantum wire `{wire}` used while not live ({reason})")]
    WireNotLive { wire: String, reason: &'static str },
    #[error("wire `{0}` has no owning party")]
    MissingOwner(String),
    #[error("outcome probability underflow ({0:e})")]
    ProbabilityUnderflow(f64),
    #[error("transformation is not {0}-compressed on the requested wire")]
    NotCompressed(&'static str),
    #[error("unsupported compression pair {0} -> {1}")]
    UnsupportedConjugation(String, String),
    #[error("unknown protocol `{0}`")]
    UnknownProtocol(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
