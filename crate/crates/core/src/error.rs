use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid base p={p}, q={q}: need 1 <= q <= p <= 9")]
    InvalidBase { p: u32, q: u32 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported base: {0}")]
    UnsupportedBase(String),

    #[error(
        "{n} is not representable: its base-{radix} digits violate the admissibility condition"
    )]
    NotRepresentable { n: u64, radix: u32 },

    #[error("index out of range: {0}")]
    Range(String),

    #[error("integer overflow computing {0}")]
    Overflow(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("empty input")]
    EmptyInput,

    #[error("coordinate {0} lies outside [0,1)")]
    OutOfUnit(f64),

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("malformed input at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
