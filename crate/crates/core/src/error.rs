use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown operation symbol `{0}`")]
    UnknownSymbol(String),
    #[error("symbol `{symbol}` takes {expected} arguments, got {found}")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),
    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),
    #[error("{what}: needs {needed}, cap is {cap}")]
    CapExceeded { what: String, needed: u128, cap: u128 },
    #[error("not a congruence: {0}")]
    NotCongruence(String),
    #[error("not a homomorphism: {0}")]
    NotHomomorphism(String),
    #[error("{0}")]
    Precondition(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal inconsistency: {0}")]
    Inconsistency(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn cap(what: impl Into<String>, needed: u128, cap: u128) -> Error {
    Error::CapExceeded {
        what: what.into(),
        needed,
        cap,
    }
}
