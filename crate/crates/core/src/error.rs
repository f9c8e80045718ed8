//! Error type shared by every module.

use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("argument outside the domain: {0}")]
    DomainViolation(String),

    #[error("not a permutation: {0}")]
    InvalidPermutation(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{what} = {value} exceeds the limit {limit}")]
    TooLarge {
        what: &'static str,
        value: u64,
        limit: u64,
    },

    #[error("symbol {symbol} outside an alphabet of size {size}")]
    SymbolOutOfRange { symbol: u64, size: u64 },

    #[error("symbol {0} occurs but has zero probability")]
    ZeroProbabilitySymbol(u64),

    #[error("invalid block partition: {0}")]
    InvalidPartition(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("malformed stream: {0}")]
    Format(String),

    #[error("code length {0} does not fit a 64-bit codeword")]
    CodeTooLong(usize),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    /// True for errors caused by the caller's parameters rather than by the
    /// data being processed.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::DimensionMismatch { .. }
                | Error::DomainViolation(_)
                | Error::InvalidArgument(_)
                | Error::TooLarge { .. }
                | Error::InvalidPartition(_)
        )
    }
}
