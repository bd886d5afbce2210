use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid denominator: must be at least 1")]
    InvalidDenominator,
    #[error("invalid level {0}: must be at least 1")]
    InvalidLevel(u64),
    #[error("malformed sequence: ratio q_{index} = {ratio} is smaller than 2")]
    MalformedSequence { index: usize, ratio: String },
    #[error("term b_{index} requested but the sequence only has {len} terms")]
    OutOfRange { index: usize, len: usize },
    #[error("invalid expansion: {0}")]
    InvalidExpansion(String),
    #[error("invalid indices: {0}")]
    InvalidIndices(String),
    #[error("characters live over different base sequences ({0} vs {1})")]
    IncompatibleBase(String, String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("search horizon exhausted: {0}")]
    Horizon(String),
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}
