use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid range: {0}")]
    InvalidRange(String),

    #[error("{0} is not a fundamental discriminant")]
    NotFundamental(i64),

    #[error("{0} is a perfect square (or 0/1); no quadratic field attached")]
    NotAField(i64),

    #[error("invalid family: {0}")]
    InvalidFamily(String),

    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),

    #[error("rank table does not cover D = {0}")]
    CoverageGap(i64),

    #[error("empty population: no discriminants in the requested set")]
    EmptyPopulation,

    #[error("requested range of {span} exceeds the configured maximum {max}")]
    RangeTooLarge { span: u64, max: u64 },

    #[error("conflicting rank entries for D = {d}: {left} vs {right}")]
    CacheConflict { d: i64, left: u8, right: u8 },

    #[error("malformed cache file: {0}")]
    MalformedCache(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("discriminant mismatch: {0} vs {1}")]
    DiscriminantMismatch(i64, i64),

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
