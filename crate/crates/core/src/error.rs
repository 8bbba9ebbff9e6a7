//! Error types shared across the library.

use thiserror::Error;

/// Errors raised by constructors, preconditions and exact linear algebra.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("not a permutation of 1..{expected}: {input:?}")]
    NotAPermutation { input: Vec<usize>, expected: usize },

    #[error("non-canonical multi-index {0:?} (alternating blocks must be strictly increasing)")]
    NonCanonicalIndex(Vec<usize>),

    #[error("singular matrix: rank {rank} < {dim}")]
    Singular { rank: usize, dim: usize },

    #[error("degenerate bilinear form: rank {rank} < {dim}")]
    Degenerate { rank: usize, dim: usize },

    #[error("unverified input: {0}")]
    Unverified(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("invalid skew pattern: {0}")]
    InvalidPattern(String),

    #[error("search space too large: {candidates} candidates exceed cap {cap}")]
    SearchSpaceExceeded { candidates: u128, cap: u128 },
}

pub type Result<T> = std::result::Result<T, AlgebraError>;
