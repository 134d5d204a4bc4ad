use thiserror::Error;

/// Errors produced while reading instances, validating solutions or
/// configuring a search.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{message} at line {line}")]
    Parse { line: usize, message: String },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid subset count k={k} for a graph with {n} vertices (need 2 <= k <= n)")]
    InvalidK { k: usize, n: usize },

    #[error("assignment has {got} entries but the graph has {expected} vertices")]
    LengthMismatch { expected: usize, got: usize },

    #[error("vertex {vertex} is assigned to subset {subset}, outside 0..{k}")]
    SubsetOutOfRange {
        vertex: usize,
        subset: usize,
        k: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("instance too large for exhaustive enumeration: n={n}, k={k} (limit n<={max_n}, k<={max_k})")]
    OracleGuard {
        n: usize,
        k: usize,
        max_n: usize,
        max_k: usize,
    },

    #[error("malformed solution file: {0}")]
    Solution(String),
}

pub type Result<T> = std::result::Result<T, Error>;
