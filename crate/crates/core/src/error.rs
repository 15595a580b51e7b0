use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("permutations act on sets of different sizes ({0} vs {1})")]
    SizeMismatch(usize, usize),

    #[error("not a permutation: {0}")]
    InvalidPermutation(String),

    #[error("the group generated by h and v does not act transitively (square {unreachable} unreachable from square 1)")]
    NotConnected { unreachable: usize },

    #[error("origami must have at least one square")]
    Empty,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is singular: {0}")]
    SingularMatrix(String),

    #[error("orbit exceeds {max_nodes} nodes")]
    OrbitTooLarge { max_nodes: usize },

    #[error("degenerate stream: {0}")]
    DegenerateStream(String),

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("subspace is not invariant: {0}")]
    NotInvariant(String),

    #[error("hypothesis failure: {0}")]
    HypothesisFailure(String),

    #[error("precondition violated: {what} (value {value})")]
    PreconditionViolated { what: String, value: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("internal invariant broken: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
