use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Coefficient blocks whose shapes disagree with the declared dimensions.
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("degenerate space: dim_m must be positive")]
    Degenerate,

    #[error("space fails validation: {0}")]
    InvalidSpace(String),

    #[error("metric is not positive-definite")]
    NotPositiveDefinite,

    #[error("subspace basis is rank deficient (rank {rank} < {cols} columns)")]
    RankDeficient { rank: usize, cols: usize },

    #[error("index {index} out of range (limit {limit})")]
    OutOfRange { index: usize, limit: usize },

    #[error("compatibility violated at blocks ({i}, {j}, {k}) with residual {residual:e}")]
    Compatibility { i: usize, j: usize, k: usize, residual: f64 },

    #[error("eigenvalues must be mutually distinct")]
    RepeatedEigenvalues,

    #[error("blocks are not a gram-orthogonal decomposition of the space: {0}")]
    BadDecomposition(String),

    #[error("formula requires distinct blocks, got i = j = {0}")]
    SameBlock(usize),

    #[error("form fails the Codazzi test with residual {0:e}")]
    NotCodazzi(f64),

    #[error("vectors are linearly dependent")]
    DependentVectors,
}

pub type Result<T> = std::result::Result<T, Error>;
