use thiserror::Error;

use crate::tensor::SpaceLabel;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("unknown space label {0}")]
    UnknownLabel(SpaceLabel),

    #[error("space label {0} appears more than once")]
    DuplicateLabel(SpaceLabel),

    #[error("invalid sign matrix: {0}")]
    InvalidSignMatrix(String),

    #[error("unknown gate name {0:?}")]
    UnknownGate(String),

    #[error("invalid permutation set: {0}")]
    InvalidPermutations(String),

    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },

    #[error("size limit exceeded: {0}")]
    LimitExceeded(String),

    #[error("gate {name:?} is not unitary (deviation {deviation:e})")]
    NotUnitary { name: String, deviation: f64 },

    #[error("invalid witness weights: {0}")]
    InvalidWeights(String),

    #[error("supersequence does not embed permutation {0}")]
    MissingEmbedding(usize),

    #[error("oracle is not drawn from the expected table: {0}")]
    UnexpectedOracle(String),

    #[error("{0}")]
    Invalid(String),
}
