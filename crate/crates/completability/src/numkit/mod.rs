//! Minimal numerical kernel: sparse matrices with transpose application,
//! LSQR, orthonormal bases, random vectors in orthogonal complements, and a
//! dense rank oracle for small instances.

mod dense;
mod lsqr;
mod sparse;

use thiserror::Error;

pub use dense::{dense_rank, orthonormal_basis, random_unit_in_complement, DenseMatrix,
    DENSE_RANK_REL_TOL};
pub use lsqr::{lsqr, LsqrResult, LsqrStatus};
pub use sparse::{LinearOperator, SparseMatrix, TransposeView};

#[derive(Debug, Error)]
pub enum NumError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-finite input")]
    NonFinite,
    #[error("entry ({row}, {col}) outside a {rows}x{cols} matrix")]
    EntryOutOfRange { row: usize, col: usize, rows: usize, cols: usize },
    #[error("columns are numerically rank deficient")]
    RankDeficient,
    #[error("projection onto the orthogonal complement is numerically zero")]
    ZeroComplement,
}
