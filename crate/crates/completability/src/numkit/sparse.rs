//! Compressed sparse row matrices with transpose application.

use super::NumError;
use crate::numkit::DenseMatrix;

/// Something that can act as a linear map and as its transpose without
/// materializing either. `lsqr` is written against this trait so the same
/// solver runs on a matrix or on its transpose view.
pub trait LinearOperator {
    fn nrows(&self) -> usize;
    fn ncols(&self) -> usize;
    /// `y += A x`
    fn apply_add(&self, x: &[f64], y: &mut [f64]);
    /// `x += A^T y`
    fn apply_transpose_add(&self, y: &[f64], x: &mut [f64]);
}

/// Sparse matrix in compressed row form, assembled from coordinate triplets.
/// Duplicate coordinates are summed during assembly, so at most one stored
/// value per position remains.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self, NumError> {
        let mut entries: Vec<(usize, usize, f64)> = Vec::new();
        for (r, c, v) in triplets {
            if r >= rows || c >= cols {
                return Err(NumError::EntryOutOfRange { row: r, col: c, rows, cols });
            }
            if !v.is_finite() {
                return Err(NumError::NonFinite);
            }
            entries.push((r, c, v));
        }
        entries.sort_unstable_by_key(|&(r, c, _)| (r, c));

        let mut row_ptr = vec![0usize; rows + 1];
        let mut col_idx = Vec::with_capacity(entries.len());
        let mut values: Vec<f64> = Vec::with_capacity(entries.len());
        let mut prev: Option<(usize, usize)> = None;
        for (r, c, v) in entries {
            if prev == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(c);
                values.push(v);
                row_ptr[r + 1] += 1;
                prev = Some((r, c));
            }
        }
        for r in 0..rows {
            row_ptr[r + 1] += row_ptr[r];
        }
        Ok(SparseMatrix { rows, cols, row_ptr, col_idx, values })
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Stored entries of one row as (column, value) pairs.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.col_idx[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }

    /// All stored entries as (row, col, value).
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.rows).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    /// `A x` as a fresh vector.
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>, NumError> {
        if x.len() != self.cols {
            return Err(NumError::DimensionMismatch { expected: self.cols, got: x.len() });
        }
        let mut y = vec![0.0; self.rows];
        self.apply_add(x, &mut y);
        Ok(y)
    }

    /// `A^T y` as a fresh vector, computed from the row form directly.
    pub fn rmatvec(&self, y: &[f64]) -> Result<Vec<f64>, NumError> {
        if y.len() != self.rows {
            return Err(NumError::DimensionMismatch { expected: self.rows, got: y.len() });
        }
        let mut x = vec![0.0; self.cols];
        self.apply_transpose_add(y, &mut x);
        Ok(x)
    }

    /// Lazy transpose: applies `A^T` wherever the operator is applied.
    pub fn transpose_view(&self) -> TransposeView<'_> {
        TransposeView(self)
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.rows, self.cols);
        for (r, c, v) in self.triplets() {
            out[(r, c)] += v;
        }
        out
    }
}

impl LinearOperator for &SparseMatrix {
    fn nrows(&self) -> usize {
        self.rows
    }

    fn ncols(&self) -> usize {
        self.cols
    }

    fn apply_add(&self, x: &[f64], y: &mut [f64]) {
        for r in 0..self.rows {
            let mut acc = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            y[r] += acc;
        }
    }

    fn apply_transpose_add(&self, y: &[f64], x: &mut [f64]) {
        for r in 0..self.rows {
            let yr = y[r];
            if yr == 0.0 {
                continue;
            }
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                x[self.col_idx[k]] += self.values[k] * yr;
            }
        }
    }
}

/// Transpose of a borrowed [`SparseMatrix`], without copying the storage.
#[derive(Clone, Copy)]
pub struct TransposeView<'a>(&'a SparseMatrix);

impl LinearOperator for TransposeView<'_> {
    fn nrows(&self) -> usize {
        self.0.cols
    }

    fn ncols(&self) -> usize {
        self.0.rows
    }

    fn apply_add(&self, x: &[f64], y: &mut [f64]) {
        (&self.0).apply_transpose_add(x, y);
    }

    fn apply_transpose_add(&self, y: &[f64], x: &mut [f64]) {
        (&self.0).apply_add(y, x);
    }
}
