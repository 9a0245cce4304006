//! Completion matrices, trivial-motion bases, and stress matrices.
//!
//! Observed entries of a rank-`d` matrix are inner products of unknown
//! vectors. Differentiating those products along a motion of the vectors
//! gives one linear constraint per observed entry; the coefficient matrix of
//! that system is the completion matrix. Its kernel beyond the motions that
//! preserve every inner product (the trivial motions) decides local
//! completability, and vectors in its left kernel (stresses) assemble into
//! the stress matrix used for the global test.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::numkit::{orthonormal_basis, DenseMatrix, NumError, SparseMatrix};
use crate::pattern::{GramPattern, Pattern, RectPattern};

/// Stacked trivial motions, one column per generator, shape
/// `(d * #vertices) x k` with `k = d(d-1)/2` (Gram) or `d^2` (rectangular).
pub type TrivialMotionBasis = DenseMatrix;

/// A point per vertex in `R^d`, stored vertex-major. For rectangular
/// patterns the `n1` row vectors precede the `n2` column vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    d: usize,
    coords: Vec<f64>,
    /// `Some(n1)` when the first `n1` vertices are row vectors of a
    /// rectangular pattern.
    split: Option<usize>,
}

impl Realization {
    pub fn from_gram_points(d: usize, points: &[Vec<f64>]) -> Result<Self, NumError> {
        Self::from_parts(d, points, None)
    }

    pub fn from_rect_points(
        d: usize,
        u: &[Vec<f64>],
        v: &[Vec<f64>],
    ) -> Result<Self, NumError> {
        let all: Vec<Vec<f64>> = u.iter().chain(v.iter()).cloned().collect();
        Self::from_parts(d, &all, Some(u.len()))
    }

    fn from_parts(d: usize, points: &[Vec<f64>], split: Option<usize>) -> Result<Self, NumError> {
        let mut coords = Vec::with_capacity(points.len() * d);
        for p in points {
            if p.len() != d {
                return Err(NumError::DimensionMismatch { expected: d, got: p.len() });
            }
            if p.iter().any(|c| !c.is_finite()) {
                return Err(NumError::NonFinite);
            }
            coords.extend_from_slice(p);
        }
        Ok(Realization { d, coords, split })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn num_vertices(&self) -> usize {
        self.coords.len() / self.d.max(1)
    }

    /// Coordinates of vertex `v`.
    pub fn point(&self, v: usize) -> &[f64] {
        &self.coords[v * self.d..(v + 1) * self.d]
    }

    /// For rectangular realizations, the number of row vectors.
    pub fn split(&self) -> Option<usize> {
        self.split
    }

    /// Scales every coordinate; the ranks of all derived matrices are
    /// invariant under this.
    pub fn scaled(&self, factor: f64) -> Realization {
        Realization {
            d: self.d,
            coords: self.coords.iter().map(|c| c * factor).collect(),
            split: self.split,
        }
    }
}

/// Draws an i.i.d. standard normal realization matching the pattern; such
/// points are generic with probability one. Deterministic per seed.
pub fn random_realization(pattern: &Pattern, d: usize, seed: u64) -> Realization {
    random_realization_with(pattern, d, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn random_realization_with(pattern: &Pattern, d: usize, rng: &mut impl Rng) -> Realization {
    let v = pattern.num_vertices();
    let coords = (0..v * d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    let split = match pattern {
        Pattern::Gram(_) => None,
        Pattern::Rect(p) => Some(p.n1()),
    };
    Realization { d, coords, split }
}

/// Completion matrix of a Gram pattern: one row per observed entry, in
/// canonical edge order, over `d * n` velocity unknowns (vertex-major
/// column blocks).
///
/// The row of an off-diagonal entry `(i, j)` carries `p_j` in block `i` and
/// `p_i` in block `j`; a self loop carries `2 p_i` in block `i`, the exact
/// derivative of `p_i . p_i`.
pub fn gram_completion_matrix(
    pattern: &GramPattern,
    r: &Realization,
) -> Result<SparseMatrix, NumError> {
    if r.split.is_some() || r.num_vertices() != pattern.n() {
        return Err(NumError::DimensionMismatch {
            expected: pattern.n(),
            got: r.num_vertices(),
        });
    }
    let d = r.d;
    let mut triplets = Vec::with_capacity(2 * d * pattern.num_edges());
    for (row, &(i, j)) in pattern.edges().iter().enumerate() {
        if i == j {
            for t in 0..d {
                triplets.push((row, i * d + t, 2.0 * r.point(i)[t]));
            }
        } else {
            for t in 0..d {
                triplets.push((row, i * d + t, r.point(j)[t]));
                triplets.push((row, j * d + t, r.point(i)[t]));
            }
        }
    }
    SparseMatrix::from_triplets(pattern.num_edges(), d * pattern.n(), triplets)
}

/// Completion matrix of a rectangular pattern: row for entry `(i, j)`
/// carries `v_j` in the block of row-vertex `i` and `u_i` in the block of
/// column-vertex `j`. Row-vertex blocks precede column-vertex blocks, so the
/// matrix has `d * (n1 + n2)` columns and exactly `2d` nonzeros per row.
pub fn rect_completion_matrix(
    pattern: &RectPattern,
    r: &Realization,
) -> Result<SparseMatrix, NumError> {
    let total = pattern.n1() + pattern.n2();
    if r.split != Some(pattern.n1()) || r.num_vertices() != total {
        return Err(NumError::DimensionMismatch { expected: total, got: r.num_vertices() });
    }
    let d = r.d;
    let mut triplets = Vec::with_capacity(2 * d * pattern.num_edges());
    for (row, &(i, j)) in pattern.edges().iter().enumerate() {
        let u = r.point(i);
        let v = r.point(pattern.n1() + j);
        for t in 0..d {
            triplets.push((row, i * d + t, v[t]));
            triplets.push((row, (pattern.n1() + j) * d + t, u[t]));
        }
    }
    SparseMatrix::from_triplets(pattern.num_edges(), d * total, triplets)
}

/// Trivial motions of a Gram realization: for each rotation generator
/// `A_{ab}` (`a < b`, lexicographic; `+1` at `(b, a)`, `-1` at `(a, b)`) the
/// column stacks `A_{ab} p_1, ..., A_{ab} p_n`. Exactly `d(d-1)/2` columns,
/// each annihilated by the completion matrix.
pub fn gram_trivial_basis(r: &Realization) -> Result<TrivialMotionBasis, NumError> {
    let d = r.d;
    let n = r.num_vertices();
    let k = d * (d - 1) / 2;
    let mut basis = DenseMatrix::zeros(d * n, k);
    let mut col = 0;
    for a in 0..d {
        for b in (a + 1)..d {
            for v in 0..n {
                let p = r.point(v);
                basis[(v * d + a, col)] = -p[b];
                basis[(v * d + b, col)] = p[a];
            }
            col += 1;
        }
    }
    if k > 0 {
        orthonormal_basis(&basis)?;
    }
    Ok(basis)
}

/// Trivial motions of a rectangular realization: for each elementary matrix
/// `E_{ab}` (lexicographic) the column stacks
/// `E_{ab} u_1, ..., E_{ab} u_{n1}, -E_{ab}^T v_1, ..., -E_{ab}^T v_{n2}`.
/// Exactly `d^2` columns.
pub fn rect_trivial_basis(r: &Realization) -> Result<TrivialMotionBasis, NumError> {
    let d = r.d;
    let n1 = r.split.ok_or(NumError::DimensionMismatch { expected: 1, got: 0 })?;
    let total = r.num_vertices();
    let mut basis = DenseMatrix::zeros(d * total, d * d);
    let mut col = 0;
    for a in 0..d {
        for b in 0..d {
            // (E_ab u)[a] = u[b]; (-E_ab^T v)[b] = -v[a]
            for i in 0..n1 {
                basis[(i * d + a, col)] = r.point(i)[b];
            }
            for j in n1..total {
                basis[(j * d + b, col)] = -r.point(j)[a];
            }
            col += 1;
        }
    }
    orthonormal_basis(&basis)?;
    Ok(basis)
}

/// A stress vector rearranged into its symmetric stress matrix, kept with
/// its source vector.
#[derive(Debug, Clone)]
pub struct StressMatrix {
    matrix: SparseMatrix,
    omega: Vec<f64>,
}

impl StressMatrix {
    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }
}

/// Rearranges a Gram stress vector into the symmetric `n x n` stress matrix:
/// `Omega[i][j] = Omega[j][i] = omega_e` for each observed off-diagonal
/// entry, zero elsewhere. A self-loop weight lands on the diagonal scaled by
/// 2, matching the `2 p_i` self-loop rows of the completion matrix, so that
/// a genuine stress satisfies `Omega P = 0` for every coordinate vector `P`.
/// No row-sum correction is applied.
pub fn assemble_gram_stress(
    pattern: &GramPattern,
    omega: &[f64],
) -> Result<StressMatrix, NumError> {
    if omega.len() != pattern.num_edges() {
        return Err(NumError::DimensionMismatch {
            expected: pattern.num_edges(),
            got: omega.len(),
        });
    }
    let n = pattern.n();
    let mut triplets = Vec::with_capacity(2 * omega.len());
    for (&(i, j), &w) in pattern.edges().iter().zip(omega) {
        if i == j {
            triplets.push((i, i, 2.0 * w));
        } else {
            triplets.push((i, j, w));
            triplets.push((j, i, w));
        }
    }
    Ok(StressMatrix {
        matrix: SparseMatrix::from_triplets(n, n, triplets)?,
        omega: omega.to_vec(),
    })
}

/// Rearranges a rectangular stress vector into the `(n1+n2) x (n1+n2)`
/// symmetric block matrix `[[0, W], [W^T, 0]]` where `W[i][j] = omega_e` for
/// each observed entry.
pub fn assemble_rect_stress(
    pattern: &RectPattern,
    omega: &[f64],
) -> Result<StressMatrix, NumError> {
    if omega.len() != pattern.num_edges() {
        return Err(NumError::DimensionMismatch {
            expected: pattern.num_edges(),
            got: omega.len(),
        });
    }
    let total = pattern.n1() + pattern.n2();
    let mut triplets = Vec::with_capacity(2 * omega.len());
    for (&(i, j), &w) in pattern.edges().iter().zip(omega) {
        let jj = pattern.n1() + j;
        triplets.push((i, jj, w));
        triplets.push((jj, i, w));
    }
    Ok(StressMatrix {
        matrix: SparseMatrix::from_triplets(total, total, triplets)?,
        omega: omega.to_vec(),
    })
}

/// The vectors every stress matrix annihilates, one column each: for a Gram
/// realization the `d` coordinate vectors of the points; for a rectangular
/// realization the `2d` columns of `[[U, 0], [0, V]]`.
pub fn known_stress_kernel(r: &Realization) -> DenseMatrix {
    let d = r.d;
    let total = r.num_vertices();
    match r.split {
        None => {
            let mut k = DenseMatrix::zeros(total, d);
            for v in 0..total {
                for t in 0..d {
                    k[(v, t)] = r.point(v)[t];
                }
            }
            k
        }
        Some(n1) => {
            let mut k = DenseMatrix::zeros(total, 2 * d);
            for v in 0..total {
                let p = r.point(v);
                for t in 0..d {
                    if v < n1 {
                        k[(v, t)] = p[t];
                    } else {
                        k[(v, d + t)] = p[t];
                    }
                }
            }
            k
        }
    }
}
