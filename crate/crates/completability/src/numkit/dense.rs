//! Dense helpers: orthonormal bases, complement sampling, and the rank
//! oracle used to cross-check the iterative path on small instances.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use super::NumError;

/// Column-major dense matrix of `f64`.
pub type DenseMatrix = DMatrix<f64>;

/// Orthonormal basis of the column space of a tall-skinny `t`, computed by
/// Householder QR. Errors if the columns are numerically dependent.
pub fn orthonormal_basis(t: &DenseMatrix) -> Result<DenseMatrix, NumError> {
    let k = t.ncols();
    if k == 0 {
        return Ok(t.clone());
    }
    if t.iter().any(|v| !v.is_finite()) {
        return Err(NumError::NonFinite);
    }
    let qr = t.clone().qr();
    let r = qr.r();
    let diag_max = (0..k).map(|i| r[(i, i)].abs()).fold(0.0f64, f64::max);
    if diag_max == 0.0 || (0..k).any(|i| r[(i, i)].abs() < 1e-10 * diag_max) {
        return Err(NumError::RankDeficient);
    }
    Ok(qr.q())
}

/// Draws a unit vector in the orthogonal complement of `col(q)`, where `q`
/// has orthonormal columns. A standard normal vector is projected with
/// `w = v - q (q^T v)` (never forming `q q^T`) and normalized, so the result
/// is uniform on the unit sphere of the complement.
pub fn random_unit_in_complement(
    q: &DenseMatrix,
    rng: &mut impl Rng,
) -> Result<Vec<f64>, NumError> {
    let n = q.nrows();
    for _attempt in 0..2 {
        let v = DMatrix::from_fn(n, 1, |_, _| rng.sample::<f64, _>(StandardNormal));
        let vnorm = v.norm();
        let mut w = v;
        if q.ncols() > 0 {
            // Two projection passes keep q^T w at roundoff level.
            for _ in 0..2 {
                let coeffs = q.transpose() * &w;
                w -= q * coeffs;
            }
        }
        let wnorm = w.norm();
        if wnorm > 1e-12 * vnorm {
            w /= wnorm;
            return Ok(w.column(0).iter().copied().collect());
        }
    }
    Err(NumError::ZeroComplement)
}

/// Numerical rank: the number of singular values above `rel_tol` times the
/// largest one.
pub fn dense_rank(a: &DenseMatrix, rel_tol: f64) -> usize {
    if a.nrows() == 0 || a.ncols() == 0 {
        return 0;
    }
    let sv = a
        .clone()
        .try_svd(false, false, f64::EPSILON, 0)
        .expect("svd of a finite matrix converges")
        .singular_values;
    let max = sv.iter().copied().fold(0.0f64, f64::max);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * max).count()
}

/// Default relative tolerance for [`dense_rank`].
pub const DENSE_RANK_REL_TOL: f64 = 1e-8;

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_basis_is_identity() {
        let t = DenseMatrix::identity(4, 3);
        let q = orthonormal_basis(&t).unwrap();
        assert!((q.transpose() * &q - DenseMatrix::identity(3, 3)).norm() < 1e-14);
        assert!(((&q * q.transpose()) * &t - &t).norm() < 1e-14);
    }

    #[test]
    fn scaled_identity_normalizes() {
        let t = DenseMatrix::identity(4, 2) * 2.0;
        let q = orthonormal_basis(&t).unwrap();
        for c in 0..2 {
            assert!((q.column(c).norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn random_tall_matrix_gives_orthonormal_basis() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let t = DenseMatrix::from_fn(50, 3, |_, _| rng.random_range(-1.0..1.0));
        let q = orthonormal_basis(&t).unwrap();
        assert!((q.transpose() * &q - DenseMatrix::identity(3, 3)).norm() <= 1e-12);
        let proj_residual = &t - &q * (q.transpose() * &t);
        assert!(proj_residual.norm() <= 1e-10);
    }

    #[test]
    fn dependent_columns_are_rejected() {
        let mut t = DenseMatrix::zeros(5, 2);
        for r in 0..5 {
            t[(r, 0)] = r as f64 + 1.0;
            t[(r, 1)] = 2.0 * (r as f64 + 1.0);
        }
        assert!(matches!(orthonormal_basis(&t), Err(NumError::RankDeficient)));
    }

    #[test]
    fn empty_basis_passes_through() {
        let t = DenseMatrix::zeros(6, 0);
        let q = orthonormal_basis(&t).unwrap();
        assert_eq!(q.ncols(), 0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let b = random_unit_in_complement(&q, &mut rng).unwrap();
        let norm: f64 = b.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn one_dimensional_complement_is_hit_exactly() {
        // q = e_1 in R^2: the complement is spanned by e_2.
        let q = DenseMatrix::from_column_slice(2, 1, &[1.0, 0.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let b = random_unit_in_complement(&q, &mut rng).unwrap();
        assert!(b[0].abs() < 1e-14);
        assert!((b[1].abs() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn complement_vectors_are_orthogonal_to_basis() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t = DenseMatrix::from_fn(40, 5, |_, _| rng.random_range(-1.0..1.0));
        let q = orthonormal_basis(&t).unwrap();
        for _ in 0..100 {
            let b = random_unit_in_complement(&q, &mut rng).unwrap();
            let bv = DenseMatrix::from_column_slice(40, 1, &b);
            assert!((q.transpose() * &bv).norm() <= 1e-12);
        }
    }

    #[test]
    fn projector_is_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let t = DenseMatrix::from_fn(30, 4, |_, _| rng.random_range(-1.0..1.0));
        let q = orthonormal_basis(&t).unwrap();
        let v = DenseMatrix::from_fn(30, 1, |_, _| rng.random_range(-1.0..1.0));
        let project = |x: &DenseMatrix| x - &q * (q.transpose() * x);
        let once = project(&v);
        let twice = project(&once);
        assert!((twice - &once).norm() <= 1e-12);
    }

    #[test]
    fn rank_of_identity_and_outer_product() {
        assert_eq!(dense_rank(&DenseMatrix::identity(4, 4), 1e-8), 4);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let u = DenseMatrix::from_fn(7, 1, |_, _| rng.random_range(0.5..1.5));
        let v = DenseMatrix::from_fn(1, 5, |_, _| rng.random_range(0.5..1.5));
        assert_eq!(dense_rank(&(u * v), 1e-8), 1);
    }

    #[test]
    fn rank_is_invariant_under_permutation_and_row_scaling() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let rows = rng.random_range(2..10);
            let cols = rng.random_range(2..10);
            let r = rng.random_range(1..=rows.min(cols));
            // random rank-r matrix
            let a = DenseMatrix::from_fn(rows, r, |_, _| rng.random_range(-1.0..1.0))
                * DenseMatrix::from_fn(r, cols, |_, _| rng.random_range(-1.0..1.0));
            let base = dense_rank(&a, 1e-8);
            assert_eq!(base, r);

            let mut permuted = a.clone();
            permuted.swap_rows(0, rows - 1);
            permuted.swap_columns(0, cols - 1);
            assert_eq!(dense_rank(&permuted, 1e-8), base);

            let mut scaled = a.clone();
            let factor = rng.random_range(0.5..3.0);
            for c in 0..cols {
                scaled[(0, c)] *= factor;
            }
            assert_eq!(dense_rank(&scaled, 1e-8), base);
        }
    }
}
