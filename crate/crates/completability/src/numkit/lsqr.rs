//! LSQR: iterative least squares via Golub-Kahan bidiagonalization.
//!
//! Solves `min ||A x - b||` touching `A` only through matrix-vector products
//! with `A` and `A^T`. Besides the usual stopping rules this solver watches
//! for a stagnating residual, which callers use to decide that the system
//! has no solution at the requested tolerance.

use super::sparse::LinearOperator;
use super::NumError;

/// How an [`lsqr`] run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LsqrStatus {
    /// A stopping rule fired: either the residual dropped below the target,
    /// or the normal-equations residual says the least-squares optimum was
    /// reached (whether or not the residual target was met).
    Converged,
    /// The residual plateaued above the target before any stopping rule
    /// fired; it cannot be driven below the tolerance.
    ResidualFloor,
    /// Iteration cap reached.
    MaxIters,
}

#[derive(Debug, Clone)]
pub struct LsqrResult {
    pub x: Vec<f64>,
    /// Exact `||A x - b||`, recomputed after the iteration ends.
    pub residual_norm: f64,
    pub iterations: usize,
    pub status: LsqrStatus,
}

/// Window length and relative-decrease threshold for stagnation detection.
/// The window must be generous: conjugate-direction solvers stall between
/// resolving singular-value clusters, and a residual that still has far to
/// fall can sit nearly flat for dozens of iterations.
const PLATEAU_WINDOW: usize = 200;
const PLATEAU_REL_DECREASE: f64 = 1e-4;

/// Minimizes `||A x - b||`.
///
/// `tol` is relative to the starting residual `||A x0 - b||` (to `||b||`
/// when `x0` is absent): the run converges once `||r||` falls below
/// `tol * r0`. `atol` bounds the normal-equations ratio
/// `||A^T r|| / (||A|| ||r||)` below which the iterate counts as the
/// least-squares optimum; keep it well under the relative size of the
/// smallest singular values that should still be treated as nonzero, or
/// slowly-resolved directions read as unreachable. With `x0` the solver
/// iterates on the correction `delta` in `min ||A (x0 + delta) - b||` and
/// returns `x0 + delta`; started from a random `x0` with `b = 0` this
/// converges to the projection of `x0` onto the null space of `A`.
pub fn lsqr(
    a: &impl LinearOperator,
    b: &[f64],
    tol: f64,
    atol: f64,
    max_iter: usize,
    x0: Option<&[f64]>,
) -> Result<LsqrResult, NumError> {
    let rows = a.nrows();
    let cols = a.ncols();
    if b.len() != rows {
        return Err(NumError::DimensionMismatch { expected: rows, got: b.len() });
    }
    if b.iter().any(|v| !v.is_finite()) {
        return Err(NumError::NonFinite);
    }
    if let Some(x0) = x0 {
        if x0.len() != cols {
            return Err(NumError::DimensionMismatch { expected: cols, got: x0.len() });
        }
        if x0.iter().any(|v| !v.is_finite()) {
            return Err(NumError::NonFinite);
        }
    }

    let finish = |shift: Option<&[f64]>, delta: Vec<f64>, iterations, status| {
        let x: Vec<f64> = match shift {
            Some(x0) => x0.iter().zip(&delta).map(|(a, b)| a + b).collect(),
            None => delta,
        };
        let mut r = vec![0.0; rows];
        a.apply_add(&x, &mut r);
        let residual_norm = r
            .iter()
            .zip(b)
            .map(|(ax, bi)| (bi - ax) * (bi - ax))
            .sum::<f64>()
            .sqrt();
        LsqrResult { x, residual_norm, iterations, status }
    };

    // u = b - A x0, the starting residual.
    let mut u: Vec<f64> = b.to_vec();
    if let Some(x0) = x0 {
        let mut ax0 = vec![0.0; rows];
        a.apply_add(x0, &mut ax0);
        for (ui, axi) in u.iter_mut().zip(&ax0) {
            *ui -= axi;
        }
    }
    let beta0 = norm(&u);
    let tol_r = tol * beta0;

    let mut delta = vec![0.0; cols];
    if beta0 == 0.0 {
        return Ok(finish(x0, delta, 0, LsqrStatus::Converged));
    }
    scale(&mut u, 1.0 / beta0);

    let mut v = vec![0.0; cols];
    a.apply_transpose_add(&u, &mut v);
    let mut alpha = norm(&v);
    if alpha > 0.0 {
        scale(&mut v, 1.0 / alpha);
    } else {
        // A^T r = 0: the starting point is already the least-squares optimum.
        return Ok(finish(x0, delta, 0, LsqrStatus::Converged));
    }

    let mut w = v.clone();
    let mut rhobar = alpha;
    let mut phibar = beta0;
    let mut anorm_sq = 0.0;
    let mut rnorm = beta0;
    let mut history: Vec<f64> = vec![rnorm];
    let mut status = LsqrStatus::MaxIters;
    let mut iterations = max_iter;

    for it in 1..=max_iter {
        // Bidiagonalization step: u = A v - alpha u, v = A^T u - beta v.
        scale(&mut u, -alpha);
        a.apply_add(&v, &mut u);
        let beta = norm(&u);
        anorm_sq += alpha * alpha + beta * beta;
        if beta > 0.0 {
            scale(&mut u, 1.0 / beta);
            scale(&mut v, -beta);
            a.apply_transpose_add(&u, &mut v);
            alpha = norm(&v);
            if alpha > 0.0 {
                scale(&mut v, 1.0 / alpha);
            }
        }

        // Plane rotation turning the lower bidiagonal system upper bidiagonal.
        let rho = rhobar.hypot(beta);
        if rho == 0.0 {
            status = LsqrStatus::Converged;
            iterations = it;
            break;
        }
        let c = rhobar / rho;
        let s = beta / rho;
        let theta = s * alpha;
        rhobar = -c * alpha;
        let phi = c * phibar;
        phibar = s * phibar;

        let t1 = phi / rho;
        let t2 = -theta / rho;
        for k in 0..cols {
            delta[k] += t1 * w[k];
            w[k] = v[k] + t2 * w[k];
        }

        rnorm = phibar;
        let arnorm = alpha * (s * phi).abs();
        let anorm = anorm_sq.sqrt();

        if rnorm <= tol_r {
            status = LsqrStatus::Converged;
            iterations = it;
            break;
        }
        if arnorm <= atol * anorm * rnorm {
            status = LsqrStatus::Converged;
            iterations = it;
            break;
        }
        history.push(rnorm);
        if history.len() > PLATEAU_WINDOW {
            let before = history[history.len() - 1 - PLATEAU_WINDOW];
            if before > 0.0 && (before - rnorm) / before < PLATEAU_REL_DECREASE {
                status = LsqrStatus::ResidualFloor;
                iterations = it;
                break;
            }
        }
    }

    let mut result = finish(x0, delta, iterations, status);
    // The estimate can run slightly ahead of or behind the true residual;
    // judge convergence on the recomputed value.
    if result.residual_norm <= tol_r {
        result.status = LsqrStatus::Converged;
    }
    Ok(result)
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn scale(x: &mut [f64], s: f64) {
    for v in x {
        *v *= s;
    }
}
