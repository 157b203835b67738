//! Jacobi-preconditioned conjugate gradients.

use super::sparse::CsrMatrix;
use super::vector::{axpy, dot, norm2};
use crate::error::{check_dim, Error, Result};

/// Solves `A x = b` for SPD `A` to `‖Ax − b‖₂ ≤ tol·‖b‖₂`.
///
/// Nonpositive curvature `pᵀAp ≤ 0` along a search direction is reported as
/// [`Error::NotSpd`].
pub fn pcg(a: &CsrMatrix, b: &[f64], tol: f64, max_iter: usize) -> Result<Vec<f64>> {
    check_dim(a.rows(), b.len())?;
    check_dim(a.cols(), b.len())?;
    let n = b.len();
    let bnorm = norm2(b);
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return Ok(x);
    }
    let inv_diag: Vec<f64> = a
        .diagonal()
        .iter()
        .map(|&d| if d > 0.0 { 1.0 / d } else { 1.0 })
        .collect();
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    for _ in 0..max_iter {
        let ap = a.mul_vec_unchecked(&p);
        let curvature = dot(&p, &ap);
        if !(curvature > 0.0) {
            return Err(Error::NotSpd {
                pivot: 0,
                value: curvature,
            });
        }
        let step = rz / curvature;
        axpy(step, &p, &mut x);
        axpy(-step, &ap, &mut r);
        if norm2(&r) <= tol * bnorm {
            return Ok(x);
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_next = dot(&r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::SolverFailure {
        residual: norm2(&r) / bnorm,
    })
}
