//! Dense vectors, sparse matrices, SPD and general linear solves, and
//! weighted inner products.

mod cg;
mod cholesky;
mod lu;
mod space;
mod sparse;
mod vector;

pub use cg::pcg;
pub use cholesky::SkylineCholesky;
pub use lu::BandedLu;
pub use space::WeightedSpace;
pub use sparse::{block_diagonal, CsrMatrix, TripletBuilder};
pub use vector::{add, all_finite, axpy, dot, norm2, scale, sub, DenseVector};

use crate::error::{check_dim, Error, Result};

/// Systems up to this many unknowns are factored directly.
pub const DIRECT_SOLVE_THRESHOLD: usize = 200_000;

pub const DEFAULT_TOL: f64 = 1e-12;

const REFINEMENT_STEPS: usize = 3;

/// `(u, v)_W`.
pub fn wdot(space: &WeightedSpace, u: &[f64], v: &[f64]) -> Result<f64> {
    space.wdot(u, v)
}

/// `‖u‖_W`.
pub fn wnorm(space: &WeightedSpace, u: &[f64]) -> Result<f64> {
    space.wnorm(u)
}

/// Solves an SPD system to `‖Ax − b‖₂ ≤ tol·‖b‖₂`.
pub fn solve_spd(a: &CsrMatrix, b: &[f64], tol: f64) -> Result<DenseVector> {
    SpdSolver::new(a, tol)?.solve(b)
}

/// Solves a square nonsingular system to `‖Ax − b‖₂ ≤ tol·‖b‖₂`.
pub fn solve_general(a: &CsrMatrix, b: &[f64], tol: f64) -> Result<DenseVector> {
    check_dim(a.rows(), b.len())?;
    let lu = BandedLu::factor(a)?;
    let mut x = lu.solve(b)?;
    refine(a, b, tol, &mut x, |r| lu.solve(r))?;
    Ok(x)
}

fn refine(
    a: &CsrMatrix,
    b: &[f64],
    tol: f64,
    x: &mut [f64],
    correction: impl Fn(&[f64]) -> Result<DenseVector>,
) -> Result<()> {
    let bnorm = norm2(b);
    let mut rel = 0.0;
    for _ in 0..=REFINEMENT_STEPS {
        let ax = a.mul_vec_unchecked(x);
        let r = sub(b, &ax);
        let rnorm = norm2(&r);
        rel = if bnorm > 0.0 { rnorm / bnorm } else { rnorm };
        if rnorm <= tol * bnorm || rnorm == 0.0 {
            return Ok(());
        }
        let dx = correction(&r)?;
        axpy(1.0, &dx, x);
    }
    if !rel.is_finite() || rel > tol {
        return Err(Error::SolverFailure { residual: rel });
    }
    Ok(())
}

/// A factor-once SPD solver: a direct envelope Cholesky below
/// [`DIRECT_SOLVE_THRESHOLD`] unknowns, Jacobi-PCG above it. Immutable after
/// construction, so it can be shared across threads.
#[derive(Debug, Clone)]
pub struct SpdSolver {
    matrix: CsrMatrix,
    tol: f64,
    factor: Option<SkylineCholesky>,
}

impl SpdSolver {
    pub fn new(a: &CsrMatrix, tol: f64) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::InvalidArgument("SPD solve needs a square matrix".into()));
        }
        let factor = if a.rows() <= DIRECT_SOLVE_THRESHOLD {
            Some(SkylineCholesky::factor(a)?)
        } else {
            None
        };
        Ok(Self {
            matrix: a.clone(),
            tol,
            factor,
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn solve(&self, b: &[f64]) -> Result<DenseVector> {
        check_dim(self.dim(), b.len())?;
        match &self.factor {
            Some(f) => {
                let mut x = f.solve(b)?;
                refine(&self.matrix, b, self.tol, &mut x, |r| f.solve(r))?;
                Ok(x)
            }
            None => pcg(&self.matrix, b, self.tol, 10 * self.dim().max(100)),
        }
    }
}
