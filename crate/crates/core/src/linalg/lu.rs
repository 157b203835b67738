//! Banded LU factorization with partial pivoting for nonsymmetric systems.

use super::sparse::CsrMatrix;
use crate::error::{check_dim, Error, Result};

/// `P A = L U` for a matrix with lower bandwidth `kl` and upper bandwidth
/// `ku`. Pivoting widens the upper band of `U` to `kl + ku`.
#[derive(Debug, Clone)]
pub struct BandedLu {
    n: usize,
    kl: usize,
    width: usize,
    // row i holds columns i-kl ..= i+ku+kl, stored at offset j + kl - i
    band: Vec<f64>,
    pivots: Vec<usize>,
    multipliers: Vec<f64>,
}

impl BandedLu {
    pub fn factor(a: &CsrMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::InvalidArgument(format!(
                "LU needs a square matrix, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        let n = a.rows();
        let (kl, ku) = a.bandwidths();
        let width = 2 * kl + ku + 1;
        let mut band = vec![0.0; n * width];
        for i in 0..n {
            for (j, v) in a.row(i) {
                band[i * width + j + kl - i] = v;
            }
        }
        let scale = band.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let idx = |i: usize, j: usize| i * width + j + kl - i;

        let mut pivots = vec![0; n];
        let mut multipliers = vec![0.0; n * kl.max(1)];
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = band[idx(k, k)].abs();
            for i in k + 1..=last_row {
                let v = band[idx(i, k)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best <= f64::EPSILON * scale * n as f64 || !best.is_finite() {
                return Err(Error::SolverFailure { residual: f64::NAN });
            }
            pivots[k] = p;
            let last_col = (k + ku + kl).min(n - 1);
            if p != k {
                for j in k..=last_col {
                    band.swap(idx(k, j), idx(p, j));
                }
            }
            let pivot = band[idx(k, k)];
            for i in k + 1..=last_row {
                let m = band[idx(i, k)] / pivot;
                multipliers[k * kl + (i - k - 1)] = m;
                band[idx(i, k)] = 0.0;
                if m != 0.0 {
                    for j in k + 1..=last_col {
                        band[idx(i, j)] -= m * band[idx(k, j)];
                    }
                }
            }
        }
        Ok(Self {
            n,
            kl,
            width,
            band,
            pivots,
            multipliers,
        })
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.n, b.len())?;
        let (n, kl, width) = (self.n, self.kl, self.width);
        let mut x = b.to_vec();
        for k in 0..n {
            x.swap(k, self.pivots[k]);
            let xk = x[k];
            for i in k + 1..=(k + kl).min(n - 1) {
                x[i] -= self.multipliers[k * kl + (i - k - 1)] * xk;
            }
        }
        let upper = width - kl - 1;
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..=(i + upper).min(n - 1) {
                s -= self.band[i * width + j + kl - i] * x[j];
            }
            x[i] = s / self.band[i * width + kl];
        }
        Ok(x)
    }
}
