//! Envelope (skyline) Cholesky factorization.
//!
//! Row `i` of the lower factor is stored contiguously from its first
//! structural nonzero column up to the diagonal. FEM matrices in natural grid
//! ordering have an envelope of width about one grid line, and the cyclic
//! boundary mass only fills the last row, so this layout is compact for every
//! system in the crate.

use super::sparse::CsrMatrix;
use crate::error::{check_dim, Error, Result};

#[derive(Debug, Clone)]
pub struct SkylineCholesky {
    n: usize,
    first: Vec<usize>,
    start: Vec<usize>,
    values: Vec<f64>,
}

impl SkylineCholesky {
    /// Factors `A = L Lᵀ`, reading only the lower triangle of `a`.
    pub fn factor(a: &CsrMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::InvalidArgument(format!(
                "Cholesky needs a square matrix, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        let n = a.rows();
        let mut first = Vec::with_capacity(n);
        let mut start = Vec::with_capacity(n + 1);
        start.push(0);
        for i in 0..n {
            let f = a.row(i).map(|(j, _)| j).filter(|&j| j <= i).min().unwrap_or(i);
            first.push(f);
            start.push(start[i] + (i - f + 1));
        }
        let mut values = vec![0.0; start[n]];
        for i in 0..n {
            for (j, v) in a.row(i) {
                if j <= i {
                    values[start[i] + j - first[i]] = v;
                }
            }
        }

        for i in 0..n {
            let fi = first[i];
            let row_i = start[i];
            for j in fi..=i {
                let fj = first[j];
                let row_j = start[j];
                let lo = fi.max(fj);
                let mut s = values[row_i + j - fi];
                for k in lo..j {
                    s -= values[row_i + k - fi] * values[row_j + k - fj];
                }
                if j < i {
                    s /= values[row_j + j - fj];
                    values[row_i + j - fi] = s;
                } else {
                    if !(s > 0.0) || !s.is_finite() {
                        return Err(Error::NotSpd { pivot: i, value: s });
                    }
                    values[row_i + i - fi] = s.sqrt();
                }
            }
        }
        Ok(Self {
            n,
            first,
            start,
            values,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Stored entries of the factor, a proxy for memory use.
    pub fn envelope_size(&self) -> usize {
        self.values.len()
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.n, b.len())?;
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        Ok(x)
    }

    pub fn solve_in_place(&self, x: &mut [f64]) {
        let n = self.n;
        for i in 0..n {
            let fi = self.first[i];
            let row = &self.values[self.start[i]..self.start[i + 1]];
            let mut s = x[i];
            for k in fi..i {
                s -= row[k - fi] * x[k];
            }
            x[i] = s / row[i - fi];
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let row = &self.values[self.start[i]..self.start[i + 1]];
            let xi = x[i] / row[i - fi];
            x[i] = xi;
            for k in fi..i {
                x[k] -= row[k - fi] * xi;
            }
        }
    }
}
