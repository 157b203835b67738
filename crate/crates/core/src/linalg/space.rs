use super::sparse::CsrMatrix;
use crate::error::{check_dim, Error, Result};

/// A coefficient space with inner product `(u, v)_W = uᵀ W v` for a
/// symmetric positive definite Gram (mass) matrix `W`.
#[derive(Debug, Clone)]
pub struct WeightedSpace {
    gram: CsrMatrix,
}

impl WeightedSpace {
    pub fn new(gram: CsrMatrix) -> Result<Self> {
        if !gram.is_square() {
            return Err(Error::InvalidArgument("Gram matrix must be square".into()));
        }
        if !gram.is_symmetric() {
            return Err(Error::InvalidArgument("Gram matrix must be symmetric".into()));
        }
        Ok(Self { gram })
    }

    /// The Euclidean space `ℝⁿ`.
    pub fn euclidean(n: usize) -> Self {
        Self {
            gram: CsrMatrix::identity(n),
        }
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    pub fn gram(&self) -> &CsrMatrix {
        &self.gram
    }

    pub fn wdot(&self, u: &[f64], v: &[f64]) -> Result<f64> {
        check_dim(self.dim(), u.len())?;
        check_dim(self.dim(), v.len())?;
        let mut s = 0.0;
        for (i, &ui) in u.iter().enumerate() {
            if ui == 0.0 {
                continue;
            }
            let row: f64 = self.gram.row(i).map(|(j, w)| w * v[j]).sum();
            s += ui * row;
        }
        Ok(s)
    }

    pub fn wnorm(&self, u: &[f64]) -> Result<f64> {
        Ok(self.wdot(u, u)?.max(0.0).sqrt())
    }
}
