//! Compressed-row sparse matrices and a triplet assembly buffer.

use crate::error::{check_dim, Result};

/// Triplet assembly buffer. Duplicate entries are summed on finalization.
#[derive(Debug, Clone)]
pub struct TripletBuilder {
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl TripletBuilder {
    pub fn new(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: Vec::new(),
        }
    }

    pub fn with_capacity(rows: usize, cols: usize, cap: usize) -> Self {
        Self {
            rows,
            cols,
            entries: Vec::with_capacity(cap),
        }
    }

    /// Adds `value` at `(i, j)`. Panics on out-of-bounds indices, which are
    /// always assembly bugs.
    pub fn push(&mut self, i: usize, j: usize, value: f64) {
        assert!(
            i < self.rows && j < self.cols,
            "triplet ({i}, {j}) out of bounds for {}x{}",
            self.rows,
            self.cols
        );
        self.entries.push((i, j, value));
    }

    pub fn build(self) -> CsrMatrix {
        self.finalize(false)
    }

    /// Finalizes and enforces `a_ij == a_ji` bitwise by averaging mirrored
    /// entries. The sparsity pattern is symmetrized as well.
    pub fn build_symmetric(self) -> CsrMatrix {
        assert_eq!(self.rows, self.cols, "symmetric assembly needs a square matrix");
        let mut entries = self.entries;
        let mirrored: Vec<_> = entries.iter().map(|&(i, j, v)| (j, i, v)).collect();
        entries.extend(mirrored);
        let mut m = TripletBuilder {
            rows: self.rows,
            cols: self.cols,
            entries,
        }
        .finalize(true);
        // every entry was added twice (once mirrored)
        for v in &mut m.data {
            *v *= 0.5;
        }
        m
    }

    fn finalize(mut self, symmetric: bool) -> CsrMatrix {
        self.entries
            .sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut indptr = vec![0usize; self.rows + 1];
        let mut indices = Vec::with_capacity(self.entries.len());
        let mut data: Vec<f64> = Vec::with_capacity(self.entries.len());
        let mut last: Option<(usize, usize)> = None;
        for &(i, j, v) in &self.entries {
            if last == Some((i, j)) {
                *data.last_mut().unwrap() += v;
            } else {
                indices.push(j);
                data.push(v);
                indptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..self.rows {
            indptr[i + 1] += indptr[i];
        }
        CsrMatrix {
            rows: self.rows,
            cols: self.cols,
            indptr,
            indices,
            data,
            symmetric,
        }
    }
}

/// Compressed sparse row matrix with sorted column indices per row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    rows: usize,
    cols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    data: Vec<f64>,
    symmetric: bool,
}

impl CsrMatrix {
    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![1.0; n])
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self {
            rows: n,
            cols: n,
            indptr: (0..=n).collect(),
            indices: (0..n).collect(),
            data: diag.to_vec(),
            symmetric: true,
        }
    }

    /// Builds from a row-major dense array, dropping exact zeros.
    pub fn from_dense(rows: usize, cols: usize, values: &[f64]) -> Result<Self> {
        check_dim(rows * cols, values.len())?;
        let mut b = TripletBuilder::new(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                let v = values[i * cols + j];
                if v != 0.0 {
                    b.push(i, j, v);
                }
            }
        }
        let mut m = b.build();
        m.symmetric = rows == cols && m.is_structurally_symmetric();
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.data.len()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// True when the matrix was assembled symmetric (or verified so).
    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    fn is_structurally_symmetric(&self) -> bool {
        (0..self.rows).all(|i| self.row(i).all(|(j, v)| self.get(j, i) == v))
    }

    /// Iterates over `(col, value)` pairs of row `i`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.indptr[i]..self.indptr[i + 1];
        self.indices[span.clone()]
            .iter()
            .copied()
            .zip(self.data[span].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let span = self.indptr[i]..self.indptr[i + 1];
        match self.indices[span.clone()].binary_search(&j) {
            Ok(pos) => self.data[span.start + pos],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).collect()
    }

    /// Lower and upper bandwidths.
    pub fn bandwidths(&self) -> (usize, usize) {
        let mut lower = 0;
        let mut upper = 0;
        for i in 0..self.rows {
            for (j, _) in self.row(i) {
                if j < i {
                    lower = lower.max(i - j);
                } else {
                    upper = upper.max(j - i);
                }
            }
        }
        (lower, upper)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.cols, x.len())?;
        Ok(self.mul_vec_unchecked(x))
    }

    pub(crate) fn mul_vec_unchecked(&self, x: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|i| self.row(i).map(|(j, v)| v * x[j]).sum())
            .collect()
    }

    /// `y = Aᵀ x`.
    pub fn mul_transpose_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.rows, x.len())?;
        let mut y = vec![0.0; self.cols];
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0.0 {
                continue;
            }
            for (j, v) in self.row(i) {
                y[j] += v * xi;
            }
        }
        Ok(y)
    }

    pub fn transpose(&self) -> CsrMatrix {
        let mut b = TripletBuilder::with_capacity(self.cols, self.rows, self.nnz());
        for i in 0..self.rows {
            for (j, v) in self.row(i) {
                b.push(j, i, v);
            }
        }
        let mut t = b.build();
        t.symmetric = self.symmetric;
        t
    }

    pub fn scaled(&self, alpha: f64) -> CsrMatrix {
        let mut m = self.clone();
        for v in &mut m.data {
            *v *= alpha;
        }
        m
    }

    /// `self + alpha * other` on the union of both patterns.
    pub fn add_scaled(&self, other: &CsrMatrix, alpha: f64) -> Result<CsrMatrix> {
        check_dim(self.rows, other.rows)?;
        check_dim(self.cols, other.cols)?;
        let mut b = TripletBuilder::with_capacity(self.rows, self.cols, self.nnz() + other.nnz());
        for i in 0..self.rows {
            for (j, v) in self.row(i) {
                b.push(i, j, v);
            }
            for (j, v) in other.row(i) {
                b.push(i, j, alpha * v);
            }
        }
        let mut m = b.build();
        m.symmetric = self.symmetric && other.symmetric;
        Ok(m)
    }

    /// Extracts `A[rows, cols]` for the given index lists.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> CsrMatrix {
        let mut col_map = vec![usize::MAX; self.cols];
        for (local, &c) in cols.iter().enumerate() {
            col_map[c] = local;
        }
        let mut b = TripletBuilder::new(rows.len(), cols.len());
        for (li, &i) in rows.iter().enumerate() {
            for (j, v) in self.row(i) {
                let lj = col_map[j];
                if lj != usize::MAX {
                    b.push(li, lj, v);
                }
            }
        }
        let mut m = b.build();
        m.symmetric = self.symmetric && rows == cols;
        m
    }

    /// Dense row-major copy; intended for small matrices and tests.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.rows * self.cols];
        for i in 0..self.rows {
            for (j, v) in self.row(i) {
                out[i * self.cols + j] = v;
            }
        }
        out
    }
}

/// Block-diagonal matrix with `count` copies of `block`.
pub fn block_diagonal(block: &CsrMatrix, count: usize) -> CsrMatrix {
    let (r, c) = (block.rows(), block.cols());
    let mut b = TripletBuilder::with_capacity(r * count, c * count, block.nnz() * count);
    for n in 0..count {
        for i in 0..r {
            for (j, v) in block.row(i) {
                b.push(n * r + i, n * c + j, v);
            }
        }
    }
    let mut m = b.build();
    m.symmetric = block.is_symmetric();
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Error;

    #[test]
    fn duplicates_are_summed() {
        let mut b = TripletBuilder::new(2, 2);
        b.push(0, 0, 1.0);
        b.push(0, 0, 2.5);
        b.push(1, 0, -1.0);
        let m = b.build();
        assert_eq!(m.get(0, 0), 3.5);
        assert_eq!(m.get(1, 0), -1.0);
        assert_eq!(m.get(0, 1), 0.0);
        assert_eq!(m.nnz(), 2);
    }

    #[test]
    fn symmetric_build_mirrors_exactly() {
        let mut b = TripletBuilder::new(3, 3);
        b.push(0, 1, 0.1);
        b.push(1, 0, 0.1 + 1e-17);
        b.push(2, 1, 0.3);
        b.push(1, 2, 0.2);
        let m = b.build_symmetric();
        assert!(m.is_symmetric());
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(m.get(i, j).to_bits(), m.get(j, i).to_bits());
            }
        }
        assert!((m.get(1, 2) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn matvec_and_transpose() {
        let m = CsrMatrix::from_dense(2, 3, &[1.0, 0.0, 2.0, 0.0, 3.0, 4.0]).unwrap();
        assert_eq!(m.mul_vec(&[1.0, 1.0, 1.0]).unwrap(), vec![3.0, 7.0]);
        assert_eq!(m.mul_transpose_vec(&[1.0, 2.0]).unwrap(), vec![1.0, 6.0, 10.0]);
        assert_eq!(m.transpose().to_dense(), vec![1.0, 0.0, 0.0, 3.0, 2.0, 4.0]);
        assert!(matches!(
            m.mul_vec(&[1.0]),
            Err(Error::DimensionMismatch { expected: 3, got: 1 })
        ));
    }

    #[test]
    fn submatrix_and_bandwidth() {
        let m = CsrMatrix::from_dense(3, 3, &[4.0, 1.0, 0.0, 1.0, 4.0, 1.0, 0.0, 1.0, 4.0]).unwrap();
        assert!(m.is_symmetric());
        assert_eq!(m.bandwidths(), (1, 1));
        let s = m.submatrix(&[0, 2], &[0, 2]);
        assert_eq!(s.to_dense(), vec![4.0, 0.0, 0.0, 4.0]);
        let bd = block_diagonal(&s, 2);
        assert_eq!(bd.rows(), 4);
        assert_eq!(bd.get(3, 3), 4.0);
    }
}
