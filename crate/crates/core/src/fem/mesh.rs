//! Uniform triangulation of the unit square.

use crate::linalg::{CsrMatrix, TripletBuilder};

/// `(2^L + 1)²` nodes numbered row by row from the origin; every grid square
/// is split along its lower-left to upper-right diagonal.
#[derive(Debug, Clone)]
pub struct UnitSquareMesh {
    level: u32,
    cells: usize,
    coords: Vec<[f64; 2]>,
    triangles: Vec<[usize; 3]>,
    boundary: Vec<usize>,
    interior: Vec<usize>,
}

impl UnitSquareMesh {
    pub fn new(level: u32) -> Self {
        let n = 1usize << level;
        let node = |i: usize, j: usize| j * (n + 1) + i;
        let step = 1.0 / n as f64;
        let coords = (0..=n)
            .flat_map(|j| (0..=n).map(move |i| [i as f64 * step, j as f64 * step]))
            .collect();
        let mut triangles = Vec::with_capacity(2 * n * n);
        for j in 0..n {
            for i in 0..n {
                let (ll, lr, ur, ul) = (node(i, j), node(i + 1, j), node(i + 1, j + 1), node(i, j + 1));
                triangles.push([ll, lr, ur]);
                triangles.push([ll, ur, ul]);
            }
        }
        // counterclockwise from the origin: bottom, right, top, left
        let mut boundary = Vec::with_capacity(4 * n);
        boundary.extend((0..n).map(|i| node(i, 0)));
        boundary.extend((0..n).map(|j| node(n, j)));
        boundary.extend((1..=n).rev().map(|i| node(i, n)));
        boundary.extend((1..=n).rev().map(|j| node(0, j)));
        let interior = (1..n)
            .flat_map(|j| (1..n).map(move |i| node(i, j)))
            .collect();
        Self {
            level,
            cells: n,
            coords,
            triangles,
            boundary,
            interior,
        }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// Cells per side, `2^L`.
    pub fn cells_per_side(&self) -> usize {
        self.cells
    }

    /// Triangle diameter `2^{-L}·√2`.
    pub fn h(&self) -> f64 {
        std::f64::consts::SQRT_2 / self.cells as f64
    }

    pub fn node(&self, i: usize, j: usize) -> usize {
        j * (self.cells + 1) + i
    }

    pub fn num_nodes(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[[f64; 2]] {
        &self.coords
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    /// Boundary nodes in counterclockwise order starting at the origin.
    pub fn boundary(&self) -> &[usize] {
        &self.boundary
    }

    pub fn interior(&self) -> &[usize] {
        &self.interior
    }

    pub fn interpolate(&self, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        self.coords.iter().map(|&[x, y]| f(x, y)).collect()
    }

    fn signed_area(&self, t: &[usize; 3]) -> f64 {
        let [a, b, c] = t.map(|v| self.coords[v]);
        0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
    }

    /// Full P1 stiffness and consistent mass matrices.
    pub fn assemble_p1(&self) -> (CsrMatrix, CsrMatrix) {
        let nn = self.num_nodes();
        let mut k = TripletBuilder::with_capacity(nn, nn, 9 * self.triangles.len());
        let mut m = TripletBuilder::with_capacity(nn, nn, 9 * self.triangles.len());
        for t in &self.triangles {
            let area = self.signed_area(t);
            let p = t.map(|v| self.coords[v]);
            // gradient of the barycentric coordinate of vertex a is
            // (y_b - y_c, x_c - x_b) / (2 area)
            let grads: [[f64; 2]; 3] = std::array::from_fn(|a| {
                let (b, c) = ((a + 1) % 3, (a + 2) % 3);
                [p[b][1] - p[c][1], p[c][0] - p[b][0]]
            });
            for a in 0..3 {
                for b in 0..3 {
                    let g = grads[a][0] * grads[b][0] + grads[a][1] * grads[b][1];
                    k.push(t[a], t[b], g / (4.0 * area));
                    m.push(t[a], t[b], area / 12.0 * if a == b { 2.0 } else { 1.0 });
                }
            }
        }
        (k.build_symmetric(), m.build_symmetric())
    }

    /// 1D P1 mass on a chain of boundary edges, as an `num_nodes` square
    /// matrix. `edges` holds node pairs.
    pub fn edge_mass(&self, edges: &[(usize, usize)]) -> CsrMatrix {
        let nn = self.num_nodes();
        let mut b = TripletBuilder::with_capacity(nn, nn, 4 * edges.len());
        for &(p, q) in edges {
            let [x0, y0] = self.coords[p];
            let [x1, y1] = self.coords[q];
            let len = (x1 - x0).hypot(y1 - y0);
            b.push(p, p, len / 3.0);
            b.push(q, q, len / 3.0);
            b.push(p, q, len / 6.0);
            b.push(q, p, len / 6.0);
        }
        b.build_symmetric()
    }

    /// Edges of the closed boundary curve, following [`Self::boundary`].
    pub fn boundary_edges(&self) -> Vec<(usize, usize)> {
        let b = &self.boundary;
        (0..b.len()).map(|k| (b[k], b[(k + 1) % b.len()])).collect()
    }

    #[cfg(test)]
    pub(crate) fn min_signed_area(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| self.signed_area(t))
            .fold(f64::INFINITY, f64::min)
    }
}
