//! Dirichlet boundary control of `−Δy = f` on the unit square.
//!
//! The control is a P1 function on the boundary curve, imposed strongly as
//! the Dirichlet trace of the state. The reduced gradient lives in
//! `L²(Γ)`, represented by the boundary mass `M_Γ`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use super::mesh::UnitSquareMesh;
use super::Field2;
use crate::error::{check_dim, Error, Result};
use crate::linalg::{sub, CsrMatrix, DenseVector, SpdSolver, WeightedSpace, DEFAULT_TOL};
use crate::solver::GradientProblem;

#[derive(Clone)]
pub struct PoissonConfig {
    pub beta: f64,
    pub level: u32,
    pub f: Field2,
    pub yd: Field2,
}

impl PoissonConfig {
    pub fn new(beta: f64, level: u32, f: Field2, yd: Field2) -> Self {
        Self { beta, level, f, yd }
    }

    /// `f = 10 sin(π(x1 + x2))`, `y_d = (x1² + x2²)^{1/3}`.
    pub fn example1(beta: f64, level: u32) -> Self {
        Self::new(
            beta,
            level,
            Arc::new(|x, y| 10.0 * (PI * (x + y)).sin()),
            Arc::new(|x, y| (x * x + y * y).cbrt()),
        )
    }
}

impl fmt::Debug for PoissonConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PoissonConfig")
            .field("beta", &self.beta)
            .field("level", &self.level)
            .finish_non_exhaustive()
    }
}

/// Assembled reduced problem. Factorizations are computed once in
/// [`PoissonProblem::new`] and only read afterwards.
pub struct PoissonProblem {
    config: PoissonConfig,
    mesh: UnitSquareMesh,
    stiffness: CsrMatrix,
    mass: CsrMatrix,
    boundary_mass: CsrMatrix,
    k_ib: CsrMatrix,
    interior_solver: SpdSolver,
    boundary_solver: SpdSolver,
    f_h: DenseVector,
    yd_h: DenseVector,
    mf: DenseVector,
    space: WeightedSpace,
}

impl fmt::Debug for PoissonProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PoissonProblem")
            .field("config", &self.config)
            .field("nodes", &self.mesh.num_nodes())
            .finish_non_exhaustive()
    }
}

impl PoissonProblem {
    pub fn new(config: PoissonConfig) -> Result<Self> {
        if !(config.beta > 0.0) {
            return Err(Error::InvalidArgument(format!("beta must be positive, got {}", config.beta)));
        }
        if config.level < 2 {
            return Err(Error::InvalidArgument(format!("level must be at least 2, got {}", config.level)));
        }
        let mesh = UnitSquareMesh::new(config.level);
        let (stiffness, mass) = mesh.assemble_p1();
        let (interior, boundary) = (mesh.interior(), mesh.boundary());
        let boundary_mass = mesh.edge_mass(&mesh.boundary_edges()).submatrix(boundary, boundary);
        let k_ii = stiffness.submatrix(interior, interior);
        let k_ib = stiffness.submatrix(interior, boundary);
        let interior_solver = SpdSolver::new(&k_ii, DEFAULT_TOL)?;
        let boundary_solver = SpdSolver::new(&boundary_mass, DEFAULT_TOL)?;
        let f_h = mesh.interpolate(|x, y| (config.f)(x, y));
        let yd_h = mesh.interpolate(|x, y| (config.yd)(x, y));
        let mf = mass.mul_vec(&f_h)?;
        let space = WeightedSpace::new(boundary_mass.clone())?;
        Ok(Self {
            config,
            mesh,
            stiffness,
            mass,
            boundary_mass,
            k_ib,
            interior_solver,
            boundary_solver,
            f_h,
            yd_h,
            mf,
            space,
        })
    }

    pub fn config(&self) -> &PoissonConfig {
        &self.config
    }

    pub fn mesh(&self) -> &UnitSquareMesh {
        &self.mesh
    }

    pub fn stiffness(&self) -> &CsrMatrix {
        &self.stiffness
    }

    pub fn mass(&self) -> &CsrMatrix {
        &self.mass
    }

    /// `M_Γ` over boundary nodes in counterclockwise order.
    pub fn boundary_mass(&self) -> &CsrMatrix {
        &self.boundary_mass
    }

    pub fn f_h(&self) -> &[f64] {
        &self.f_h
    }

    pub fn yd_h(&self) -> &[f64] {
        &self.yd_h
    }

    /// Full nodal state with `y_B = u` and `K_II y_I = (M f)_I − K_IB u`.
    pub fn solve_state(&self, u: &[f64]) -> Result<DenseVector> {
        check_dim(self.mesh.boundary().len(), u.len())?;
        let kib_u = self.k_ib.mul_vec(u)?;
        let rhs: Vec<f64> = self
            .mesh
            .interior()
            .iter()
            .zip(&kib_u)
            .map(|(&i, ku)| self.mf[i] - ku)
            .collect();
        let y_i = self.interior_solver.solve(&rhs)?;
        let mut y = vec![0.0; self.mesh.num_nodes()];
        for (&b, &ub) in self.mesh.boundary().iter().zip(u) {
            y[b] = ub;
        }
        for (&i, yi) in self.mesh.interior().iter().zip(y_i) {
            y[i] = yi;
        }
        Ok(y)
    }

    /// Adjoint state vanishing on the boundary with
    /// `K_II p_I = (M(y − y_d))_I`.
    pub fn solve_adjoint(&self, y: &[f64]) -> Result<DenseVector> {
        check_dim(self.mesh.num_nodes(), y.len())?;
        let mr = self.mass.mul_vec(&sub(y, &self.yd_h))?;
        let rhs: Vec<f64> = self.mesh.interior().iter().map(|&i| mr[i]).collect();
        let p_i = self.interior_solver.solve(&rhs)?;
        let mut p = vec![0.0; self.mesh.num_nodes()];
        for (&i, pi) in self.mesh.interior().iter().zip(p_i) {
            p[i] = pi;
        }
        Ok(p)
    }

    /// Boundary vector `d` with `M_Γ d = [K p − M(y − y_d)]_B`.
    ///
    /// The interior rows of `K p − M(y − y_d)` vanish by construction of `p`;
    /// a violation beyond `1e-10` relative is reported as a solver failure.
    pub fn discrete_normal_derivative(&self, p: &[f64], y: &[f64]) -> Result<DenseVector> {
        check_dim(self.mesh.num_nodes(), p.len())?;
        check_dim(self.mesh.num_nodes(), y.len())?;
        let kp = self.stiffness.mul_vec(p)?;
        let mr = self.mass.mul_vec(&sub(y, &self.yd_h))?;
        let w = sub(&kp, &mr);
        let scale = mr.iter().chain(&kp).fold(0.0f64, |m, v| m.max(v.abs()));
        let interior_residual = self
            .mesh
            .interior()
            .iter()
            .fold(0.0f64, |m, &i| m.max(w[i].abs()));
        if interior_residual > 1e-10 * scale.max(1.0) {
            return Err(Error::SolverFailure {
                residual: interior_residual,
            });
        }
        let rhs: Vec<f64> = self.mesh.boundary().iter().map(|&b| w[b]).collect();
        self.boundary_solver.solve(&rhs)
    }

    /// `½(y − y_d)ᵀM(y − y_d) + (β/2) uᵀM_Γu`.
    pub fn objective_value(&self, u: &[f64]) -> Result<f64> {
        let y = self.solve_state(u)?;
        let r = sub(&y, &self.yd_h);
        let misfit = crate::linalg::dot(&r, &self.mass.mul_vec(&r)?);
        Ok(0.5 * misfit + 0.5 * self.config.beta * self.space.wdot(u, u)?)
    }
}

impl GradientProblem for PoissonProblem {
    fn space(&self) -> &WeightedSpace {
        &self.space
    }

    /// `G = βu − d` with `d` from [`PoissonProblem::discrete_normal_derivative`].
    fn gradient(&self, u: &[f64]) -> Result<DenseVector> {
        let y = self.solve_state(u)?;
        let p = self.solve_adjoint(&y)?;
        let d = self.discrete_normal_derivative(&p, &y)?;
        Ok(u.iter()
            .zip(&d)
            .map(|(ui, di)| self.config.beta * ui - di)
            .collect())
    }

    fn objective(&self, u: &[f64]) -> Option<Result<f64>> {
        Some(self.objective_value(u))
    }
}
