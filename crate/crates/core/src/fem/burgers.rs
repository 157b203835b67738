//! Distributed control of the viscous Burgers equation on `(0, 1)`.
//!
//! P1 in space with homogeneous Dirichlet ends, implicit Euler in time, and
//! Newton's method for each step. The control lives on the nodes inside the
//! support interval and is constant per time step.

use std::fmt;
use std::sync::Arc;

use super::{time_steps, Field1, Field1T};
use crate::error::{check_dim, Error, Result};
use crate::linalg::{
    add, axpy, block_diagonal, dot, norm2, BandedLu, CsrMatrix, DenseVector, SpdSolver, TripletBuilder,
    WeightedSpace, DEFAULT_TOL,
};
use crate::solver::GradientProblem;

#[derive(Clone)]
pub struct BurgersConfig {
    pub viscosity: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta: f64,
    pub level: u32,
    pub dt: f64,
    pub t_final: f64,
    /// Open interval carrying the control.
    pub support: (f64, f64),
    pub y0: Field1,
    pub yd: Field1T,
    pub zd: Field1,
    pub f: Field1T,
    pub newton_tol: f64,
    pub newton_max: usize,
}

impl BurgersConfig {
    /// `ϑ = 0.01`, `y0 = 5 exp(−20(x − 0.5)²)`, `y_d = z_d = f = 0`, control
    /// on `(0.1, 0.4)`, `T = 1`, `α1 = α2 = 1`.
    pub fn example3(beta: f64, level: u32, dt: f64) -> Self {
        Self {
            viscosity: 0.01,
            alpha1: 1.0,
            alpha2: 1.0,
            beta,
            level,
            dt,
            t_final: 1.0,
            support: (0.1, 0.4),
            y0: Arc::new(|x| 5.0 * (-20.0 * (x - 0.5) * (x - 0.5)).exp()),
            yd: Arc::new(|_, _| 0.0),
            zd: Arc::new(|_| 0.0),
            f: Arc::new(|_, _| 0.0),
            newton_tol: 1e-13,
            newton_max: 30,
        }
    }
}

impl fmt::Debug for BurgersConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BurgersConfig")
            .field("viscosity", &self.viscosity)
            .field("alpha1", &self.alpha1)
            .field("alpha2", &self.alpha2)
            .field("beta", &self.beta)
            .field("level", &self.level)
            .field("dt", &self.dt)
            .field("t_final", &self.t_final)
            .field("support", &self.support)
            .field("newton_tol", &self.newton_tol)
            .field("newton_max", &self.newton_max)
            .finish_non_exhaustive()
    }
}

/// Convection term `c(y)_j = ∫ y y_x φ_j` and its Jacobian for P1 on a
/// uniform mesh. `y` holds all nodal values, including the Dirichlet ends.
pub fn assemble_convection(y: &[f64]) -> (DenseVector, CsrMatrix) {
    let n = y.len();
    let mut c = vec![0.0; n];
    let mut jac = TripletBuilder::with_capacity(n, n, 4 * n);
    for e in 0..n.saturating_sub(1) {
        let (a, b) = (y[e], y[e + 1]);
        c[e] += (b - a) * (2.0 * a + b) / 6.0;
        c[e + 1] += (b - a) * (a + 2.0 * b) / 6.0;
        jac.push(e, e, (b - 4.0 * a) / 6.0);
        jac.push(e, e + 1, (a + 2.0 * b) / 6.0);
        jac.push(e + 1, e, -(2.0 * a + b) / 6.0);
        jac.push(e + 1, e + 1, (4.0 * b - a) / 6.0);
    }
    (c, jac.build())
}

/// Newton residual norms of one time step.
#[derive(Debug, Clone, PartialEq)]
pub struct NewtonLog {
    pub step: usize,
    pub residuals: Vec<f64>,
}

/// States `y^0, …, y^N` on the free nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct BurgersState {
    pub y: Vec<DenseVector>,
    pub newton: Vec<NewtonLog>,
}

pub struct BurgersProblem {
    config: BurgersConfig,
    elements: usize,
    steps: usize,
    dt: f64,
    control: Vec<usize>,
    // free-node matrices, free node i is mesh node i + 1
    mass: CsrMatrix,
    stiffness: CsrMatrix,
    control_solver: SpdSolver,
    y0: DenseVector,
    loads: Vec<DenseVector>,
    yd: Vec<DenseVector>,
    zd: DenseVector,
    space: WeightedSpace,
}

impl fmt::Debug for BurgersProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BurgersProblem")
            .field("config", &self.config)
            .field("steps", &self.steps)
            .field("control", &self.control.len())
            .finish_non_exhaustive()
    }
}

fn p1_matrices_1d(elements: usize) -> (CsrMatrix, CsrMatrix) {
    let h = 1.0 / elements as f64;
    let nf = elements - 1;
    let mut m = TripletBuilder::with_capacity(nf, nf, 3 * nf);
    let mut k = TripletBuilder::with_capacity(nf, nf, 3 * nf);
    for i in 0..nf {
        m.push(i, i, 4.0 * h / 6.0);
        k.push(i, i, 2.0 / h);
        if i + 1 < nf {
            m.push(i, i + 1, h / 6.0);
            m.push(i + 1, i, h / 6.0);
            k.push(i, i + 1, -1.0 / h);
            k.push(i + 1, i, -1.0 / h);
        }
    }
    (m.build_symmetric(), k.build_symmetric())
}

impl BurgersProblem {
    pub fn new(config: BurgersConfig) -> Result<Self> {
        for (name, v) in [
            ("viscosity", config.viscosity),
            ("alpha1", config.alpha1),
            ("alpha2", config.alpha2),
            ("beta", config.beta),
            ("newton_tol", config.newton_tol),
        ] {
            if !(v > 0.0) {
                return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
            }
        }
        if config.level < 2 {
            return Err(Error::InvalidArgument(format!("level must be at least 2, got {}", config.level)));
        }
        let elements = 1usize << config.level;
        let h = 1.0 / elements as f64;
        let steps = time_steps(config.t_final, config.dt)?;
        let dt = config.t_final / steps as f64;
        let (lo, hi) = config.support;
        let control: Vec<usize> = (1..elements)
            .filter(|&j| {
                let x = j as f64 * h;
                x > lo && x < hi
            })
            .map(|j| j - 1)
            .collect();
        if control.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "control support ({lo}, {hi}) contains no nodes at level {}",
                config.level
            )));
        }
        let (mass, stiffness) = p1_matrices_1d(elements);
        let m_hat = mass.submatrix(&control, &control);
        let control_solver = SpdSolver::new(&m_hat, DEFAULT_TOL)?;
        let space = WeightedSpace::new(block_diagonal(&m_hat.scaled(dt), steps))?;
        let nodes = |g: &dyn Fn(f64) -> f64| -> DenseVector {
            (1..elements).map(|j| g(j as f64 * h)).collect()
        };
        let y0 = nodes(&|x| (config.y0)(x));
        let loads = (1..=steps)
            .map(|n| {
                let t = n as f64 * dt;
                mass.mul_vec(&nodes(&|x| (config.f)(t, x)))
            })
            .collect::<Result<_>>()?;
        let yd = (1..=steps)
            .map(|n| {
                let t = n as f64 * dt;
                nodes(&|x| (config.yd)(t, x))
            })
            .collect();
        let zd = nodes(&|x| (config.zd)(x));
        Ok(Self {
            config,
            elements,
            steps,
            dt,
            control,
            mass,
            stiffness,
            control_solver,
            y0,
            loads,
            yd,
            zd,
            space,
        })
    }

    pub fn config(&self) -> &BurgersConfig {
        &self.config
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn h(&self) -> f64 {
        1.0 / self.elements as f64
    }

    /// Control nodes as free-node indices (mesh node minus one).
    pub fn control_indices(&self) -> &[usize] {
        &self.control
    }

    pub fn mass(&self) -> &CsrMatrix {
        &self.mass
    }

    fn control_at<'a>(&self, u: &'a [f64], n: usize) -> &'a [f64] {
        let nc = self.control.len();
        &u[(n - 1) * nc..n * nc]
    }

    fn embed_control(&self, u_n: &[f64]) -> DenseVector {
        let mut v = vec![0.0; self.mass.rows()];
        for (&c, &x) in self.control.iter().zip(u_n) {
            v[c] = x;
        }
        v
    }

    /// Convection on the free nodes, with the zero Dirichlet ends attached.
    fn convection(&self, y: &[f64]) -> (DenseVector, CsrMatrix) {
        let mut full = Vec::with_capacity(y.len() + 2);
        full.push(0.0);
        full.extend_from_slice(y);
        full.push(0.0);
        let (c, jac) = assemble_convection(&full);
        let inner: Vec<usize> = (1..=y.len()).collect();
        (c[1..=y.len()].to_vec(), jac.submatrix(&inner, &inner))
    }

    /// The step Jacobian `M/Δt + ϑK + C(y)`.
    pub fn step_jacobian(&self, y: &[f64]) -> Result<CsrMatrix> {
        let (_, conv) = self.convection(y);
        self.mass
            .scaled(1.0 / self.dt)
            .add_scaled(&self.stiffness, self.config.viscosity)?
            .add_scaled(&conv, 1.0)
    }

    fn step_residual(&self, y: &[f64], y_prev: &[f64], source: &[f64]) -> Result<DenseVector> {
        let (c, _) = self.convection(y);
        let diff: DenseVector = y.iter().zip(y_prev).map(|(a, b)| (a - b) / self.dt).collect();
        let mut r = self.mass.mul_vec(&diff)?;
        axpy(self.config.viscosity, &self.stiffness.mul_vec(y)?, &mut r);
        axpy(1.0, &c, &mut r);
        axpy(-1.0, source, &mut r);
        Ok(r)
    }

    pub fn solve_state(&self, u: &[f64]) -> Result<BurgersState> {
        check_dim(self.space.dim(), u.len())?;
        let mut ys = Vec::with_capacity(self.steps + 1);
        let mut newton = Vec::with_capacity(self.steps);
        ys.push(self.y0.clone());
        for n in 1..=self.steps {
            let source = add(&self.loads[n - 1], &self.mass.mul_vec(&self.embed_control(self.control_at(u, n)))?);
            let y_prev = &ys[n - 1];
            let mut y = y_prev.clone();
            let mut residuals = Vec::new();
            let mut converged = false;
            for _ in 0..=self.config.newton_max {
                let r = self.step_residual(&y, y_prev, &source)?;
                let rn = norm2(&r);
                residuals.push(rn);
                if !rn.is_finite() {
                    break;
                }
                if rn < self.config.newton_tol || self.stagnated(&residuals, &source) {
                    converged = true;
                    break;
                }
                if residuals.len() > self.config.newton_max {
                    break;
                }
                let delta = BandedLu::factor(&self.step_jacobian(&y)?)?.solve(&r)?;
                axpy(-1.0, &delta, &mut y);
            }
            if !converged {
                return Err(Error::NonlinearSolverFailure {
                    step: n,
                    residual: *residuals.last().unwrap(),
                    iterations: residuals.len() - 1,
                });
            }
            newton.push(NewtonLog { step: n, residuals });
            ys.push(y);
        }
        Ok(BurgersState { y: ys, newton })
    }

    /// Accepts a residual at the roundoff floor that no longer decreases.
    fn stagnated(&self, residuals: &[f64], source: &[f64]) -> bool {
        let [.., prev, last] = residuals else {
            return false;
        };
        let floor = 1e-12 * (1.0 + norm2(source) + norm2(&self.y0) / self.dt);
        *last < floor && *last > 0.5 * prev
    }

    /// Backward sweep `J_nᵀ μ_n = ∂J/∂y^n + (M/Δt) μ_{n+1}`; returns
    /// `μ_1, …, μ_N`.
    pub fn solve_adjoint(&self, state: &BurgersState) -> Result<Vec<DenseVector>> {
        check_dim(self.steps + 1, state.y.len())?;
        let c = &self.config;
        let mut mu = vec![Vec::new(); self.steps];
        let mut carry = vec![0.0; self.mass.rows()];
        for n in (1..=self.steps).rev() {
            let y = &state.y[n];
            let r: DenseVector = y.iter().zip(&self.yd[n - 1]).map(|(a, b)| a - b).collect();
            let mut rhs = self.mass.mul_vec(&r)?;
            rhs.iter_mut().for_each(|v| *v *= c.alpha1 * self.dt);
            if n == self.steps {
                let t: DenseVector = y.iter().zip(&self.zd).map(|(a, b)| a - b).collect();
                axpy(c.alpha2, &self.mass.mul_vec(&t)?, &mut rhs);
            }
            axpy(1.0 / self.dt, &carry, &mut rhs);
            let jt = self.step_jacobian(y)?.transpose();
            let m = BandedLu::factor(&jt)?.solve(&rhs)?;
            carry = self.mass.mul_vec(&m)?;
            mu[n - 1] = m;
        }
        Ok(mu)
    }

    /// `α1/2 Σ Δt |y^n − y_d^n|²_M + α2/2 |y^N − z_d|²_M + β/2 Σ Δt u_nᵀM̂u_n`.
    pub fn objective_value(&self, u: &[f64]) -> Result<f64> {
        let state = self.solve_state(u)?;
        self.objective_of_state(&state, u)
    }

    pub fn objective_of_state(&self, state: &BurgersState, u: &[f64]) -> Result<f64> {
        let c = &self.config;
        let mut misfit = 0.0;
        for n in 1..=self.steps {
            let r: DenseVector = state.y[n].iter().zip(&self.yd[n - 1]).map(|(a, b)| a - b).collect();
            misfit += self.dt * dot(&r, &self.mass.mul_vec(&r)?);
        }
        let t: DenseVector = state.y[self.steps].iter().zip(&self.zd).map(|(a, b)| a - b).collect();
        let terminal = dot(&t, &self.mass.mul_vec(&t)?);
        Ok(0.5 * c.alpha1 * misfit + 0.5 * c.alpha2 * terminal + 0.5 * c.beta * self.space.wdot(u, u)?)
    }
}

impl GradientProblem for BurgersProblem {
    fn space(&self) -> &WeightedSpace {
        &self.space
    }

    /// `G_n = βu_n + M̂⁻¹ Bᵀ M μ_n / Δt`.
    fn gradient(&self, u: &[f64]) -> Result<DenseVector> {
        let state = self.solve_state(u)?;
        let mu = self.solve_adjoint(&state)?;
        let mut g = Vec::with_capacity(u.len());
        for n in 1..=self.steps {
            let m_mu = self.mass.mul_vec(&mu[n - 1])?;
            let restricted: DenseVector = self.control.iter().map(|&c| m_mu[c] / self.dt).collect();
            let w = self.control_solver.solve(&restricted)?;
            g.extend(
                self.control_at(u, n)
                    .iter()
                    .zip(w)
                    .map(|(ui, wi)| self.config.beta * ui + wi),
            );
        }
        Ok(g)
    }

    fn objective(&self, u: &[f64]) -> Option<Result<f64>> {
        Some(self.objective_value(u))
    }
}
