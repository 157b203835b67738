//! Neumann boundary control of the wave equation on the unit square.
//!
//! P1 in space on [`UnitSquareMesh`], Crank-Nicolson on the first-order
//! system `y_t = v`, `M v_t = −K y + M f + B u`. The state vanishes on the
//! left and bottom edges; the control acts on the right and top edges and is
//! constant on each time interval. Gradients come from the exact transpose of
//! the time-stepping scheme.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use super::mesh::UnitSquareMesh;
use super::{time_steps, Field2, Field2T};
use crate::error::{check_dim, Error, Result};
use crate::linalg::{
    axpy, block_diagonal, dot, sub, CsrMatrix, DenseVector, SpdSolver, WeightedSpace, DEFAULT_TOL,
};
use crate::solver::GradientProblem;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaveBoundary {
    /// Dirichlet on `x1 = 0` and `x2 = 0`, Neumann control on `x1 = 1` and
    /// `x2 = 1`.
    Mixed,
    /// Homogeneous Dirichlet everywhere and no control.
    AllDirichlet,
}

#[derive(Clone)]
pub struct WaveConfig {
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta: f64,
    pub level: u32,
    pub dt: f64,
    pub t_final: f64,
    pub boundary: WaveBoundary,
    pub y01: Field2,
    pub y02: Field2,
    pub f: Field2T,
    pub yd: Field2T,
    pub zd: Field2,
}

impl WaveConfig {
    /// `y0¹ = sin(πx1) sin(πx2)`, `y0² = 0`, `f = π² sin(πx1 t) sin(πx2 t)`,
    /// `y_d = −x1` left of `x1 = 0.5` and `x1` from there on, `z_d = 0`,
    /// `T = 1`, `α1 = α2 = 1`.
    pub fn example2(beta: f64, level: u32, dt: f64) -> Self {
        Self {
            alpha1: 1.0,
            alpha2: 1.0,
            beta,
            level,
            dt,
            t_final: 1.0,
            boundary: WaveBoundary::Mixed,
            y01: Arc::new(|x, y| (PI * x).sin() * (PI * y).sin()),
            y02: Arc::new(|_, _| 0.0),
            f: Arc::new(|t, x, y| PI * PI * (PI * x * t).sin() * (PI * y * t).sin()),
            yd: Arc::new(|_, x, _| if x < 0.5 { -x } else { x }),
            zd: Arc::new(|_, _| 0.0),
        }
    }
}

impl fmt::Debug for WaveConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WaveConfig")
            .field("alpha1", &self.alpha1)
            .field("alpha2", &self.alpha2)
            .field("beta", &self.beta)
            .field("level", &self.level)
            .field("dt", &self.dt)
            .field("t_final", &self.t_final)
            .field("boundary", &self.boundary)
            .finish_non_exhaustive()
    }
}

/// Displacement and velocity at `t_0, …, t_N` on the free nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveState {
    pub y: Vec<DenseVector>,
    pub v: Vec<DenseVector>,
}

pub struct WaveProblem {
    config: WaveConfig,
    mesh: UnitSquareMesh,
    steps: usize,
    dt: f64,
    free: Vec<usize>,
    control: Vec<usize>,
    mass: CsrMatrix,
    m_ff: CsrMatrix,
    k_ff: CsrMatrix,
    r_ff: CsrMatrix,
    b: CsrMatrix,
    step_solver: SpdSolver,
    control_solver: Option<SpdSolver>,
    y0: DenseVector,
    v0: DenseVector,
    // trapezoidal load M(f^{n-1} + f^n)/2 on free rows, n = 1..=N
    loads: Vec<DenseVector>,
    // y_d at interval midpoints, full nodal vectors
    yd: Vec<DenseVector>,
    zd: DenseVector,
    space: WeightedSpace,
}

impl fmt::Debug for WaveProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WaveProblem")
            .field("config", &self.config)
            .field("steps", &self.steps)
            .field("free", &self.free.len())
            .field("control", &self.control.len())
            .finish_non_exhaustive()
    }
}

impl WaveProblem {
    pub fn new(config: WaveConfig) -> Result<Self> {
        for (name, v) in [("alpha1", config.alpha1), ("alpha2", config.alpha2), ("beta", config.beta)] {
            if !(v > 0.0) {
                return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
            }
        }
        if config.level < 2 {
            return Err(Error::InvalidArgument(format!("level must be at least 2, got {}", config.level)));
        }
        let steps = time_steps(config.t_final, config.dt)?;
        let dt = config.t_final / steps as f64;
        let mesh = UnitSquareMesh::new(config.level);
        let n = mesh.cells_per_side();

        let (free, control, gamma_c_edges) = match config.boundary {
            WaveBoundary::Mixed => {
                let free: Vec<usize> = (1..=n).flat_map(|j| (1..=n).map(move |i| (i, j))).map(|(i, j)| mesh.node(i, j)).collect();
                let mut control: Vec<usize> = (1..=n).map(|j| mesh.node(n, j)).collect();
                control.extend((1..n).rev().map(|i| mesh.node(i, n)));
                let mut edges: Vec<(usize, usize)> = (0..n).map(|j| (mesh.node(n, j), mesh.node(n, j + 1))).collect();
                edges.extend((0..n).map(|i| (mesh.node(i, n), mesh.node(i + 1, n))));
                (free, control, edges)
            }
            WaveBoundary::AllDirichlet => (mesh.interior().to_vec(), Vec::new(), Vec::new()),
        };

        let (stiffness, mass) = mesh.assemble_p1();
        let m_ff = mass.submatrix(&free, &free);
        let k_ff = stiffness.submatrix(&free, &free);
        let q = dt * dt / 4.0;
        let s_ff = m_ff.add_scaled(&k_ff, q)?;
        let r_ff = m_ff.add_scaled(&k_ff, -q)?;
        let step_solver = SpdSolver::new(&s_ff, DEFAULT_TOL)?;

        let edge_mass = mesh.edge_mass(&gamma_c_edges);
        let b = edge_mass.submatrix(&free, &control);
        let m_c = edge_mass.submatrix(&control, &control);
        let control_solver = if control.is_empty() {
            None
        } else {
            Some(SpdSolver::new(&m_c, DEFAULT_TOL)?)
        };
        let space = WeightedSpace::new(block_diagonal(&m_c.scaled(dt), steps))?;

        let restrict = |full: &[f64]| -> DenseVector { free.iter().map(|&i| full[i]).collect() };
        let y0 = restrict(&mesh.interpolate(|x, y| (config.y01)(x, y)));
        let v0 = restrict(&mesh.interpolate(|x, y| (config.y02)(x, y)));
        let mf: Vec<DenseVector> = (0..=steps)
            .map(|k| {
                let t = k as f64 * dt;
                let fk = mesh.interpolate(|x, y| (config.f)(t, x, y));
                mass.mul_vec(&fk).map(|v| restrict(&v))
            })
            .collect::<Result<_>>()?;
        let loads = (1..=steps)
            .map(|k| mf[k - 1].iter().zip(&mf[k]).map(|(a, b)| 0.5 * (a + b)).collect())
            .collect();
        let yd = (1..=steps)
            .map(|k| {
                let t = (k as f64 - 0.5) * dt;
                mesh.interpolate(|x, y| (config.yd)(t, x, y))
            })
            .collect();
        let zd = mesh.interpolate(|x, y| (config.zd)(x, y));

        Ok(Self {
            config,
            mesh,
            steps,
            dt,
            free,
            control,
            mass,
            m_ff,
            k_ff,
            r_ff,
            b,
            step_solver,
            control_solver,
            y0,
            v0,
            loads,
            yd,
            zd,
            space,
        })
    }

    pub fn config(&self) -> &WaveConfig {
        &self.config
    }

    pub fn mesh(&self) -> &UnitSquareMesh {
        &self.mesh
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// The step actually used, `T / N`.
    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Node indices carrying state unknowns.
    pub fn free_nodes(&self) -> &[usize] {
        &self.free
    }

    /// Node indices carrying control unknowns, counterclockwise along `Γ_c`.
    pub fn control_nodes(&self) -> &[usize] {
        &self.control
    }

    pub fn free_mass(&self) -> &CsrMatrix {
        &self.m_ff
    }

    pub fn free_stiffness(&self) -> &CsrMatrix {
        &self.k_ff
    }

    /// Embeds a free-node vector into a full nodal vector.
    pub fn embed(&self, y: &[f64]) -> DenseVector {
        let mut full = vec![0.0; self.mesh.num_nodes()];
        for (&i, &v) in self.free.iter().zip(y) {
            full[i] = v;
        }
        full
    }

    /// `½(vᵀMv + yᵀKy)`.
    pub fn energy(&self, y: &[f64], v: &[f64]) -> Result<f64> {
        Ok(0.5 * (dot(v, &self.m_ff.mul_vec(v)?) + dot(y, &self.k_ff.mul_vec(y)?)))
    }

    fn control_at<'a>(&self, u: &'a [f64], n: usize) -> &'a [f64] {
        let nc = self.control.len();
        &u[(n - 1) * nc..n * nc]
    }

    /// Marches `y^0, …, y^N`. Uses the given initial data instead of the
    /// configured one when `initial` is set.
    pub fn solve_state_from(&self, u: &[f64], initial: Option<(&[f64], &[f64])>) -> Result<WaveState> {
        check_dim(self.space.dim(), u.len())?;
        let dt = self.dt;
        let (y0, v0) = initial.unwrap_or((&self.y0, &self.v0));
        check_dim(self.free.len(), y0.len())?;
        check_dim(self.free.len(), v0.len())?;
        let mut ys = Vec::with_capacity(self.steps + 1);
        let mut vs = Vec::with_capacity(self.steps + 1);
        ys.push(y0.to_vec());
        vs.push(v0.to_vec());
        for n in 1..=self.steps {
            let (y_prev, v_prev) = (&ys[n - 1], &vs[n - 1]);
            let mut rhs = self.r_ff.mul_vec(y_prev)?;
            axpy(dt, &self.m_ff.mul_vec(v_prev)?, &mut rhs);
            let mut load = self.loads[n - 1].clone();
            if !self.control.is_empty() {
                axpy(1.0, &self.b.mul_vec(self.control_at(u, n))?, &mut load);
            }
            axpy(0.5 * dt * dt, &load, &mut rhs);
            let y = self.step_solver.solve(&rhs)?;
            let v: DenseVector = y
                .iter()
                .zip(y_prev)
                .zip(v_prev)
                .map(|((yn, yp), vp)| 2.0 * (yn - yp) / dt - vp)
                .collect();
            ys.push(y);
            vs.push(v);
        }
        Ok(WaveState { y: ys, v: vs })
    }

    pub fn solve_state(&self, u: &[f64]) -> Result<WaveState> {
        self.solve_state_from(u, None)
    }

    fn midpoint_residual(&self, state: &WaveState, n: usize) -> DenseVector {
        let mid: DenseVector = state.y[n - 1]
            .iter()
            .zip(&state.y[n])
            .map(|(a, b)| 0.5 * (a + b))
            .collect();
        sub(&self.embed(&mid), &self.yd[n - 1])
    }

    /// Interval adjoints `p_1, …, p_N` on the free nodes, so that the reduced
    /// derivative is `−Δt Bᵀp_n + βΔt M_c u_n`.
    pub fn solve_adjoint(&self, state: &WaveState) -> Result<Vec<DenseVector>> {
        let (steps, dt) = (self.steps, self.dt);
        check_dim(steps + 1, state.y.len())?;
        let c = &self.config;
        let restrict = |full: DenseVector| -> DenseVector { self.free.iter().map(|&i| full[i]).collect() };

        // ∂J/∂y^n
        let mut a_y: Vec<DenseVector> = vec![vec![0.0; self.free.len()]; steps + 1];
        for n in 1..=steps {
            let g = restrict(self.mass.mul_vec(&self.midpoint_residual(state, n))?);
            axpy(0.5 * c.alpha1 * dt, &g, &mut a_y[n - 1]);
            axpy(0.5 * c.alpha1 * dt, &g, &mut a_y[n]);
        }
        let terminal = sub(&self.embed(&state.y[steps]), &self.zd);
        axpy(c.alpha2, &restrict(self.mass.mul_vec(&terminal)?), &mut a_y[steps]);

        let mut a_v = vec![0.0; self.free.len()];
        let mut p = vec![Vec::new(); steps];
        for n in (1..=steps).rev() {
            // v^n = 2(y^n − y^{n−1})/Δt − v^{n−1}
            let (head, tail) = a_y.split_at_mut(n);
            axpy(2.0 / dt, &a_v, &mut tail[0]);
            axpy(-2.0 / dt, &a_v, &mut head[n - 1]);
            a_v.iter_mut().for_each(|x| *x = -*x);
            // S y^n = R y^{n−1} + Δt M v^{n−1} + (Δt²/2)(F_n + B u_n)
            let lambda = self.step_solver.solve(&tail[0])?;
            axpy(1.0, &self.r_ff.mul_vec(&lambda)?, &mut head[n - 1]);
            axpy(dt, &self.m_ff.mul_vec(&lambda)?, &mut a_v);
            p[n - 1] = lambda.iter().map(|l| -0.5 * dt * l).collect();
        }
        Ok(p)
    }

    /// `α1/2 Σ Δt |ȳ_n − y_d|²_M + α2/2 |y^N − z_d|²_M + β/2 Σ Δt u_nᵀM_c u_n`
    /// with `ȳ_n` the interval midpoint value.
    pub fn objective_value(&self, u: &[f64]) -> Result<f64> {
        let state = self.solve_state(u)?;
        self.objective_of_state(&state, u)
    }

    pub fn objective_of_state(&self, state: &WaveState, u: &[f64]) -> Result<f64> {
        let c = &self.config;
        let mut misfit = 0.0;
        for n in 1..=self.steps {
            let r = self.midpoint_residual(state, n);
            misfit += self.dt * dot(&r, &self.mass.mul_vec(&r)?);
        }
        let terminal = sub(&self.embed(&state.y[self.steps]), &self.zd);
        let terminal = dot(&terminal, &self.mass.mul_vec(&terminal)?);
        Ok(0.5 * c.alpha1 * misfit + 0.5 * c.alpha2 * terminal + 0.5 * c.beta * self.space.wdot(u, u)?)
    }
}

impl GradientProblem for WaveProblem {
    fn space(&self) -> &WeightedSpace {
        &self.space
    }

    /// `G_n = βu_n − M_c⁻¹ Bᵀ p_n`.
    fn gradient(&self, u: &[f64]) -> Result<DenseVector> {
        let Some(control_solver) = &self.control_solver else {
            check_dim(0, u.len())?;
            return Ok(Vec::new());
        };
        let state = self.solve_state(u)?;
        let p = self.solve_adjoint(&state)?;
        let mut g = Vec::with_capacity(u.len());
        for n in 1..=self.steps {
            let trace = control_solver.solve(&self.b.mul_transpose_vec(&p[n - 1])?)?;
            g.extend(
                self.control_at(u, n)
                    .iter()
                    .zip(trace)
                    .map(|(ui, ti)| self.config.beta * ui - ti),
            );
        }
        Ok(g)
    }

    fn objective(&self, u: &[f64]) -> Option<Result<f64>> {
        Some(self.objective_value(u))
    }
}
