//! The Barzilai-Borwein gradient iteration.
//!
//! Iterates `u_{k+1} = u_k − G_k / α_k` where `α_k` is one of
//!
//! ```text
//! BB1: α = (S, Y) / (S, S)        BB2: α = (Y, Y) / (S, Y)
//! ```
//!
//! with `S = u_k − u_{k−1}` and `Y = G_k − G_{k−1}`, all inner products taken
//! in the problem's [`WeightedSpace`]. The method never evaluates the
//! objective; recording it is optional.

use crate::error::{check_dim, Error, Result};
use crate::linalg::{axpy, sub, CsrMatrix, DenseVector, WeightedSpace};

/// A reduced optimization problem: a gradient map that is the Riesz
/// representative of `F'` in the inner product of [`GradientProblem::space`].
///
/// Implementations must be deterministic and safe for concurrent read-only use.
pub trait GradientProblem: Sync {
    fn space(&self) -> &WeightedSpace;

    fn gradient(&self, u: &[f64]) -> Result<DenseVector>;

    /// The objective value, if the problem can evaluate it.
    fn objective(&self, _u: &[f64]) -> Option<Result<f64>> {
        None
    }

    fn dim(&self) -> usize {
        self.space().dim()
    }
}

impl<P: GradientProblem + ?Sized> GradientProblem for &P {
    fn space(&self) -> &WeightedSpace {
        (**self).space()
    }
    fn gradient(&self, u: &[f64]) -> Result<DenseVector> {
        (**self).gradient(u)
    }
    fn objective(&self, u: &[f64]) -> Option<Result<f64>> {
        (**self).objective(u)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StepRule {
    BB1,
    BB2,
    /// BB1 at odd `k`, BB2 at even `k`.
    ABB,
}

/// The quotient actually evaluated at a given iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepKind {
    BB1,
    BB2,
}

impl StepRule {
    pub fn at(self, k: usize) -> StepKind {
        match self {
            StepRule::BB1 => StepKind::BB1,
            StepRule::BB2 => StepKind::BB2,
            StepRule::ABB if k % 2 == 1 => StepKind::BB1,
            StepRule::ABB => StepKind::BB2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            StepRule::BB1 => "BB1",
            StepRule::BB2 => "BB2",
            StepRule::ABB => "ABB",
        }
    }
}

impl std::fmt::Display for StepRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for StepRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "BB1" => Ok(StepRule::BB1),
            "BB2" => Ok(StepRule::BB2),
            "ABB" => Ok(StepRule::ABB),
            other => Err(Error::InvalidArgument(format!("unknown step rule `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitScheme {
    /// Two initial iterates with `u0 ≠ u1`.
    C1 { u0: DenseVector, u1: DenseVector },
    /// An initial iterate and a first step size `alpha1 > 0`.
    C2 { u1: DenseVector, alpha1: f64 },
    /// `u0 = 0`, `α0 = 1`, hence `u1 = −G(0)`.
    Default,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Safeguard {
    pub alpha_min: f64,
    pub alpha_max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BBConfig {
    pub rule: StepRule,
    pub eps: f64,
    pub max_iter: usize,
    pub init: InitScheme,
    pub safeguard: Option<Safeguard>,
    pub record_objective: bool,
    /// Keep every gradient vector `G_k` in the trace.
    pub record_gradients: bool,
}

impl BBConfig {
    pub const DEFAULT_MAX_ITER: usize = 10_000;

    pub fn new(rule: StepRule, eps: f64) -> Self {
        Self {
            rule,
            eps,
            max_iter: Self::DEFAULT_MAX_ITER,
            init: InitScheme::Default,
            safeguard: None,
            record_objective: false,
            record_gradients: false,
        }
    }

    pub fn with_init(mut self, init: InitScheme) -> Self {
        self.init = init;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn with_safeguard(mut self, alpha_min: f64, alpha_max: f64) -> Self {
        self.safeguard = Some(Safeguard {
            alpha_min,
            alpha_max,
        });
        self
    }

    pub fn recording_objective(mut self) -> Self {
        self.record_objective = true;
        self
    }

    pub fn recording_gradients(mut self) -> Self {
        self.record_gradients = true;
        self
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        if !(self.eps > 0.0) {
            return Err(Error::InvalidArgument(format!("eps must be positive, got {}", self.eps)));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidArgument("max_iter must be positive".into()));
        }
        if let Some(sg) = &self.safeguard {
            if !(sg.alpha_min > 0.0 && sg.alpha_min < sg.alpha_max) {
                return Err(Error::InvalidArgument(format!(
                    "safeguard needs 0 < alpha_min < alpha_max, got [{}, {}]",
                    sg.alpha_min, sg.alpha_max
                )));
            }
        }
        match &self.init {
            InitScheme::C1 { u0, u1 } => {
                check_dim(dim, u0.len())?;
                check_dim(dim, u1.len())?;
                if u0 == u1 {
                    return Err(Error::InvalidArgument("C1 initialization needs u0 != u1".into()));
                }
            }
            InitScheme::C2 { u1, alpha1 } => {
                check_dim(dim, u1.len())?;
                if !(*alpha1 > 0.0) {
                    return Err(Error::InvalidArgument(format!(
                        "C2 initialization needs alpha1 > 0, got {alpha1}"
                    )));
                }
            }
            InitScheme::Default => {}
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub k: usize,
    pub grad_norm: f64,
    /// Step size used to leave `u_k`; absent on the terminating record.
    pub alpha: Option<f64>,
    pub objective: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Converged,
    MaxIter,
    /// The iteration produced a non-finite gradient.
    StepBreakdown,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::Converged => "converged",
            Termination::MaxIter => "max_iter",
            Termination::StepBreakdown => "step_breakdown",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BBTrace {
    pub records: Vec<IterationRecord>,
    pub final_iterate: DenseVector,
    pub termination: Termination,
    /// `G_1`, the gradient at the first iterate.
    pub first_gradient: DenseVector,
    /// `G_1, G_2, …` when [`BBConfig::record_gradients`] is set.
    pub gradients: Vec<DenseVector>,
}

impl BBTrace {
    pub fn grad_norms(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.grad_norm).collect()
    }

    pub fn alphas(&self) -> Vec<f64> {
        self.records.iter().filter_map(|r| r.alpha).collect()
    }

    pub fn iterations(&self) -> usize {
        self.records.len()
    }

    /// True when some `‖G_{k+1}‖ > ‖G_k‖`.
    pub fn is_nonmonotone(&self) -> bool {
        self.records.windows(2).any(|w| w[1].grad_norm > w[0].grad_norm)
    }
}

/// Evaluates one BB quotient in the weighted inner product.
///
/// Nonpositive curvature `(S, Y)_W ≤ 0` is an error unless a safeguard is
/// given, in which case `alpha_max` is returned. With a safeguard every step
/// is clamped to `[alpha_min, alpha_max]`. Errors carry `k = 0`; [`run`]
/// attaches the real iteration index.
pub fn bb_step(
    s: &[f64],
    y: &[f64],
    space: &WeightedSpace,
    kind: StepKind,
    safeguard: Option<&Safeguard>,
) -> Result<f64> {
    let ss = space.wdot(s, s)?;
    if ss == 0.0 {
        return Err(Error::DegenerateStep { k: 0 });
    }
    let sy = space.wdot(s, y)?;
    if !(sy > 0.0) {
        return match safeguard {
            Some(sg) => Ok(sg.alpha_max),
            None => Err(Error::Nonconvexity { k: 0, curvature: sy }),
        };
    }
    let alpha = match kind {
        StepKind::BB1 => sy / ss,
        StepKind::BB2 => space.wdot(y, y)? / sy,
    };
    Ok(match safeguard {
        Some(sg) => alpha.clamp(sg.alpha_min, sg.alpha_max),
        None => alpha,
    })
}

fn at_iteration(err: Error, k: usize) -> Error {
    match err {
        Error::DegenerateStep { .. } => Error::DegenerateStep { k },
        Error::Nonconvexity { curvature, .. } => Error::Nonconvexity { k, curvature },
        other => other,
    }
}

/// Runs the BB gradient method until `‖G_k‖_W < eps`, `‖G_k‖ = 0`, or
/// `k = max_iter`.
pub fn run<P: GradientProblem + ?Sized>(problem: &P, config: &BBConfig) -> Result<BBTrace> {
    let dim = problem.dim();
    config.validate(dim)?;
    let space = problem.space();

    // (u_{k-1}, G_{k-1}) when a BB quotient is available at k = 1
    let (mut previous, mut u, mut first_alpha) = match &config.init {
        InitScheme::Default => {
            let u0 = vec![0.0; dim];
            let g0 = problem.gradient(&u0)?;
            let u1: DenseVector = g0.iter().map(|g| -g).collect();
            (Some((u0, g0)), u1, None)
        }
        InitScheme::C1 { u0, u1 } => {
            let g0 = problem.gradient(u0)?;
            (Some((u0.clone(), g0)), u1.clone(), None)
        }
        InitScheme::C2 { u1, alpha1 } => (None, u1.clone(), Some(*alpha1)),
    };

    let mut records = Vec::new();
    let mut gradients = Vec::new();
    let mut first_gradient = Vec::new();
    let mut k = 1;
    let termination = loop {
        let g = problem.gradient(&u)?;
        check_dim(dim, g.len())?;
        let grad_norm = space.wnorm(&g)?;
        if k == 1 {
            first_gradient = g.clone();
        }
        let objective = if config.record_objective {
            problem.objective(&u).transpose()?
        } else {
            None
        };
        if config.record_gradients {
            gradients.push(g.clone());
        }
        let mut record = IterationRecord {
            k,
            grad_norm,
            alpha: None,
            objective,
        };
        if !grad_norm.is_finite() {
            records.push(record);
            break Termination::StepBreakdown;
        }
        if grad_norm == 0.0 || grad_norm < config.eps {
            records.push(record);
            break Termination::Converged;
        }
        if k == config.max_iter {
            records.push(record);
            break Termination::MaxIter;
        }

        let alpha = match (first_alpha.take(), &previous) {
            (Some(alpha1), _) => alpha1,
            (None, Some((u_prev, g_prev))) => {
                let s = sub(&u, u_prev);
                let y = sub(&g, g_prev);
                bb_step(&s, &y, space, config.rule.at(k), config.safeguard.as_ref())
                    .map_err(|e| at_iteration(e, k))?
            }
            (None, None) => unreachable!("C2 provides alpha1 at k = 1"),
        };
        record.alpha = Some(alpha);
        records.push(record);

        let mut next = u.clone();
        axpy(-1.0 / alpha, &g, &mut next);
        previous = Some((std::mem::replace(&mut u, next), g));
        k += 1;
    };

    Ok(BBTrace {
        records,
        final_iterate: u,
        termination,
        first_gradient,
        gradients,
    })
}

/// `k*(ε)`: the first recorded `k` with `‖G_k‖ < ε`.
pub fn k_star(trace: &BBTrace, eps: f64) -> Option<usize> {
    trace
        .records
        .iter()
        .find(|r| r.grad_norm < eps)
        .map(|r| r.k)
}

/// The quadratic `F(u) = ½(u, Au)_W − (b, u)_W` with gradient `Au − b`.
/// `A` must be self-adjoint in the `W` inner product.
#[derive(Debug, Clone)]
pub struct QuadraticProblem {
    operator: CsrMatrix,
    rhs: DenseVector,
    space: WeightedSpace,
}

impl QuadraticProblem {
    pub fn new(operator: CsrMatrix, rhs: DenseVector, space: WeightedSpace) -> Result<Self> {
        if !operator.is_square() {
            return Err(Error::InvalidArgument("quadratic operator must be square".into()));
        }
        check_dim(space.dim(), operator.rows())?;
        check_dim(space.dim(), rhs.len())?;
        Ok(Self {
            operator,
            rhs,
            space,
        })
    }

    pub fn operator(&self) -> &CsrMatrix {
        &self.operator
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }
}

impl GradientProblem for QuadraticProblem {
    fn space(&self) -> &WeightedSpace {
        &self.space
    }

    fn gradient(&self, u: &[f64]) -> Result<DenseVector> {
        let au = self.operator.mul_vec(u)?;
        Ok(sub(&au, &self.rhs))
    }

    fn objective(&self, u: &[f64]) -> Option<Result<f64>> {
        Some((|| {
            let au = self.operator.mul_vec(u)?;
            Ok(0.5 * self.space.wdot(u, &au)? - self.space.wdot(&self.rhs, u)?)
        })())
    }
}
