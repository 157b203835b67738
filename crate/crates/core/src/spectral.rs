//! Quadratics with prescribed spectra, written in their eigen-coordinates.
//!
//! `A = diag(λ_0, …, λ_n)` with `λ_0 = β` and `λ_i = β + δ_i` for a decaying
//! sequence `δ_i` (`δ_1 = 1`). The right-hand side is `Λ·1`, so the minimizer
//! is the all-ones vector and `G(u) = Λ(u − 1)`.

use rand::{Rng, SeedableRng};

use crate::error::{Error, Result};
use crate::linalg::{CsrMatrix, DenseVector, WeightedSpace};
use crate::solver::{BBTrace, InitScheme, QuadraticProblem};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Decay {
    /// `δ_i = r^(i-1)`, `0 < r < 1`.
    Geometric(f64),
    /// `δ_i = i^(-p)`, `p > 0`.
    Algebraic(f64),
}

impl Decay {
    fn validate(self) -> Result<()> {
        match self {
            Decay::Geometric(r) if r > 0.0 && r < 1.0 => Ok(()),
            Decay::Algebraic(p) if p > 0.0 && p.is_finite() => Ok(()),
            other => Err(Error::InvalidArgument(format!("invalid decay {other:?}"))),
        }
    }

    fn delta(self, i: usize) -> f64 {
        match self {
            Decay::Geometric(r) => r.powi(i as i32 - 1),
            Decay::Algebraic(p) => (i as f64).powf(-p),
        }
    }
}

impl std::fmt::Display for Decay {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Decay::Geometric(r) => write!(f, "geometric:{r}"),
            Decay::Algebraic(p) => write!(f, "algebraic:{p}"),
        }
    }
}

impl std::str::FromStr for Decay {
    type Err = Error;

    /// Parses `geometric:<r>` or `algebraic:<p>`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("cannot parse decay `{s}`"));
        let (kind, value) = s.split_once(':').ok_or_else(bad)?;
        let value: f64 = value.trim().parse().map_err(|_| bad())?;
        let decay = match kind.trim().to_ascii_lowercase().as_str() {
            "geometric" | "geo" => Decay::Geometric(value),
            "algebraic" | "alg" => Decay::Algebraic(value),
            _ => return Err(bad()),
        };
        decay.validate()?;
        Ok(decay)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralOperator {
    eigenvalues: Vec<f64>,
    beta: f64,
    delta_inf: f64,
    delta_sup: f64,
}

impl SpectralOperator {
    pub fn new(eigenvalues: Vec<f64>, beta: f64) -> Result<Self> {
        if eigenvalues.is_empty() {
            return Err(Error::InvalidArgument("empty spectrum".into()));
        }
        if let Some(bad) = eigenvalues.iter().find(|l| !(**l > 0.0) || !l.is_finite()) {
            return Err(Error::InvalidArgument(format!("eigenvalue {bad} is not positive")));
        }
        let delta_inf = eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        let delta_sup = eigenvalues.iter().cloned().fold(0.0, f64::max);
        Ok(Self {
            eigenvalues,
            beta,
            delta_inf,
            delta_sup,
        })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn delta_inf(&self) -> f64 {
        self.delta_inf
    }

    pub fn delta_sup(&self) -> f64 {
        self.delta_sup
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// The quadratic with minimizer `1` under the identity Gram.
    pub fn problem(&self) -> QuadraticProblem {
        QuadraticProblem::new(
            CsrMatrix::from_diagonal(&self.eigenvalues),
            self.eigenvalues.clone(),
            WeightedSpace::euclidean(self.dim()),
        )
        .expect("diagonal operator has consistent dimensions")
    }

    pub fn solution(&self) -> DenseVector {
        vec![1.0; self.dim()]
    }

    /// The iterate whose gradient is `g`: `u = 1 + Λ⁻¹ g`.
    pub fn iterate_with_gradient(&self, g: &[f64]) -> Result<DenseVector> {
        crate::error::check_dim(self.dim(), g.len())?;
        Ok(g.iter()
            .zip(&self.eigenvalues)
            .map(|(gi, li)| 1.0 + gi / li)
            .collect())
    }
}

/// A poco operator together with its prescribed first gradient.
#[derive(Debug, Clone)]
pub struct PocoInstance {
    pub operator: SpectralOperator,
    pub problem: QuadraticProblem,
    /// `g^1`: all ones, or seeded uniform values in `[0.5, 1.5)`.
    pub first_gradient: DenseVector,
}

impl PocoInstance {
    /// `u0 = 0` and `u1` chosen so that `G(u1) = g^1`.
    pub fn init(&self) -> InitScheme {
        InitScheme::C1 {
            u0: vec![0.0; self.operator.dim()],
            u1: self
                .operator
                .iterate_with_gradient(&self.first_gradient)
                .expect("first gradient matches the operator"),
        }
    }
}

/// Builds `λ_0 = β`, `λ_i = β + δ_i` for `i = 1..=n`.
pub fn make_poco(beta: f64, decay: Decay, n: usize, seed: Option<u64>) -> Result<PocoInstance> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::InvalidArgument(format!("beta must be positive, got {beta}")));
    }
    if n < 2 {
        return Err(Error::InvalidArgument(format!("need n >= 2, got {n}")));
    }
    decay.validate()?;
    let eigenvalues: Vec<f64> = std::iter::once(beta)
        .chain((1..=n).map(|i| beta + decay.delta(i)))
        .collect();
    let operator = SpectralOperator::new(eigenvalues, beta)?;
    let first_gradient = match seed {
        None => vec![1.0; n + 1],
        Some(seed) => {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            (0..=n).map(|_| rng.gen_range(0.5..1.5)).collect()
        }
    };
    Ok(PocoInstance {
        problem: operator.problem(),
        operator,
        first_gradient,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComponentTrace {
    /// `components[k-1][i] = g_i^k`, signed.
    pub components: Vec<DenseVector>,
}

impl ComponentTrace {
    pub fn norms(&self) -> Vec<f64> {
        self.components
            .iter()
            .map(|g| g.iter().map(|x| x * x).sum::<f64>().sqrt())
            .collect()
    }
}

/// Rebuilds `g_i^k` from `g_i^1` through `g_i^{k+1} = (1 − λ_i/α_k) g_i^k`.
pub fn component_trace(op: &SpectralOperator, trace: &BBTrace) -> Result<ComponentTrace> {
    if trace.first_gradient.len() != op.dim() {
        return Err(Error::InvalidArgument(format!(
            "trace has dimension {}, operator {}",
            trace.first_gradient.len(),
            op.dim()
        )));
    }
    let mut components = Vec::with_capacity(trace.records.len());
    let mut g = trace.first_gradient.clone();
    for (idx, record) in trace.records.iter().enumerate() {
        let last = idx + 1 == trace.records.len();
        components.push(g.clone());
        match record.alpha {
            Some(alpha) => {
                for (gi, li) in g.iter_mut().zip(op.eigenvalues()) {
                    *gi *= 1.0 - li / alpha;
                }
            }
            None if last => {}
            None => {
                return Err(Error::InvalidArgument(format!(
                    "trace record k = {} has no step size",
                    record.k
                )))
            }
        }
    }
    Ok(ComponentTrace { components })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateConstants {
    pub kappa: f64,
    pub gamma_a: f64,
    pub rho_a: f64,
}

pub fn rate_constants(op: &SpectralOperator) -> RateConstants {
    let (lo, hi) = (op.delta_inf(), op.delta_sup());
    RateConstants {
        kappa: hi / lo,
        gamma_a: (hi - lo) / lo,
        rho_a: (hi - lo) / hi,
    }
}

/// `⌈−log 2 / log γ_A⌉` when `κ < 2`; no bound otherwise.
pub fn half_life_bound(rates: &RateConstants) -> Option<usize> {
    if rates.gamma_a >= 1.0 {
        None
    } else if rates.gamma_a <= 0.0 {
        Some(1)
    } else {
        Some(((-(2f64.ln()) / rates.gamma_a.ln()).ceil() as usize).max(1))
    }
}

/// Smallest `m` with `‖G_{k+m}‖ ≤ ½‖G_k‖` for every recorded pair.
pub fn empirical_half_life(op: &SpectralOperator, trace: &BBTrace) -> Result<usize> {
    if trace.first_gradient.len() != op.dim() {
        return Err(Error::InvalidArgument("trace does not belong to this operator".into()));
    }
    let norms = trace.grad_norms();
    let first = norms.first().copied().unwrap_or(0.0);
    if first == 0.0 {
        return Ok(1);
    }
    if !norms.iter().any(|&g| g < 1e-12 * first) {
        return Err(Error::InsufficientData(format!(
            "trace of {} iterations never drops below 1e-12 of its first gradient",
            norms.len()
        )));
    }
    Ok(half_life(&norms))
}

fn half_life(norms: &[f64]) -> usize {
    (1..norms.len())
        .find(|&m| (0..norms.len() - m).all(|k| norms[k + m] <= 0.5 * norms[k]))
        .unwrap_or(norms.len())
}

/// `c1 · c2^k` bounding a sequence normalized by its first entry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Envelope {
    pub c1: f64,
    pub c2: f64,
}

/// Fits `c2` from the least-squares slope of `log(e_k / e_1)` and takes the
/// smallest `c1` that makes `e_k ≤ c1 c2^(k-1) e_1` hold on every entry.
/// Returns `None` unless the fitted rate is below one. Zero entries are
/// skipped in the fit and trivially satisfy the bound.
pub fn fit_r_linear_envelope(errors: &[f64]) -> Option<Envelope> {
    let e1 = *errors.first()?;
    if !(e1 > 0.0) {
        return None;
    }
    let pts: Vec<(f64, f64)> = errors
        .iter()
        .enumerate()
        .filter(|(_, e)| **e > 0.0)
        .map(|(k, e)| (k as f64, (e / e1).ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let c2 = (sxy / sxx).exp();
    if !(c2 < 1.0) {
        return None;
    }
    let c1 = pts
        .iter()
        .map(|(k, l)| (l - k * c2.ln()).exp())
        .fold(0.0, f64::max);
    Some(Envelope { c1, c2 })
}
