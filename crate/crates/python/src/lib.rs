//! Python bindings: single solves, `k*` tables, and spectral rate constants.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use bbgrad::harness::{self, ExperimentSpec, KStarRow, Settings};
use bbgrad::solver::StepRule;
use bbgrad::spectral::{half_life_bound, make_poco, rate_constants, Decay};
use bbgrad::Error;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::InvalidArgument(_) | Error::Config(_) | Error::DimensionMismatch { .. } => {
            PyValueError::new_err(e.to_string())
        }
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

fn parse<T: std::str::FromStr<Err = Error>>(s: &str) -> PyResult<T> {
    s.parse().map_err(to_py)
}

#[allow(clippy::too_many_arguments)]
fn settings(
    problem: &str,
    rules: Option<Vec<String>>,
    betas: Option<Vec<f64>>,
    epsilons: Option<Vec<f64>>,
    levels: Option<Vec<u32>>,
    dts: Option<Vec<f64>>,
    decay: &str,
    seed: u64,
    max_iter: usize,
) -> PyResult<ExperimentSpec> {
    let rules = rules
        .map(|rs| rs.iter().map(|r| parse::<StepRule>(r)).collect::<PyResult<Vec<_>>>())
        .transpose()?;
    Settings {
        problem: Some(parse(problem)?),
        rules,
        betas,
        epsilons,
        levels,
        dts,
        decay: Some(parse::<Decay>(decay)?),
        out_dir: None,
        seed: Some(seed),
        max_iter: Some(max_iter),
    }
    .resolve()
    .map_err(to_py)
}

/// Runs one solve. Unset `beta` and `level` fall back to the first entry of
/// the problem's default grid. Returns the per-iteration trace as lists.
#[pyfunction]
#[pyo3(signature = (problem, rule="BB1", beta=None, eps=1e-8, level=None, dt=None, max_iter=10000, seed=0, decay="geometric:0.5"))]
#[allow(clippy::too_many_arguments)]
fn solve<'py>(
    py: Python<'py>,
    problem: &str,
    rule: &str,
    beta: Option<f64>,
    eps: f64,
    level: Option<u32>,
    dt: Option<f64>,
    max_iter: usize,
    seed: u64,
    decay: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let mut spec = settings(
        problem,
        Some(vec![rule.to_string()]),
        beta.map(|b| vec![b]),
        Some(vec![eps]),
        level.map(|l| vec![l]),
        dt.map(|d| vec![d]),
        decay,
        seed,
        max_iter,
    )?;
    spec.levels.truncate(1);
    spec.dts.truncate(1);
    spec.betas.truncate(1);
    let trace = py.detach(|| harness::run_single(&spec)).map_err(to_py)?;
    let out = PyDict::new(py);
    out.set_item("k", trace.records.iter().map(|r| r.k).collect::<Vec<_>>())?;
    out.set_item("grad_norm", trace.grad_norms())?;
    out.set_item("alpha", trace.records.iter().map(|r| r.alpha).collect::<Vec<_>>())?;
    out.set_item("objective", trace.records.iter().map(|r| r.objective).collect::<Vec<_>>())?;
    out.set_item("termination", trace.termination.as_str())?;
    out.set_item("iterations", trace.iterations())?;
    out.set_item("beta", spec.betas[0])?;
    out.set_item("level", spec.levels[0])?;
    out.set_item("dt", spec.dts[0])?;
    Ok(out)
}

fn row_dict<'py>(py: Python<'py>, r: &KStarRow) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("problem", r.problem.name())?;
    d.set_item("rule", r.rule.name())?;
    d.set_item("beta", r.beta)?;
    d.set_item("eps", r.eps)?;
    d.set_item("level", r.level)?;
    d.set_item("h", r.h)?;
    d.set_item("dt", r.dt)?;
    d.set_item("k_star", r.k_star)?;
    d.set_item("terminated_reason", &r.terminated_reason)?;
    Ok(d)
}

/// Builds a `k*` table; unset lists take the problem's defaults. Raises if
/// any solve failed.
#[pyfunction]
#[pyo3(signature = (problem, rules=None, betas=None, epsilons=None, levels=None, dts=None, max_iter=10000, seed=0, decay="geometric:0.5"))]
#[allow(clippy::too_many_arguments)]
fn table<'py>(
    py: Python<'py>,
    problem: &str,
    rules: Option<Vec<String>>,
    betas: Option<Vec<f64>>,
    epsilons: Option<Vec<f64>>,
    levels: Option<Vec<u32>>,
    dts: Option<Vec<f64>>,
    max_iter: usize,
    seed: u64,
    decay: &str,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let spec = settings(problem, rules, betas, epsilons, levels, dts, decay, seed, max_iter)?;
    let outcome = py.detach(|| harness::build_table(&spec)).map_err(to_py)?;
    if !outcome.failures.is_empty() {
        return Err(PyRuntimeError::new_err(outcome.failures.join("; ")));
    }
    outcome.rows.iter().map(|r| row_dict(py, r)).collect()
}

/// `kappa`, `gamma_a`, `rho_a` and the half-life bound of a spectral
/// quadratic with `n + 1` eigenvalues.
#[pyfunction]
#[pyo3(signature = (beta, n=50, decay="geometric:0.5"))]
fn spectral_rates<'py>(py: Python<'py>, beta: f64, n: usize, decay: &str) -> PyResult<Bound<'py, PyDict>> {
    let poco = make_poco(beta, parse(decay)?, n, None).map_err(to_py)?;
    let rates = rate_constants(&poco.operator);
    let d = PyDict::new(py);
    d.set_item("kappa", rates.kappa)?;
    d.set_item("gamma_a", rates.gamma_a)?;
    d.set_item("rho_a", rates.rho_a)?;
    d.set_item("half_life_bound", half_life_bound(&rates))?;
    Ok(d)
}

#[pymodule]
fn pybbgrad(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(table, m)?)?;
    m.add_function(wrap_pyfunction!(spectral_rates, m)?)?;
    Ok(())
}
