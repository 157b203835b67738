//! Experiment engine: single traces, `k*` tables, spreads, mesh-independence
//! checks, and spectral sweeps. Every output is a CSV file accompanied by a
//! `manifest.txt` that echoes the resolved configuration.

pub mod config;
pub mod report;

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

pub use config::{ExperimentSpec, ProblemKind, Settings};
pub use report::{
    read_table, sandwich_check, spread, write_sandwich, write_spread, write_table, KStarRow, SandwichRow,
    SandwichStatus, SpreadRow,
};

use crate::error::{Error, Result};
use crate::fem::{BurgersConfig, BurgersProblem, PoissonConfig, PoissonProblem, WaveConfig, WaveProblem};
use crate::linalg::norm2;
use crate::solver::{k_star, run, BBConfig, BBTrace, GradientProblem, InitScheme, StepRule, Termination};
use crate::spectral::{empirical_half_life, half_life_bound, make_poco, rate_constants};

/// A constructed problem together with its discretization parameters.
pub struct Instance {
    pub problem: Box<dyn GradientProblem + Send>,
    pub init: InitScheme,
    pub h: Option<f64>,
    pub dt: Option<f64>,
}

/// Builds the problem for `beta` at the `index`-th level of `spec`.
pub fn build_instance(spec: &ExperimentSpec, beta: f64, index: usize) -> Result<Instance> {
    let level = spec.levels[index];
    let dt = spec.dts[index];
    let need_dt = || dt.ok_or_else(|| Error::Config(format!("{} needs a time step", spec.problem)));
    Ok(match spec.problem {
        ProblemKind::Poisson => {
            let p = PoissonProblem::new(PoissonConfig::example1(beta, level))?;
            let h = p.mesh().h();
            Instance {
                problem: Box::new(p),
                init: InitScheme::Default,
                h: Some(h),
                dt: None,
            }
        }
        ProblemKind::Wave => {
            let p = WaveProblem::new(WaveConfig::example2(beta, level, need_dt()?))?;
            let (h, dt) = (p.mesh().h(), p.dt());
            Instance {
                problem: Box::new(p),
                init: InitScheme::Default,
                h: Some(h),
                dt: Some(dt),
            }
        }
        ProblemKind::Burgers => {
            let p = BurgersProblem::new(BurgersConfig::example3(beta, level, need_dt()?))?;
            let (h, dt) = (p.h(), p.dt());
            Instance {
                problem: Box::new(p),
                init: InitScheme::Default,
                h: Some(h),
                dt: Some(dt),
            }
        }
        ProblemKind::Spectral => {
            let poco = make_poco(beta, spec.decay, level as usize, Some(spec.seed))?;
            Instance {
                init: poco.init(),
                problem: Box::new(poco.problem),
                h: None,
                dt: None,
            }
        }
    })
}

fn solver_config(spec: &ExperimentSpec, rule: StepRule, init: &InitScheme) -> BBConfig {
    BBConfig::new(rule, spec.eps_min())
        .with_init(init.clone())
        .with_max_iter(spec.max_iter)
}

fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    csv::Writer::from_path(path).map_err(|source| Error::Csv {
        path: path.to_path_buf(),
        source,
    })
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    }
}

/// Runs the first rule, beta and level of `spec` to its smallest tolerance
/// with objective values recorded.
pub fn run_single(spec: &ExperimentSpec) -> Result<BBTrace> {
    let instance = build_instance(spec, spec.betas[0], 0)?;
    let config = solver_config(spec, spec.rules[0], &instance.init).recording_objective();
    run(&*instance.problem, &config)
}

/// Writes `k,grad_norm,alpha,objective`, one row per iteration.
pub fn write_trace(trace: &BBTrace, path: &Path) -> Result<()> {
    let mut w = csv_writer(path)?;
    let err = csv_err(path);
    w.write_record(["k", "grad_norm", "alpha", "objective"]).map_err(&err)?;
    for r in &trace.records {
        w.write_record([
            r.k.to_string(),
            fmt_f64(r.grad_norm),
            fmt_opt(r.alpha.map(fmt_f64)),
            fmt_opt(r.objective.map(fmt_f64)),
        ])
        .map_err(&err)?;
    }
    w.flush().map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// A finished table together with the messages of failed runs.
#[derive(Debug, Clone, PartialEq)]
pub struct TableOutcome {
    pub rows: Vec<KStarRow>,
    pub failures: Vec<String>,
}

impl TableOutcome {
    pub fn lookup(&self, rule: StepRule, beta: f64, eps: f64, level: u32) -> Option<&KStarRow> {
        self.rows
            .iter()
            .find(|r| r.rule == rule && r.beta == beta && r.eps == eps && r.level == level)
    }
}

/// One solve per (rule, beta, level) to the smallest tolerance; `k*` for the
/// larger tolerances is read off the same trace. Rows are ordered by rule,
/// beta, eps, then level, whatever order the cells finish in.
pub fn build_table(spec: &ExperimentSpec) -> Result<TableOutcome> {
    spec.validate()?;
    let cells: Vec<(usize, usize)> = (0..spec.betas.len())
        .flat_map(|b| (0..spec.levels.len()).map(move |l| (b, l)))
        .collect();
    let results: Vec<_> = cells
        .par_iter()
        .map(|&(b, l)| {
            let beta = spec.betas[b];
            match build_instance(spec, beta, l) {
                Ok(inst) => {
                    let runs: Vec<Result<BBTrace>> = spec
                        .rules
                        .iter()
                        .map(|&rule| run(&*inst.problem, &solver_config(spec, rule, &inst.init)))
                        .collect();
                    (inst.h, inst.dt, runs)
                }
                Err(e) => {
                    let msg = e.to_string();
                    let runs = spec
                        .rules
                        .iter()
                        .map(|_| Err(Error::InvalidArgument(msg.clone())))
                        .collect();
                    (None, spec.dts[l], runs)
                }
            }
        })
        .collect();

    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (r, &rule) in spec.rules.iter().enumerate() {
        for (b, &beta) in spec.betas.iter().enumerate() {
            for (l, &level) in spec.levels.iter().enumerate() {
                if let Err(e) = &results[b * spec.levels.len() + l].2[r] {
                    failures.push(format!("{} {rule} beta={beta} level={level}: {e}", spec.problem));
                }
            }
            for &eps in &spec.epsilons {
                for (l, &level) in spec.levels.iter().enumerate() {
                    let (h, dt, runs) = &results[b * spec.levels.len() + l];
                    let (k, reason) = match &runs[r] {
                        Ok(trace) => match k_star(trace, eps) {
                            Some(k) => (Some(k), Termination::Converged.as_str()),
                            None => (None, trace.termination.as_str()),
                        },
                        Err(_) => (None, "solver_failure"),
                    };
                    rows.push(KStarRow {
                        problem: spec.problem,
                        rule,
                        beta,
                        eps,
                        level,
                        h: *h,
                        dt: *dt,
                        k_star: k,
                        terminated_reason: reason.to_string(),
                    });
                }
            }
        }
    }
    Ok(TableOutcome { rows, failures })
}

/// Rate constants and half-lives of one spectral instance.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub beta: f64,
    pub n: usize,
    pub rule: StepRule,
    pub kappa: f64,
    pub gamma_a: f64,
    pub rho_a: f64,
    pub half_life_bound: Option<usize>,
    pub half_life: Option<usize>,
    pub iterations: usize,
    pub nonmonotone: bool,
}

/// Each run stops once `‖G_k‖ < 1e-13 ‖G_1‖`, deep enough for the
/// empirical half-life to be defined.
pub fn spectral_sweep(spec: &ExperimentSpec) -> Result<Vec<SweepRow>> {
    if spec.problem != ProblemKind::Spectral {
        return Err(Error::Config(format!("spectral sweep needs problem = spectral, got {}", spec.problem)));
    }
    spec.validate()?;
    let cells: Vec<(f64, u32, StepRule)> = spec
        .betas
        .iter()
        .flat_map(|&b| {
            spec.levels
                .iter()
                .flat_map(move |&n| spec.rules.iter().map(move |&r| (b, n, r)))
        })
        .collect();
    cells
        .par_iter()
        .map(|&(beta, n, rule)| {
            let poco = make_poco(beta, spec.decay, n as usize, Some(spec.seed))?;
            let eps = 1e-13 * norm2(&poco.first_gradient);
            let config = BBConfig::new(rule, eps)
                .with_init(poco.init())
                .with_max_iter(spec.max_iter);
            let trace = run(&poco.problem, &config)?;
            let rates = rate_constants(&poco.operator);
            Ok(SweepRow {
                beta,
                n: n as usize,
                rule,
                kappa: rates.kappa,
                gamma_a: rates.gamma_a,
                rho_a: rates.rho_a,
                half_life_bound: half_life_bound(&rates),
                half_life: empirical_half_life(&poco.operator, &trace).ok(),
                iterations: trace.iterations(),
                nonmonotone: trace.is_nonmonotone(),
            })
        })
        .collect()
}

pub fn write_sweep(rows: &[SweepRow], decay: &str, path: &Path) -> Result<()> {
    let mut w = csv_writer(path)?;
    let err = csv_err(path);
    w.write_record([
        "beta",
        "decay",
        "n",
        "rule",
        "kappa",
        "gamma_a",
        "rho_a",
        "half_life_bound",
        "half_life",
        "iterations",
        "nonmonotone",
    ])
    .map_err(&err)?;
    for r in rows {
        w.write_record([
            fmt_f64(r.beta),
            decay.to_string(),
            r.n.to_string(),
            r.rule.to_string(),
            fmt_f64(r.kappa),
            fmt_f64(r.gamma_a),
            fmt_f64(r.rho_a),
            fmt_opt(r.half_life_bound),
            fmt_opt(r.half_life),
            r.iterations.to_string(),
            r.nonmonotone.to_string(),
        ])
        .map_err(&err)?;
    }
    w.flush().map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes `manifest.txt` into `dir` and returns its path.
pub fn write_manifest(dir: &Path, command: &str, lines: &[(String, String)]) -> Result<PathBuf> {
    create_dir(dir)?;
    let path = dir.join("manifest.txt");
    let mut text = format!("command = {command}\nversion = {}\n", env!("CARGO_PKG_VERSION"));
    for (k, v) in lines {
        text.push_str(&format!("{k} = {v}\n"));
    }
    fs::write(&path, text).map_err(|source| Error::Io {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}

/// Creates `spec.out_dir` and returns the path of `name` inside it.
pub fn output_path(dir: &Path, name: &str) -> Result<PathBuf> {
    create_dir(dir)?;
    Ok(dir.join(name))
}
