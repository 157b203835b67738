use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use bbgrad::harness::config::parse_list;
use bbgrad::harness::{self, ExperimentSpec, ProblemKind, SandwichStatus, Settings};
use bbgrad::spectral::Decay;
use bbgrad::{Error, Result};

#[derive(Parser)]
#[command(name = "bbgrad", version, about = "Barzilai-Borwein gradient experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one solve and write its trace.
    Run(ExperimentArgs),
    /// Build a k* table over rules, betas, tolerances and levels.
    Table(ExperimentArgs),
    /// Report max k* − min k* across levels for a table CSV.
    Spread(ReportArgs),
    /// Compare every level of a table CSV against its finest level.
    Sandwich {
        #[command(flatten)]
        report: ReportArgs,
        /// Allowed excess of k*_h over the reference.
        #[arg(long, default_value_t = 1)]
        slack: usize,
        /// Allowed shortfall of k*_h below the reference.
        #[arg(long, default_value_t = 1)]
        ell_bound: usize,
    },
    /// Rate constants and half-lives of spectral quadratics.
    SpectralSweep(ExperimentArgs),
}

#[derive(Args)]
struct ExperimentArgs {
    /// poisson, wave, burgers or spectral.
    #[arg(long)]
    problem: Option<String>,
    /// Step rules, comma separated (BB1, BB2, ABB).
    #[arg(long)]
    rule: Option<String>,
    /// Control costs, comma separated.
    #[arg(long)]
    beta: Option<String>,
    /// Tolerances, comma separated and strictly decreasing.
    #[arg(long)]
    eps: Option<String>,
    /// Mesh levels (spectral: sizes n), comma separated.
    #[arg(long)]
    level: Option<String>,
    /// Time steps paired with the levels, comma separated.
    #[arg(long)]
    dt: Option<String>,
    /// Spectral decay, `geometric:<r>` or `algebraic:<p>`.
    #[arg(long)]
    decay: Option<String>,
    #[arg(long)]
    max_iter: Option<usize>,
    /// Key-value configuration file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct ReportArgs {
    /// A table CSV written by `bbgrad table`.
    table: PathBuf,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

impl ExperimentArgs {
    fn resolve(&self) -> Result<ExperimentSpec> {
        let file = match &self.config {
            Some(path) => Settings::from_file(path)?,
            None => Settings::default(),
        };
        let flags = Settings {
            problem: self.problem.as_deref().map(str::parse).transpose()?,
            rules: self
                .rule
                .as_deref()
                .map(|s| parse_list("rule", s))
                .transpose()?,
            betas: self.beta.as_deref().map(|s| parse_list("beta", s)).transpose()?,
            epsilons: self.eps.as_deref().map(|s| parse_list("eps", s)).transpose()?,
            levels: self.level.as_deref().map(|s| parse_list("level", s)).transpose()?,
            dts: self.dt.as_deref().map(|s| parse_list("dt", s)).transpose()?,
            decay: self.decay.as_deref().map(str::parse::<Decay>).transpose()?,
            out_dir: self.out.clone(),
            seed: self.seed,
            max_iter: self.max_iter,
        };
        file.overridden_by(flags).resolve()
    }
}

fn manifest(dir: &Path, command: &str, mut lines: Vec<(String, String)>, started: Instant) -> Result<()> {
    lines.push(("elapsed_seconds".into(), format!("{:.3}", started.elapsed().as_secs_f64())));
    let path = harness::write_manifest(dir, command, &lines)?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn kv(k: &str, v: impl ToString) -> (String, String) {
    (k.to_string(), v.to_string())
}

/// Returns whether every solve succeeded.
fn execute(command: Command) -> Result<bool> {
    let started = Instant::now();
    match command {
        Command::Run(args) => {
            let spec = args.resolve()?;
            if spec.rules.len() * spec.betas.len() * spec.levels.len() != 1 {
                return Err(Error::Config("run takes a single rule, beta and level".into()));
            }
            let trace = harness::run_single(&spec)?;
            let path = harness::output_path(&spec.out_dir, "trace.csv")?;
            harness::write_trace(&trace, &path)?;
            let mut lines = spec.manifest_lines();
            lines.push(kv("outputs", "trace.csv"));
            lines.push(kv("iterations", trace.iterations()));
            lines.push(kv("termination", trace.termination.as_str()));
            lines.push(kv("status", "ok"));
            manifest(&spec.out_dir, "run", lines, started)?;
            println!(
                "{} after {} iterations, final gradient norm {:e}",
                trace.termination.as_str(),
                trace.iterations(),
                trace.records.last().map_or(f64::NAN, |r| r.grad_norm)
            );
            Ok(true)
        }
        Command::Table(args) => {
            let spec = args.resolve()?;
            let outcome = harness::build_table(&spec)?;
            let path = harness::output_path(&spec.out_dir, "table.csv")?;
            harness::write_table(&outcome.rows, &path)?;
            let mut lines = spec.manifest_lines();
            lines.push(kv("outputs", "table.csv"));
            lines.push(kv("rows", outcome.rows.len()));
            let ok = outcome.failures.is_empty();
            lines.push(kv("status", if ok { "ok" } else { "solver_failure" }));
            lines.extend(outcome.failures.iter().map(|f| kv("failure", f)));
            manifest(&spec.out_dir, "table", lines, started)?;
            for f in &outcome.failures {
                eprintln!("failure: {f}");
            }
            println!("{} rows written to {}", outcome.rows.len(), path.display());
            Ok(ok)
        }
        Command::Spread(report) => {
            let rows = harness::read_table(&report.table)?;
            let spread = harness::spread(&rows)?;
            let path = harness::output_path(&report.out, "spread.csv")?;
            harness::write_spread(&spread, &path)?;
            let unavailable = spread.iter().filter(|s| s.ell.is_none()).count();
            let lines = vec![
                kv("table", report.table.display()),
                kv("outputs", "spread.csv"),
                kv("groups", spread.len()),
                kv("unavailable", unavailable),
            ];
            manifest(&report.out, "spread", lines, started)?;
            for s in &spread {
                println!(
                    "{} {} beta={} eps={:e}: ell = {}",
                    s.problem,
                    s.rule,
                    s.beta,
                    s.eps,
                    s.ell.map_or("unavailable".into(), |l| l.to_string())
                );
            }
            Ok(true)
        }
        Command::Sandwich { report, slack, ell_bound } => {
            let rows = harness::read_table(&report.table)?;
            let checked = harness::sandwich_check(&rows, slack, ell_bound)?;
            let path = harness::output_path(&report.out, "sandwich.csv")?;
            harness::write_sandwich(&checked, &path)?;
            let violations: Vec<_> = checked
                .iter()
                .filter(|r| matches!(r.status, SandwichStatus::Upper | SandwichStatus::Lower))
                .collect();
            let lines = vec![
                kv("table", report.table.display()),
                kv("outputs", "sandwich.csv"),
                kv("slack", slack),
                kv("ell_bound", ell_bound),
                kv("comparisons", checked.len()),
                kv("violations", violations.len()),
            ];
            manifest(&report.out, "sandwich", lines, started)?;
            for v in &violations {
                println!(
                    "{}: {} {} beta={} eps={:e} level={} k*={:?} reference k*={:?}",
                    v.status.as_str(),
                    v.problem,
                    v.rule,
                    v.beta,
                    v.eps,
                    v.level,
                    v.k_star,
                    v.k_ref
                );
            }
            println!("{} comparisons, {} violations", checked.len(), violations.len());
            Ok(true)
        }
        Command::SpectralSweep(mut args) => {
            args.problem.get_or_insert_with(|| ProblemKind::Spectral.to_string());
            let spec = args.resolve()?;
            let rows = harness::spectral_sweep(&spec)?;
            let path = harness::output_path(&spec.out_dir, "sweep.csv")?;
            harness::write_sweep(&rows, &spec.decay.to_string(), &path)?;
            let mut lines = spec.manifest_lines();
            lines.push(kv("outputs", "sweep.csv"));
            lines.push(kv("rows", rows.len()));
            lines.push(kv("status", "ok"));
            manifest(&spec.out_dir, "spectral-sweep", lines, started)?;
            println!("{} rows written to {}", rows.len(), path.display());
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse().command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
