//! `k*` tables on disk, spreads across levels, and the sandwich check
//! `k*_ref − ℓ ≤ k*_h ≤ k*_ref + slack`.

use std::path::Path;

use super::config::ProblemKind;
use super::{csv_err, csv_writer, fmt_f64, fmt_opt};
use crate::error::{Error, Result};
use crate::solver::StepRule;

pub const TABLE_HEADER: [&str; 9] = [
    "problem",
    "rule",
    "beta",
    "eps",
    "level",
    "h",
    "dt",
    "k_star",
    "terminated_reason",
];

#[derive(Debug, Clone, PartialEq)]
pub struct KStarRow {
    pub problem: ProblemKind,
    pub rule: StepRule,
    pub beta: f64,
    pub eps: f64,
    pub level: u32,
    pub h: Option<f64>,
    pub dt: Option<f64>,
    pub k_star: Option<usize>,
    pub terminated_reason: String,
}

pub fn write_table(rows: &[KStarRow], path: &Path) -> Result<()> {
    let mut w = csv_writer(path)?;
    let err = csv_err(path);
    w.write_record(TABLE_HEADER).map_err(&err)?;
    for r in rows {
        w.write_record([
            r.problem.to_string(),
            r.rule.to_string(),
            fmt_f64(r.beta),
            fmt_f64(r.eps),
            r.level.to_string(),
            fmt_opt(r.h.map(fmt_f64)),
            fmt_opt(r.dt.map(fmt_f64)),
            fmt_opt(r.k_star),
            r.terminated_reason.clone(),
        ])
        .map_err(&err)?;
    }
    w.flush().map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_table(path: &Path) -> Result<Vec<KStarRow>> {
    let err = csv_err(path);
    let mut reader = csv::Reader::from_path(path).map_err(&err)?;
    let header = reader.headers().map_err(&err)?.clone();
    if header.iter().ne(TABLE_HEADER) {
        return Err(Error::Config(format!("{}: unexpected header {header:?}", path.display())));
    }
    let bad = |line: usize, what: &str| Error::Config(format!("{}:{line}: cannot parse {what}", path.display()));
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(&err)?;
        let line = i + 2;
        let num = |j: usize| -> Result<f64> { rec[j].parse().map_err(|_| bad(line, TABLE_HEADER[j])) };
        let opt_num = |j: usize| -> Result<Option<f64>> {
            if rec[j].is_empty() {
                Ok(None)
            } else {
                num(j).map(Some)
            }
        };
        rows.push(KStarRow {
            problem: rec[0].parse()?,
            rule: rec[1].parse().map_err(|_| bad(line, "rule"))?,
            beta: num(2)?,
            eps: num(3)?,
            level: rec[4].parse().map_err(|_| bad(line, "level"))?,
            h: opt_num(5)?,
            dt: opt_num(6)?,
            k_star: if rec[7].is_empty() {
                None
            } else {
                Some(rec[7].parse().map_err(|_| bad(line, "k_star"))?)
            },
            terminated_reason: rec[8].to_string(),
        });
    }
    Ok(rows)
}

/// Rows sharing problem, rule, beta and eps, in first-appearance order.
fn groups(rows: &[KStarRow]) -> Vec<Vec<&KStarRow>> {
    let mut out: Vec<Vec<&KStarRow>> = Vec::new();
    for r in rows {
        let same = |g: &Vec<&KStarRow>| {
            let f = g[0];
            f.problem == r.problem && f.rule == r.rule && f.beta == r.beta && f.eps == r.eps
        };
        match out.iter_mut().find(|g| same(g)) {
            Some(g) => g.push(r),
            None => out.push(vec![r]),
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpreadRow {
    pub problem: ProblemKind,
    pub rule: StepRule,
    pub beta: f64,
    pub eps: f64,
    pub levels: usize,
    /// `max k* − min k*`; `None` when some level did not converge.
    pub ell: Option<usize>,
}

pub fn spread(rows: &[KStarRow]) -> Result<Vec<SpreadRow>> {
    groups(rows)
        .into_iter()
        .map(|g| {
            let f = g[0];
            if g.len() < 2 {
                return Err(Error::InsufficientData(format!(
                    "{} {} beta={} eps={:e} has a single level",
                    f.problem, f.rule, f.beta, f.eps
                )));
            }
            let ks: Option<Vec<usize>> = g.iter().map(|r| r.k_star).collect();
            Ok(SpreadRow {
                problem: f.problem,
                rule: f.rule,
                beta: f.beta,
                eps: f.eps,
                levels: g.len(),
                ell: ks.map(|ks| ks.iter().max().unwrap() - ks.iter().min().unwrap()),
            })
        })
        .collect()
}

pub fn write_spread(rows: &[SpreadRow], path: &Path) -> Result<()> {
    let mut w = csv_writer(path)?;
    let err = csv_err(path);
    w.write_record(["problem", "rule", "beta", "eps", "levels", "ell"]).map_err(&err)?;
    for r in rows {
        w.write_record([
            r.problem.to_string(),
            r.rule.to_string(),
            fmt_f64(r.beta),
            fmt_f64(r.eps),
            r.levels.to_string(),
            fmt_opt(r.ell),
        ])
        .map_err(&err)?;
    }
    w.flush().map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SandwichStatus {
    Ok,
    /// `k*_h > k*_ref + slack`.
    Upper,
    /// `k*_h < k*_ref − ell_bound`.
    Lower,
    Unavailable,
}

impl SandwichStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SandwichStatus::Ok => "ok",
            SandwichStatus::Upper => "upper_violation",
            SandwichStatus::Lower => "lower_violation",
            SandwichStatus::Unavailable => "unavailable",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SandwichRow {
    pub problem: ProblemKind,
    pub rule: StepRule,
    pub beta: f64,
    pub eps: f64,
    pub level: u32,
    pub reference_level: u32,
    pub k_star: Option<usize>,
    pub k_ref: Option<usize>,
    pub status: SandwichStatus,
}

/// Compares every coarser level against the finest level of its group.
pub fn sandwich_check(rows: &[KStarRow], slack: usize, ell_bound: usize) -> Result<Vec<SandwichRow>> {
    let mut out = Vec::new();
    for g in groups(rows) {
        let reference = *g.iter().max_by_key(|r| r.level).expect("groups are nonempty");
        if g.len() < 2 {
            return Err(Error::InsufficientData(format!(
                "{} {} beta={} eps={:e} has a single level",
                reference.problem, reference.rule, reference.beta, reference.eps
            )));
        }
        for r in g.iter().filter(|r| r.level != reference.level) {
            let status = match (r.k_star, reference.k_star) {
                (Some(k), Some(kr)) if k > kr + slack => SandwichStatus::Upper,
                (Some(k), Some(kr)) if k + ell_bound < kr => SandwichStatus::Lower,
                (Some(_), Some(_)) => SandwichStatus::Ok,
                _ => SandwichStatus::Unavailable,
            };
            out.push(SandwichRow {
                problem: r.problem,
                rule: r.rule,
                beta: r.beta,
                eps: r.eps,
                level: r.level,
                reference_level: reference.level,
                k_star: r.k_star,
                k_ref: reference.k_star,
                status,
            });
        }
    }
    Ok(out)
}

pub fn write_sandwich(rows: &[SandwichRow], path: &Path) -> Result<()> {
    let mut w = csv_writer(path)?;
    let err = csv_err(path);
    w.write_record([
        "problem",
        "rule",
        "beta",
        "eps",
        "level",
        "reference_level",
        "k_star",
        "k_ref",
        "status",
    ])
    .map_err(&err)?;
    for r in rows {
        w.write_record([
            r.problem.to_string(),
            r.rule.to_string(),
            fmt_f64(r.beta),
            fmt_f64(r.eps),
            r.level.to_string(),
            r.reference_level.to_string(),
            fmt_opt(r.k_star),
            fmt_opt(r.k_ref),
            r.status.as_str().to_string(),
        ])
        .map_err(&err)?;
    }
    w.flush().map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
