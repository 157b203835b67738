//! Experiment specifications and the flat `key = value` configuration format.
//!
//! Recognized keys (lists are comma separated):
//!
//! | key        | example                        |
//! |------------|--------------------------------|
//! | `problem`  | `poisson`, `wave`, `burgers`, `spectral` |
//! | `rules`    | `BB1, BB2, ABB`                |
//! | `betas`    | `0.2, 0.05, 0.01`              |
//! | `epsilons` | `1e-2, 1e-4, 1e-6, 1e-8`       |
//! | `levels`   | `5, 6, 7` (spectral: sizes `n`)|
//! | `dts`      | `0.01, 0.04, 0.016` (paired with `levels`) |
//! | `dt_pairs` | `4:0.01, 5:0.04` (level:dt)    |
//! | `decay`    | `geometric:0.5`, `algebraic:2` |
//! | `out_dir`  | `out/table1`                   |
//! | `seed`     | `7`                            |
//! | `max_iter` | `10000`                        |
//!
//! Blank lines and text after `#` are ignored.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::solver::StepRule;
use crate::spectral::Decay;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProblemKind {
    Poisson,
    Wave,
    Burgers,
    Spectral,
}

impl ProblemKind {
    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::Poisson => "poisson",
            ProblemKind::Wave => "wave",
            ProblemKind::Burgers => "burgers",
            ProblemKind::Spectral => "spectral",
        }
    }

    fn is_evolution(self) -> bool {
        matches!(self, ProblemKind::Wave | ProblemKind::Burgers)
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "poisson" => Ok(ProblemKind::Poisson),
            "wave" => Ok(ProblemKind::Wave),
            "burgers" => Ok(ProblemKind::Burgers),
            "spectral" => Ok(ProblemKind::Spectral),
            _ => Err(Error::Config(format!("unknown problem `{s}`"))),
        }
    }
}

/// Default time step paired with a wave level.
pub fn wave_default_dt(level: u32) -> Option<f64> {
    match level {
        4 => Some(0.01),
        5 => Some(0.04),
        6 => Some(0.016),
        7 => Some(0.0064),
        8 => Some(0.0026),
        _ => None,
    }
}

/// Default time step paired with a Burgers level: `Δt = 2h`.
pub fn burgers_default_dt(level: u32) -> f64 {
    2f64.powi(1 - level as i32)
}

/// A fully resolved experiment grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub problem: ProblemKind,
    pub rules: Vec<StepRule>,
    pub betas: Vec<f64>,
    /// Strictly decreasing.
    pub epsilons: Vec<f64>,
    pub levels: Vec<u32>,
    /// Time step per level for wave and Burgers, `None` otherwise.
    pub dts: Vec<Option<f64>>,
    pub decay: Decay,
    pub out_dir: PathBuf,
    pub seed: u64,
    pub max_iter: usize,
}

impl ExperimentSpec {
    pub fn defaults(problem: ProblemKind) -> Self {
        Settings {
            problem: Some(problem),
            ..Settings::default()
        }
        .resolve()
        .expect("defaults are valid")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.rules.is_empty() || self.betas.is_empty() || self.epsilons.is_empty() || self.levels.is_empty() {
            return bad("rules, betas, epsilons and levels must be nonempty".into());
        }
        if let Some(b) = self.betas.iter().find(|b| !(**b > 0.0 && b.is_finite())) {
            return bad(format!("beta must be positive, got {b}"));
        }
        if let Some(e) = self.epsilons.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
            return bad(format!("epsilon must be positive, got {e}"));
        }
        if self.epsilons.windows(2).any(|w| w[1] >= w[0]) {
            return bad(format!("epsilons must be strictly decreasing, got {:?}", self.epsilons));
        }
        if self.dts.len() != self.levels.len() {
            return bad(format!("{} time steps for {} levels", self.dts.len(), self.levels.len()));
        }
        if self.max_iter == 0 {
            return bad("max_iter must be positive".into());
        }
        let min_level = if self.problem == ProblemKind::Spectral { 2 } else { 1 };
        if let Some(l) = self.levels.iter().find(|l| **l < min_level) {
            return bad(format!("level {l} is too small"));
        }
        for dt in &self.dts {
            match (self.problem.is_evolution(), dt) {
                (true, Some(dt)) if *dt > 0.0 && dt.is_finite() => {}
                (true, _) => return bad(format!("{} needs a positive time step per level", self.problem)),
                (false, None) => {}
                (false, Some(_)) => return bad(format!("{} takes no time step", self.problem)),
            }
        }
        Ok(())
    }

    /// The smallest tolerance, used as the stopping criterion of every run.
    pub fn eps_min(&self) -> f64 {
        *self.epsilons.last().expect("validated")
    }

    /// `key = value` lines echoing the resolved configuration.
    pub fn manifest_lines(&self) -> Vec<(String, String)> {
        let join = |v: Vec<String>| v.join(",");
        vec![
            ("problem".into(), self.problem.to_string()),
            ("rules".into(), join(self.rules.iter().map(|r| r.to_string()).collect())),
            ("betas".into(), join(self.betas.iter().map(|b| b.to_string()).collect())),
            ("epsilons".into(), join(self.epsilons.iter().map(|e| format!("{e:e}")).collect())),
            ("levels".into(), join(self.levels.iter().map(|l| l.to_string()).collect())),
            (
                "dts".into(),
                if self.dts.iter().all(Option::is_none) {
                    "none".into()
                } else {
                    join(self.dts.iter().map(|d| d.map(|d| d.to_string()).unwrap_or_default()).collect())
                },
            ),
            ("decay".into(), self.decay.to_string()),
            ("out_dir".into(), self.out_dir.display().to_string()),
            ("seed".into(), self.seed.to_string()),
            ("max_iter".into(), self.max_iter.to_string()),
        ]
    }
}

/// Partially specified settings from a file or the command line.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    pub problem: Option<ProblemKind>,
    pub rules: Option<Vec<StepRule>>,
    pub betas: Option<Vec<f64>>,
    pub epsilons: Option<Vec<f64>>,
    pub levels: Option<Vec<u32>>,
    pub dts: Option<Vec<f64>>,
    pub decay: Option<Decay>,
    pub out_dir: Option<PathBuf>,
    pub seed: Option<u64>,
    pub max_iter: Option<usize>,
}

pub fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|_| Error::Config(format!("cannot parse `{s}` in `{key}`")))
        })
        .collect()
}

fn parse_one<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("cannot parse `{value}` for `{key}`")))
}

impl Settings {
    pub fn parse(text: &str) -> Result<Self> {
        let mut s = Settings::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "problem" => s.problem = Some(value.parse()?),
                "rules" => {
                    s.rules = Some(
                        value
                            .split(',')
                            .map(str::trim)
                            .filter(|r| !r.is_empty())
                            .map(|r| r.parse().map_err(|e: Error| Error::Config(e.to_string())))
                            .collect::<Result<_>>()?,
                    )
                }
                "betas" => s.betas = Some(parse_list(key, value)?),
                "epsilons" => s.epsilons = Some(parse_list(key, value)?),
                "levels" => s.levels = Some(parse_list(key, value)?),
                "dts" => s.dts = Some(parse_list(key, value)?),
                "dt_pairs" => {
                    let mut levels = Vec::new();
                    let mut dts = Vec::new();
                    for pair in value.split(',').map(str::trim).filter(|p| !p.is_empty()) {
                        let (l, dt) = pair
                            .split_once(':')
                            .ok_or_else(|| Error::Config(format!("`{pair}` in dt_pairs is not level:dt")))?;
                        levels.push(parse_one(key, l)?);
                        dts.push(parse_one(key, dt)?);
                    }
                    s.levels = Some(levels);
                    s.dts = Some(dts);
                }
                "decay" => s.decay = Some(value.parse().map_err(|e: Error| Error::Config(e.to_string()))?),
                "out_dir" => s.out_dir = Some(PathBuf::from(value)),
                "seed" => s.seed = Some(parse_one(key, value)?),
                "max_iter" => s.max_iter = Some(parse_one(key, value)?),
                other => return Err(Error::Config(format!("line {}: unknown key `{other}`", lineno + 1))),
            }
        }
        Ok(s)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Fields set in `over` win.
    pub fn overridden_by(self, over: Settings) -> Settings {
        Settings {
            problem: over.problem.or(self.problem),
            rules: over.rules.or(self.rules),
            betas: over.betas.or(self.betas),
            epsilons: over.epsilons.or(self.epsilons),
            levels: over.levels.or(self.levels),
            dts: over.dts.or(self.dts),
            decay: over.decay.or(self.decay),
            out_dir: over.out_dir.or(self.out_dir),
            seed: over.seed.or(self.seed),
            max_iter: over.max_iter.or(self.max_iter),
        }
    }

    /// Fills unset fields with the problem's defaults and validates.
    pub fn resolve(self) -> Result<ExperimentSpec> {
        let problem = self
            .problem
            .ok_or_else(|| Error::Config("no problem given".into()))?;
        let (default_betas, default_levels): (Vec<f64>, Vec<u32>) = match problem {
            ProblemKind::Poisson => (vec![0.2, 0.05, 0.01], vec![5, 6, 7]),
            ProblemKind::Wave => (vec![0.5, 0.05], vec![4, 5, 6]),
            ProblemKind::Burgers => (vec![0.5, 0.05], vec![5, 6, 7]),
            ProblemKind::Spectral => (vec![1.0], vec![50, 100, 200]),
        };
        let levels = self.levels.unwrap_or(default_levels);
        let dts = match (problem, self.dts) {
            (ProblemKind::Wave | ProblemKind::Burgers, Some(dts)) => {
                if dts.len() != levels.len() {
                    return Err(Error::Config(format!(
                        "{} time steps given for {} levels",
                        dts.len(),
                        levels.len()
                    )));
                }
                dts.into_iter().map(Some).collect()
            }
            (ProblemKind::Wave, None) => levels
                .iter()
                .map(|&l| {
                    wave_default_dt(l)
                        .map(Some)
                        .ok_or_else(|| Error::Config(format!("no default time step for wave level {l}; pass dts")))
                })
                .collect::<Result<_>>()?,
            (ProblemKind::Burgers, None) => levels.iter().map(|&l| Some(burgers_default_dt(l))).collect(),
            (_, Some(_)) => return Err(Error::Config(format!("{problem} takes no time step"))),
            (_, None) => vec![None; levels.len()],
        };
        let spec = ExperimentSpec {
            problem,
            rules: self
                .rules
                .unwrap_or_else(|| vec![StepRule::BB1, StepRule::BB2, StepRule::ABB]),
            betas: self.betas.unwrap_or(default_betas),
            epsilons: self.epsilons.unwrap_or_else(|| vec![1e-2, 1e-4, 1e-6, 1e-8]),
            levels,
            dts,
            decay: self.decay.unwrap_or(Decay::Geometric(0.5)),
            out_dir: self.out_dir.unwrap_or_else(|| PathBuf::from("out")),
            seed: self.seed.unwrap_or(0),
            max_iter: self.max_iter.unwrap_or(10_000),
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_desk_scale_grid() {
        let w = ExperimentSpec::defaults(ProblemKind::Wave);
        assert_eq!(w.levels, vec![4, 5, 6]);
        assert_eq!(w.dts, vec![Some(0.01), Some(0.04), Some(0.016)]);
        let b = ExperimentSpec::defaults(ProblemKind::Burgers);
        assert_eq!(b.dts, vec![Some(0.0625), Some(0.03125), Some(0.015625)]);
        let p = ExperimentSpec::defaults(ProblemKind::Poisson);
        assert_eq!(p.dts, vec![None; 3]);
        assert_eq!(p.epsilons, vec![1e-2, 1e-4, 1e-6, 1e-8]);
    }

    #[test]
    fn parses_file_and_flags_override() {
        let text = "
            # table 1 subset
            problem = poisson
            rules = BB1, ABB
            betas = 0.2
            epsilons = 1e-2, 1e-4
            levels = 3, 4   # coarse
            seed = 9
        ";
        let file = Settings::parse(text).unwrap();
        let flags = Settings {
            betas: Some(vec![0.05]),
            ..Settings::default()
        };
        let spec = file.overridden_by(flags).resolve().unwrap();
        assert_eq!(spec.rules, vec![StepRule::BB1, StepRule::ABB]);
        assert_eq!(spec.betas, vec![0.05]);
        assert_eq!(spec.levels, vec![3, 4]);
        assert_eq!(spec.seed, 9);
    }

    #[test]
    fn shipped_configs_reproduce_defaults() {
        for (text, kind) in [
            (include_str!("../../../../configs/poisson.cfg"), ProblemKind::Poisson),
            (include_str!("../../../../configs/wave.cfg"), ProblemKind::Wave),
            (include_str!("../../../../configs/burgers.cfg"), ProblemKind::Burgers),
        ] {
            let spec = Settings::parse(text).unwrap().resolve().unwrap();
            let defaults = ExperimentSpec::defaults(kind);
            assert_eq!(
                (&spec.rules, &spec.betas, &spec.epsilons, &spec.levels, &spec.dts),
                (&defaults.rules, &defaults.betas, &defaults.epsilons, &defaults.levels, &defaults.dts),
                "{kind}"
            );
        }
        let spectral = Settings::parse(include_str!("../../../../configs/spectral.cfg")).unwrap();
        assert_eq!(spectral.resolve().unwrap().levels, vec![50, 100, 200]);
    }

    #[test]
    fn dt_pairs_set_levels_and_steps() {
        let s = Settings::parse("problem = wave\ndt_pairs = 3:0.1, 4:0.05").unwrap();
        let spec = s.resolve().unwrap();
        assert_eq!(spec.levels, vec![3, 4]);
        assert_eq!(spec.dts, vec![Some(0.1), Some(0.05)]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Settings::parse("problem = heat").is_err());
        assert!(Settings::parse("colour = blue").is_err());
        assert!(Settings::parse("no equals sign").is_err());
        assert!(Settings::parse("betas = 0.1, x").is_err());
        assert!(Settings::default().resolve().is_err());
        let increasing = Settings::parse("problem = poisson\nepsilons = 1e-4, 1e-2").unwrap();
        assert!(increasing.resolve().is_err());
        let dt_for_poisson = Settings::parse("problem = poisson\ndts = 0.1, 0.1, 0.1").unwrap();
        assert!(dt_for_poisson.resolve().is_err());
        let no_default = Settings::parse("problem = wave\nlevels = 2").unwrap();
        assert!(no_default.resolve().is_err());
    }
}
