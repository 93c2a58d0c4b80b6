//! Run configuration: a `key=value` file overlaid by command-line flags.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use dualsteiner_core::moment::MomentConfig;
use dualsteiner_core::rootcone::SearchConfig;
use dualsteiner_core::synth::ROUND_TRIP_TOL;

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        match s.trim() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(CliError::input(format!("unknown format {other:?}; expected json or csv"))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Json => "json",
            Format::Csv => "csv",
        })
    }
}

/// Everything a command may tune. `None` resolutions select the exact zonal
/// rule when the pair admits it and the default grid otherwise.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    /// Resolution for every dimension without its own entry.
    pub res: Option<usize>,
    /// Per-dimension resolutions (`res.N` keys).
    pub res_by_dim: BTreeMap<usize, usize>,
    /// Relative tolerance on recomputed quermassintegrals.
    pub quad_tol: f64,
    /// Minimal floor mass fraction accepted as strictly positive.
    pub pd_tol: f64,
    /// Relative root residual and Vieta tolerance.
    pub root_tol: f64,
    pub ray_tol: f64,
    pub witness_tol: f64,
    pub k_max: usize,
    pub lp_nodes: usize,
    /// Largest Hankel order checked by `verify`.
    pub hankel_m: usize,
    pub budget: usize,
    pub starts: usize,
    pub seed: u64,
    /// `None` lets each command pick its natural format.
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let m = MomentConfig::default();
        let s = SearchConfig::default();
        RunConfig {
            res: None,
            res_by_dim: BTreeMap::new(),
            quad_tol: ROUND_TRIP_TOL,
            pd_tol: m.margin_tol,
            root_tol: 1e-8,
            ray_tol: m.ray_tol,
            witness_tol: m.witness_tol,
            k_max: m.k_max,
            lp_nodes: m.nodes,
            hankel_m: 3,
            budget: s.budget,
            starts: s.starts,
            seed: s.seed,
            format: None,
            out: None,
        }
    }
}

/// Flag values; each one present overrides the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub res: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| CliError::input(format!("config key {key}: cannot parse {value:?}")))
}

/// Integers may be written with an exponent (`1e3`) as long as they are whole.
fn parse_count(key: &str, value: &str) -> Result<usize, CliError> {
    if let Ok(v) = value.parse::<usize>() {
        return Ok(v);
    }
    let x: f64 = parse_num(key, value)?;
    if x >= 0.0 && x.fract() == 0.0 && x <= usize::MAX as f64 {
        Ok(x as usize)
    } else {
        Err(CliError::input(format!("config key {key}: {value:?} is not a non-negative integer")))
    }
}

impl RunConfig {
    /// Parses `key=value` lines; `#` starts a comment, blank lines are skipped.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = RunConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::input(format!("config line {}: expected key=value", lineno + 1)))?;
            cfg.set(key.trim(), value.trim())?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::input(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        match key {
            "res" => self.res = Some(parse_count(key, value)?),
            "quad_tol" => self.quad_tol = parse_num(key, value)?,
            "pd_tol" => self.pd_tol = parse_num(key, value)?,
            "root_tol" => self.root_tol = parse_num(key, value)?,
            "ray_tol" => self.ray_tol = parse_num(key, value)?,
            "witness_tol" => self.witness_tol = parse_num(key, value)?,
            "k_max" => self.k_max = parse_count(key, value)?,
            "lp_nodes" => self.lp_nodes = parse_count(key, value)?,
            "hankel_m" => self.hankel_m = parse_count(key, value)?,
            "budget" => self.budget = parse_count(key, value)?,
            "starts" => self.starts = parse_count(key, value)?,
            "seed" => self.seed = parse_count(key, value)? as u64,
            "format" => self.format = Some(value.parse()?),
            "out" => self.out = Some(PathBuf::from(value)),
            _ => match key.strip_prefix("res.") {
                Some(dim) => {
                    let n = parse_count(key, dim)?;
                    self.res_by_dim.insert(n, parse_count(key, value)?);
                }
                None => return Err(CliError::input(format!("unknown config key {key:?}"))),
            },
        }
        Ok(())
    }

    pub fn apply(&mut self, o: &Overrides) -> Result<(), CliError> {
        if let Some(seed) = o.seed {
            self.seed = seed;
        }
        if let Some(res) = o.res {
            // a flag beats per-dimension file entries too
            self.res = Some(res);
            self.res_by_dim.clear();
        }
        if let Some(out) = &o.out {
            self.out = Some(out.clone());
        }
        if let Some(format) = o.format {
            self.format = Some(format);
        }
        self.validate()
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let tols = [
            ("quad_tol", self.quad_tol),
            ("pd_tol", self.pd_tol),
            ("root_tol", self.root_tol),
            ("ray_tol", self.ray_tol),
            ("witness_tol", self.witness_tol),
        ];
        for (name, t) in tols {
            if !(t > 0.0 && t.is_finite()) {
                return Err(CliError::input(format!("{name} must be positive, got {t}")));
            }
        }
        let counts = [
            ("k_max", self.k_max),
            ("lp_nodes", self.lp_nodes),
            ("hankel_m", self.hankel_m),
            ("budget", self.budget),
            ("starts", self.starts),
        ];
        for (name, c) in counts {
            if c == 0 {
                return Err(CliError::input(format!("{name} must be at least 1")));
            }
        }
        if self.lp_nodes < 3 {
            return Err(CliError::input("lp_nodes must be at least 3"));
        }
        if let Some(0) = self.res {
            return Err(CliError::input("res must be at least 1"));
        }
        if self.res_by_dim.values().any(|&r| r == 0) {
            return Err(CliError::input("per-dimension resolutions must be at least 1"));
        }
        Ok(())
    }

    /// Explicit resolution for dimension `n`, if any.
    pub fn resolution(&self, n: usize) -> Option<usize> {
        self.res_by_dim.get(&n).copied().or(self.res)
    }

    pub fn moment(&self) -> MomentConfig {
        MomentConfig {
            nodes: self.lp_nodes,
            k_max: self.k_max,
            margin_tol: self.pd_tol,
            ray_tol: self.ray_tol,
            witness_tol: self.witness_tol,
        }
    }

    pub fn search(&self) -> SearchConfig {
        SearchConfig { budget: self.budget, starts: self.starts, seed: self.seed, moment: self.moment() }
    }
}
