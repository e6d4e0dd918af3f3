//! Layered run configuration: defaults, config file, `MOR_*` environment
//! variables and flags, later layers overriding earlier ones.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use mor_core::bt_dense::DEFAULT_DENSE_CAP;
use mor_core::eksm::{EksmOptions, Formulation};
use mor_core::freqresp::{FrequencyGrid, DEFAULT_Z0};
use mor_core::model::{parse_value, DEFAULT_GROUNDING_CAPACITANCE};
use mor_core::pipeline::{Mode, ReduceOptions};
use mor_core::rom::Target;

use crate::report::Failure;

pub const KEYS: [&str; 13] = [
    "mode",
    "tol",
    "maxiter",
    "order",
    "eps",
    "grid",
    "z0",
    "threads",
    "out",
    "formulation",
    "c_min",
    "dense_cap",
    "verbose",
];

pub const ENV_PREFIX: &str = "MOR_";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Source {
    File(PathBuf),
    Env(String),
    Flag,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::File(p) => write!(f, "config file {}", p.display()),
            Source::Env(name) => write!(f, "environment variable {name}"),
            Source::Flag => f.write_str("command line"),
        }
    }
}

/// Raw settings with the layer each came from.
#[derive(Debug, Default)]
pub struct Layers {
    values: BTreeMap<&'static str, (String, Source)>,
}

impl Layers {
    /// Applies one layer. `order` and `eps` form a single target setting:
    /// a layer that names either replaces both from lower layers.
    pub fn apply(&mut self, pairs: Vec<(&'static str, String)>, source: Source) -> Result<(), Failure> {
        let has = |k: &str| pairs.iter().any(|(key, _)| *key == k);
        if has("order") && has("eps") {
            return Err(Failure::config(format!("{source} sets both order and eps")));
        }
        if has("order") || has("eps") {
            self.values.remove("order");
            self.values.remove("eps");
        }
        for (key, value) in pairs {
            self.values.insert(key, (value, source.clone()));
        }
        Ok(())
    }

    fn get(&self, key: &str) -> Option<&(String, Source)> {
        self.values.get(key)
    }
}

fn known_key(key: &str) -> Option<&'static str> {
    KEYS.iter().copied().find(|k| *k == key)
}

/// Reads `key = value` lines; `#` starts a comment. Keys may use `-` or `_`.
pub fn parse_config_file(path: &Path) -> Result<Vec<(&'static str, String)>, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::config(format!("cannot read config file {}: {e}", path.display())))?;
    let mut pairs = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Failure::config(format!("{}:{}: expected key = value", path.display(), no + 1)))?;
        let key = key.trim().replace('-', "_");
        let key = known_key(&key)
            .ok_or_else(|| Failure::config(format!("{}:{}: unknown key '{key}'", path.display(), no + 1)))?;
        pairs.push((key, value.trim().to_string()));
    }
    Ok(pairs)
}

/// `MOR_TOL`, `MOR_C_MIN`, ... from the given environment.
pub fn env_pairs(vars: impl Iterator<Item = (String, String)>) -> Vec<(&'static str, String, String)> {
    let mut out = Vec::new();
    for (name, value) in vars {
        let Some(rest) = name.strip_prefix(ENV_PREFIX) else { continue };
        if let Some(key) = known_key(&rest.to_ascii_lowercase()) {
            out.push((key, value, name));
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub reduce: ReduceOptions,
    pub grid: FrequencyGrid,
    pub z0: f64,
    pub threads: Option<usize>,
    pub out: PathBuf,
    pub grounding_capacitance: Option<f64>,
    pub verbose: u8,
}

impl RunConfig {
    pub fn resolve(layers: &Layers) -> Result<Self, Failure> {
        let parse = |key: &str| -> Option<(&str, &Source)> { layers.get(key).map(|(v, s)| (v.as_str(), s)) };
        let bad = |key: &str, value: &str, source: &Source, why: &str| {
            Failure::config(format!("invalid {key} '{value}' from {source}: {why}"))
        };
        let number = |key: &str| -> Result<Option<f64>, Failure> {
            match parse(key) {
                None => Ok(None),
                Some((v, s)) => parse_value(v).map(Some).ok_or_else(|| bad(key, v, s, "not a number")),
            }
        };
        let count = |key: &str| -> Result<Option<usize>, Failure> {
            match parse(key) {
                None => Ok(None),
                Some((v, s)) => v.parse().map(Some).map_err(|_| bad(key, v, s, "not a non-negative integer")),
            }
        };

        let mode = match parse("mode") {
            None => Mode::Eksm,
            Some(("eksm", _)) => Mode::Eksm,
            Some(("dense-oracle" | "dense", _)) => Mode::DenseOracle,
            Some((v, s)) => return Err(bad("mode", v, s, "expected eksm or dense-oracle")),
        };
        let formulation = match parse("formulation") {
            None => Formulation::default(),
            Some(("symmetrized", _)) => Formulation::Symmetrized,
            Some(("descriptor", _)) => Formulation::Descriptor,
            Some((v, s)) => return Err(bad("formulation", v, s, "expected symmetrized or descriptor")),
        };
        let mut eksm = EksmOptions::default();
        if let Some(tol) = number("tol")? {
            if !(tol > 0.0 && tol.is_finite()) {
                let (v, s) = parse("tol").unwrap();
                return Err(bad("tol", v, s, "must be positive"));
            }
            eksm.tol = tol;
        }
        if let Some(maxiter) = count("maxiter")? {
            if maxiter == 0 {
                let (v, s) = parse("maxiter").unwrap();
                return Err(bad("maxiter", v, s, "must be at least 1"));
            }
            eksm.maxiter = maxiter;
        }
        let target = if let Some(r) = count("order")? {
            if r == 0 {
                let (v, s) = parse("order").unwrap();
                return Err(bad("order", v, s, "must be at least 1"));
            }
            Target::Order(r)
        } else if let Some(eps) = number("eps")? {
            if !(eps >= 0.0 && eps.is_finite()) {
                let (v, s) = parse("eps").unwrap();
                return Err(bad("eps", v, s, "must be non-negative"));
            }
            Target::Tolerance(eps)
        } else {
            Target::Default
        };
        let grid = match parse("grid") {
            None => FrequencyGrid::default(),
            Some((v, s)) => FrequencyGrid::parse(v).map_err(|e| bad("grid", v, s, &e.to_string()))?,
        };
        let z0 = number("z0")?.unwrap_or(DEFAULT_Z0);
        if !(z0 > 0.0 && z0.is_finite()) {
            return Err(Failure::config(format!("z0 must be positive, got {z0}")));
        }
        let threads = count("threads")?;
        if threads == Some(0) {
            return Err(Failure::config("threads must be at least 1".into()));
        }
        let grounding_capacitance = match parse("c_min") {
            None => Some(DEFAULT_GROUNDING_CAPACITANCE),
            Some(("off" | "none", _)) => None,
            Some((v, s)) => match parse_value(v) {
                Some(c) if c > 0.0 => Some(c),
                _ => return Err(bad("c_min", v, s, "expected a positive capacitance or off")),
            },
        };
        let verbose = match parse("verbose") {
            None => 0,
            Some(("true" | "yes" | "on", _)) => 1,
            Some(("false" | "no" | "off", _)) => 0,
            Some((v, s)) => v.parse().map_err(|_| bad("verbose", v, s, "expected a level or true/false"))?,
        };
        Ok(RunConfig {
            reduce: ReduceOptions {
                mode,
                eksm,
                formulation,
                target,
                dense_cap: count("dense_cap")?.unwrap_or(DEFAULT_DENSE_CAP),
            },
            grid,
            z0,
            threads,
            out: parse("out").map_or_else(|| PathBuf::from("mor_out"), |(v, _)| PathBuf::from(v)),
            grounding_capacitance,
            verbose,
        })
    }
}
