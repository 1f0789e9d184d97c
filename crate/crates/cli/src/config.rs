//! Flat `key = value` run configuration.

use std::path::PathBuf;

use bgk_core::integrators::SchemeSpec;
use bgk_core::scenarios::{Scenario, ScenarioId};
use bgk_core::Error as CoreError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: unknown key {key:?}")]
    UnknownKey { line: usize, key: String },

    #[error("line {line}: {key} = {value:?} is not {expected}")]
    TypeMismatch {
        line: usize,
        key: String,
        value: String,
        expected: &'static str,
    },

    #[error("{0}")]
    PairingViolation(String),

    #[error("line {line}: expected `key = value`, found {text:?}")]
    Syntax { line: usize, text: String },

    #[error("line {line}: {key} is set twice")]
    DuplicateKey { line: usize, key: String },

    #[error("missing required key {0:?}")]
    MissingKey(&'static str),

    #[error("{0}")]
    Invalid(String),
}

pub const KEYS: [&str; 12] = [
    "scheme",
    "scenario",
    "nx",
    "nv",
    "cfl",
    "kappa",
    "t_final",
    "out",
    "snapshots",
    "newton_tol",
    "exact",
    "resolutions",
];

pub const DEFAULT_SCHEME: &str = "RK3-W35-DM";

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scheme: SchemeSpec,
    /// Scenario with every override applied.
    pub scenario: Scenario,
    pub out: Option<PathBuf>,
    pub snapshots: Vec<f64>,
    pub newton_tol: Option<f64>,
    pub exact: bool,
    pub resolutions: Vec<usize>,
}

struct Entry {
    line: usize,
    key: String,
    value: String,
}

impl Entry {
    fn mismatch(&self, expected: &'static str) -> ConfigError {
        ConfigError::TypeMismatch {
            line: self.line,
            key: self.key.clone(),
            value: self.value.clone(),
            expected,
        }
    }

    fn positive(&self) -> Result<f64, ConfigError> {
        match self.value.parse::<f64>() {
            Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
            _ => Err(self.mismatch("a positive number")),
        }
    }

    fn count(&self) -> Result<usize, ConfigError> {
        match self.value.parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(self.mismatch("a positive integer")),
        }
    }

    fn flag(&self) -> Result<bool, ConfigError> {
        match self.value.to_ascii_lowercase().as_str() {
            "true" | "yes" | "1" => Ok(true),
            "false" | "no" | "0" => Ok(false),
            _ => Err(self.mismatch("a boolean")),
        }
    }
}

fn split_list(text: &str) -> impl Iterator<Item = &str> {
    text.split(',').map(str::trim).filter(|s| !s.is_empty())
}

/// Comma-separated non-negative times.
pub fn parse_times(text: &str) -> Option<Vec<f64>> {
    split_list(text)
        .map(|s| s.parse::<f64>().ok().filter(|t| *t >= 0.0 && t.is_finite()))
        .collect()
}

/// Comma-separated cell counts.
pub fn parse_counts(text: &str) -> Option<Vec<usize>> {
    split_list(text)
        .map(|s| s.parse::<usize>().ok().filter(|&n| n > 0))
        .collect()
}

fn parse_scheme(text: &str) -> Result<SchemeSpec, ConfigError> {
    SchemeSpec::parse(text).map_err(|e| match e {
        CoreError::Pairing(msg) => ConfigError::PairingViolation(msg),
        other => ConfigError::Invalid(other.to_string()),
    })
}

fn entries(text: &str) -> Result<Vec<Entry>, ConfigError> {
    let mut out: Vec<Entry> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(ConfigError::Syntax {
                line,
                text: raw.to_string(),
            });
        };
        let key = key.trim().to_ascii_lowercase();
        if !KEYS.contains(&key.as_str()) {
            return Err(ConfigError::UnknownKey { line, key });
        }
        if out.iter().any(|e| e.key == key) {
            return Err(ConfigError::DuplicateKey { line, key });
        }
        out.push(Entry {
            line,
            key,
            value: value.trim().to_string(),
        });
    }
    Ok(out)
}

/// Parses and validates a configuration; unset fields take the scenario defaults.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let entries = entries(text)?;
    let get = |key: &str| entries.iter().find(|e| e.key == key);
    let id: ScenarioId = match get("scenario") {
        Some(e) => e
            .value
            .parse()
            .map_err(|_| e.mismatch("a scenario name (single-shock, smooth, ap, riemann)"))?,
        None => return Err(ConfigError::MissingKey("scenario")),
    };
    let mut scenario = Scenario::new(id);
    let scheme = parse_scheme(get("scheme").map_or(DEFAULT_SCHEME, |e| e.value.as_str()))?;
    let mut cfg = RunConfig {
        scheme,
        scenario: scenario.clone(),
        out: None,
        snapshots: Vec::new(),
        newton_tol: None,
        exact: false,
        resolutions: Vec::new(),
    };
    for e in &entries {
        match e.key.as_str() {
            "nx" => scenario.nx = e.count()?,
            "nv" => scenario.nv = e.count()?,
            "cfl" => scenario.cfl = e.positive()?,
            "kappa" => scenario.kappa = e.positive()?,
            "t_final" => scenario.t_final = e.positive()?,
            "out" => cfg.out = Some(PathBuf::from(&e.value)),
            "snapshots" => {
                cfg.snapshots = parse_times(&e.value)
                    .ok_or_else(|| e.mismatch("a list of non-negative times"))?
            }
            "newton_tol" => cfg.newton_tol = Some(e.positive()?),
            "exact" => cfg.exact = e.flag()?,
            "resolutions" => {
                cfg.resolutions = parse_counts(&e.value)
                    .ok_or_else(|| e.mismatch("a list of positive integers"))?
            }
            _ => {}
        }
    }
    if scenario.nv < 2 {
        return Err(ConfigError::Invalid(format!(
            "nv = {} gives fewer than 3 velocity nodes",
            scenario.nv
        )));
    }
    if cfg.exact && scenario.riemann_states().is_none() {
        return Err(ConfigError::Invalid(format!(
            "exact = true needs a Riemann-type scenario, not {}",
            scenario.id
        )));
    }
    cfg.scenario = scenario;
    Ok(cfg)
}
