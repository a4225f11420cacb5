//! Run configuration: a flat `key = value` file merged with command-line
//! flags.
//!
//! The file is TOML restricted to top-level scalars, so strings need
//! quotes (`system = "lorenz"`). Every key is also a `--kebab-case` flag;
//! flags win over the file.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Float,
    Int,
    Text,
    Bool,
}

#[derive(Debug, Clone, Copy)]
pub struct KeySpec {
    pub name: &'static str,
    pub kind: Kind,
    pub help: &'static str,
}

const fn key(name: &'static str, kind: Kind, help: &'static str) -> KeySpec {
    KeySpec { name, kind, help }
}

/// Every accepted key. Defaults depend on the subcommand and are listed
/// in the README.
pub const KEYS: &[KeySpec] = &[
    key("lambda", Kind::Float, "nonlinear coupling λ (first run in `sensitivity`)"),
    key("beta", Kind::Float, "α forcing amplitude β"),
    key("gamma", Kind::Float, "δ forcing amplitude γ"),
    key("delta_f", Kind::Float, "r forcing amplitude δ_f"),
    key("omega", Kind::Float, "forcing frequency ω"),
    key("alpha0", Kind::Float, "initial α (frozen α₀ in `closed-form`)"),
    key("delta0", Kind::Float, "initial δ (frozen δ₀ in `closed-form`)"),
    key("r0", Kind::Float, "initial r"),
    key("sigma", Kind::Float, "Lorenz σ"),
    key("rho", Kind::Float, "Lorenz ρ"),
    key("beta_l", Kind::Float, "Lorenz β"),
    key("x0", Kind::Float, "Lorenz initial x"),
    key("y0", Kind::Float, "Lorenz initial y"),
    key("z0", Kind::Float, "Lorenz initial z"),
    key("t0", Kind::Float, "start time"),
    key("t1", Kind::Float, "end time"),
    key("h", Kind::Float, "RK4 step / τ spacing"),
    key("checkpoint_every", Kind::Int, "write every n-th integration step (`simulate`)"),
    key("steps", Kind::Int, "map iterations (`map`, `lyapunov --method map`)"),
    key("system", Kind::Text, "setler | lorenz"),
    key("method", Kind::Text, "two-trajectory | algorithm1 | map (`lyapunov`)"),
    key("d0", Kind::Float, "initial separation of the companion trajectory"),
    key("renorm_every", Kind::Int, "steps between renormalisations"),
    key("logistic_a", Kind::Float, "logistic parameter a (`algorithm1`)"),
    key("logistic_x0", Kind::Float, "logistic start value (`algorithm1`)"),
    key("iterations", Kind::Int, "logistic iterations n (`algorithm1`)"),
    key("transient", Kind::Int, "discarded iterations (`bifurcate`, `algorithm1`)"),
    key("transient_time", Kind::Float, "discarded time span (`attractor`, `compare`, `lyapunov`)"),
    key("keep", Kind::Int, "samples kept per λ (`bifurcate`)"),
    key("n_lambda", Kind::Int, "number of λ values (`bifurcate`)"),
    key("lambda_min", Kind::Float, "first λ (`bifurcate`)"),
    key("lambda_max", Kind::Float, "last λ (`bifurcate`)"),
    key("lambda_b", Kind::Float, "λ of the second run (`sensitivity`)"),
    key("compare_with", Kind::Text, "second system for `compare`: setler | lorenz"),
    key("rho_b", Kind::Float, "ρ of the second Lorenz system (`compare`)"),
    key("case", Kind::Text, "gaussian | quadratic | perturbed (`entropy-f`)"),
    key("spread", Kind::Float, "Gaussian width σ (`entropy-f`)"),
    key("curvature", Kind::Float, "constant scalar curvature R"),
    key("r_max", Kind::Float, "radius of the integration ball"),
    key("mc_samples", Kind::Int, "Monte-Carlo samples (≥ 10000)"),
    key("mc_batches", Kind::Int, "Monte-Carlo batches"),
    key("seed", Kind::Int, "Monte-Carlo seed (decimal or 0x hex)"),
    key("quad_rel_tol", Kind::Float, "quadrature relative tolerance"),
    key("drop_exp_f", Kind::Bool, "omit e^{-f} from the Gaussian gradient term"),
    key("c1", Kind::Float, "fit amplitude c₁ (`entropy-w`)"),
    key("kappa1", Kind::Float, "fit rate κ₁ (`entropy-w`)"),
    key("c2", Kind::Float, "fit amplitude c₂ (`entropy-w`)"),
    key("kappa2", Kind::Float, "fit rate κ₂ (`entropy-w`)"),
    key("cf_c1", Kind::Float, "integration constant C₁ (`closed-form`)"),
    key("cf_c2", Kind::Float, "integration constant C₂ (`closed-form`)"),
    key("cf_c3", Kind::Float, "integration constant C₃ (`closed-form`)"),
    key("threads", Kind::Int, "worker threads, 0 = all cores"),
    key("output", Kind::Text, "artifact path"),
];

pub fn lookup(name: &str) -> Option<&'static KeySpec> {
    KEYS.iter().find(|k| k.name == name)
}

pub fn flag_name(key: &str) -> String {
    key.replace('_', "-")
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("unknown config key `{0}`")]
    UnknownKey(String),

    #[error("invalid value for `{field}`: {constraint}")]
    Invalid { field: String, constraint: String },

    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Syntax { path: PathBuf, message: String },
}

impl ConfigError {
    pub fn invalid(field: impl Into<String>, constraint: impl Into<String>) -> Self {
        ConfigError::Invalid {
            field: field.into(),
            constraint: constraint.into(),
        }
    }
}

impl From<setler_core::Error> for ConfigError {
    fn from(e: setler_core::Error) -> Self {
        match e {
            setler_core::Error::Invalid { field, constraint } => ConfigError::invalid(field, constraint),
            setler_core::Error::NonFinite(field) => ConfigError::invalid(field, "must be finite"),
            other => ConfigError::invalid("config", other.to_string()),
        }
    }
}

/// Parses config text into raw string values, rejecting unknown keys and
/// anything that is not a top-level scalar.
pub fn parse_config_text(text: &str, path: &Path) -> Result<BTreeMap<String, String>, ConfigError> {
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| ConfigError::Syntax {
        path: path.to_path_buf(),
        message: e.message().to_string(),
    })?;
    let mut out = BTreeMap::new();
    for (k, v) in table {
        if lookup(&k).is_none() {
            return Err(ConfigError::UnknownKey(k));
        }
        let s = match v {
            toml::Value::String(s) => s,
            toml::Value::Integer(i) => i.to_string(),
            toml::Value::Float(f) => f.to_string(),
            toml::Value::Boolean(b) => b.to_string(),
            _ => return Err(ConfigError::invalid(k, "must be a number, string or boolean")),
        };
        out.insert(k, s);
    }
    Ok(out)
}

pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config_text(&text, path)
}

/// Merged raw values plus a record of every key a command read, with the
/// value it actually used.
#[derive(Debug, Default)]
pub struct Settings {
    values: BTreeMap<String, String>,
    used: RefCell<BTreeMap<&'static str, Value>>,
}

fn parse_int(s: &str) -> Option<u64> {
    let t = s.trim().replace('_', "");
    match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16).ok(),
        None => t.parse().ok(),
    }
}

impl Settings {
    /// `file` values overridden by `flags`.
    pub fn merged(file: BTreeMap<String, String>, flags: BTreeMap<String, String>) -> Result<Self, ConfigError> {
        let mut values = file;
        for (k, v) in flags {
            if lookup(&k).is_none() {
                return Err(ConfigError::UnknownKey(k));
            }
            values.insert(k, v);
        }
        Ok(Settings {
            values,
            used: RefCell::new(BTreeMap::new()),
        })
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<Self, ConfigError> {
        let flags = pairs.into_iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
        Self::merged(BTreeMap::new(), flags)
    }

    fn raw(&self, key: &'static str) -> Option<&str> {
        debug_assert!(lookup(key).is_some(), "unregistered key {key}");
        self.values.get(key).map(String::as_str)
    }

    fn record(&self, key: &'static str, v: Value) {
        self.used.borrow_mut().insert(key, v);
    }

    pub fn f64(&self, key: &'static str, default: f64) -> Result<f64, ConfigError> {
        let v = match self.raw(key) {
            None => default,
            Some(s) => s
                .trim()
                .parse::<f64>()
                .map_err(|_| ConfigError::invalid(key, format!("expected a number, got `{s}`")))?,
        };
        if !v.is_finite() {
            return Err(ConfigError::invalid(key, "must be finite"));
        }
        self.record(key, Value::from(v));
        Ok(v)
    }

    pub fn u64(&self, key: &'static str, default: u64) -> Result<u64, ConfigError> {
        let v = match self.raw(key) {
            None => default,
            Some(s) => parse_int(s).ok_or_else(|| ConfigError::invalid(key, format!("expected a non-negative integer, got `{s}`")))?,
        };
        self.record(key, Value::from(v));
        Ok(v)
    }

    pub fn usize(&self, key: &'static str, default: usize) -> Result<usize, ConfigError> {
        let v = self.u64(key, default as u64)?;
        usize::try_from(v).map_err(|_| ConfigError::invalid(key, "too large"))
    }

    pub fn bool(&self, key: &'static str, default: bool) -> Result<bool, ConfigError> {
        let v = match self.raw(key) {
            None => default,
            Some("true") | Some("1") => true,
            Some("false") | Some("0") => false,
            Some(s) => return Err(ConfigError::invalid(key, format!("expected true or false, got `{s}`"))),
        };
        self.record(key, Value::from(v));
        Ok(v)
    }

    /// A string restricted to `allowed`.
    pub fn choice(&self, key: &'static str, default: &'static str, allowed: &[&'static str]) -> Result<&'static str, ConfigError> {
        let s = self.raw(key).unwrap_or(default);
        let v = allowed
            .iter()
            .copied()
            .find(|a| *a == s)
            .ok_or_else(|| ConfigError::invalid(key, format!("expected one of {}, got `{s}`", allowed.join(", "))))?;
        self.record(key, Value::from(v));
        Ok(v)
    }

    pub fn text(&self, key: &'static str, default: &str) -> String {
        let v = self.raw(key).unwrap_or(default).to_string();
        self.record(key, Value::from(v.clone()));
        v
    }

    /// Keys read so far with their effective values.
    pub fn effective(&self) -> BTreeMap<&'static str, Value> {
        self.used.borrow().clone()
    }

    /// Keys that were supplied but not read by the command.
    pub fn unused(&self) -> Vec<String> {
        let used = self.used.borrow();
        self.values.keys().filter(|k| !used.contains_key(k.as_str())).cloned().collect()
    }
}
