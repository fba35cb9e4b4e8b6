//! Flat, namespaced run configuration.
//!
//! A config file is TOML; nested tables and dotted keys are both flattened
//! to `section.key` names, so `[piston]\nr_grid = [..]` and
//! `piston.r_grid = [..]` are equivalent. Command-line flags are applied on
//! top of the file.

use std::collections::BTreeMap;
use std::path::Path;

use toml::Value;

use crate::error::CliError;

pub const DEFAULT_SEED: u64 = 1;

/// Every key the harness understands, with a one-line description.
pub const KNOWN_KEYS: &[(&str, &str)] = &[
    ("seed", "base RNG seed"),
    ("physics.kb", "Boltzmann constant (default 1)"),
    ("physics.temperature", "bath temperature (default 1)"),
    ("jarzynski.trials", "number of random drives"),
    (
        "jarzynski.dim",
        "largest Hilbert-space dimension; drives use 2..=dim",
    ),
    ("piston.r_grid", "fractional pressure drops"),
    ("piston.k_grid", "stage counts"),
    ("piston.n_particles", "gas particle number"),
    ("piston.device_precision", "\"per-step\" or \"end-to-end\""),
    ("phase.phi", "true phase(s) in [0, pi]"),
    ("phase.delta_phi", "encoder pitch(es)"),
    ("phase.shots", "shots per ensemble, N"),
    ("phase.ensembles", "ensembles per row, M"),
    ("phase.mode", "\"quantize\" or \"jitter\""),
    ("phase.origin", "quantiser grid origin"),
    ("klfisher.phi", "base phase(s)"),
    ("klfisher.delta_grid", "expansion steps"),
    (
        "report.row",
        "0-based CSV row to summarise (default: tightest row)",
    ),
];

#[derive(Debug, Clone, Default)]
pub struct Config {
    values: BTreeMap<String, Value>,
}

fn flatten(prefix: &str, table: &toml::Table, out: &mut BTreeMap<String, Value>) {
    for (key, value) in table {
        let name = if prefix.is_empty() {
            key.clone()
        } else {
            format!("{prefix}.{key}")
        };
        match value {
            Value::Table(inner) => flatten(&name, inner, out),
            other => {
                out.insert(name, other.clone());
            }
        }
    }
}

impl Config {
    pub fn from_toml_str(text: &str) -> Result<Self, CliError> {
        let table: toml::Table =
            toml::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {e}")))?;
        let mut values = BTreeMap::new();
        flatten("", &table, &mut values);
        let cfg = Self { values };
        cfg.reject_unknown()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    fn reject_unknown(&self) -> Result<(), CliError> {
        for key in self.values.keys() {
            if !KNOWN_KEYS.iter().any(|(k, _)| k == key) {
                return Err(CliError::Config(format!("unknown config key `{key}`")));
            }
        }
        Ok(())
    }

    /// Applies a `key=value` override; the value is parsed as a TOML value
    /// and falls back to a bare string.
    pub fn set_override(&mut self, assignment: &str) -> Result<(), CliError> {
        let (key, raw) = assignment
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("expected KEY=VALUE, got `{assignment}`")))?;
        let key = key.trim();
        let raw = raw.trim();
        let value = toml::from_str::<toml::Table>(&format!("v = {raw}"))
            .ok()
            .and_then(|mut t| t.remove("v"))
            .unwrap_or_else(|| Value::String(raw.to_owned()));
        self.values.insert(key.to_owned(), value);
        self.reject_unknown()
    }

    pub fn set_seed(&mut self, seed: u64) {
        self.values
            .insert("seed".into(), Value::Integer(seed as i64));
    }

    pub fn seed(&self) -> Result<u64, CliError> {
        match self.values.get("seed") {
            None => Ok(DEFAULT_SEED),
            Some(Value::Integer(i)) if *i >= 0 => Ok(*i as u64),
            Some(other) => Err(type_error("seed", "a non-negative integer", other)),
        }
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64, CliError> {
        match self.values.get(key) {
            None => Ok(default),
            Some(v) => as_f64(key, v),
        }
    }

    pub fn u64_or(&self, key: &str, default: u64) -> Result<u64, CliError> {
        match self.values.get(key) {
            None => Ok(default),
            Some(v) => as_u64(key, v),
        }
    }

    pub fn str_or<'a>(&'a self, key: &str, default: &'a str) -> Result<&'a str, CliError> {
        match self.values.get(key) {
            None => Ok(default),
            Some(Value::String(s)) => Ok(s),
            Some(other) => Err(type_error(key, "a string", other)),
        }
    }

    pub fn optional_u64(&self, key: &str) -> Result<Option<u64>, CliError> {
        self.values.get(key).map(|v| as_u64(key, v)).transpose()
    }

    /// A scalar or an array of numbers.
    pub fn f64_list_or(&self, key: &str, default: &[f64]) -> Result<Vec<f64>, CliError> {
        match self.values.get(key) {
            None => Ok(default.to_vec()),
            Some(Value::Array(items)) => items.iter().map(|v| as_f64(key, v)).collect(),
            Some(v) => Ok(vec![as_f64(key, v)?]),
        }
    }

    pub fn u64_list_or(&self, key: &str, default: &[u64]) -> Result<Vec<u64>, CliError> {
        match self.values.get(key) {
            None => Ok(default.to_vec()),
            Some(Value::Array(items)) => items.iter().map(|v| as_u64(key, v)).collect(),
            Some(v) => Ok(vec![as_u64(key, v)?]),
        }
    }
}

fn type_error(key: &str, expected: &str, got: &Value) -> CliError {
    CliError::Config(format!("`{key}` must be {expected}, got {got}"))
}

fn as_f64(key: &str, v: &Value) -> Result<f64, CliError> {
    let x = match v {
        Value::Float(x) => *x,
        Value::Integer(i) => *i as f64,
        other => return Err(type_error(key, "a number", other)),
    };
    if x.is_nan() {
        return Err(CliError::Config(format!("`{key}` is NaN")));
    }
    Ok(x)
}

fn as_u64(key: &str, v: &Value) -> Result<u64, CliError> {
    match v {
        Value::Integer(i) if *i >= 0 => Ok(*i as u64),
        other => Err(type_error(key, "a non-negative integer", other)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tables_and_dotted_keys_agree() {
        let a = Config::from_toml_str("[piston]\nr_grid = [0.1, 0.2]\n").unwrap();
        let b = Config::from_toml_str("piston.r_grid = [0.1, 0.2]\n").unwrap();
        assert_eq!(
            a.f64_list_or("piston.r_grid", &[]).unwrap(),
            b.f64_list_or("piston.r_grid", &[]).unwrap()
        );
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(Config::from_toml_str("piston.rgrid = [0.1]").is_err());
    }

    #[test]
    fn overrides_parse_toml_values() {
        let mut c = Config::default();
        c.set_override("phase.shots=250").unwrap();
        c.set_override("phase.mode=jitter").unwrap();
        c.set_override("piston.r_grid=[0.5, 0.25]").unwrap();
        assert_eq!(c.u64_or("phase.shots", 0).unwrap(), 250);
        assert_eq!(c.str_or("phase.mode", "").unwrap(), "jitter");
        assert_eq!(
            c.f64_list_or("piston.r_grid", &[]).unwrap(),
            vec![0.5, 0.25]
        );
        assert!(c.set_override("nonsense").is_err());
    }

    #[test]
    fn scalars_promote_to_lists() {
        let c = Config::from_toml_str("phase.phi = 1.0").unwrap();
        assert_eq!(c.f64_list_or("phase.phi", &[2.0]).unwrap(), vec![1.0]);
    }
}
