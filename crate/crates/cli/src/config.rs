//! Flat dotted-key configuration: TOML file, preset, then command-line overrides.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use crate::error::CliError;

/// Resolved configuration as dotted keys mapped to raw text values.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    values: BTreeMap<String, String>,
    used: std::cell::RefCell<BTreeSet<String>>,
}

/// Evenly spaced grid or an explicit list.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid(pub Vec<f64>);

impl Config {
    pub fn from_pairs<I, K, V>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (K, V)>,
        K: Into<String>,
        V: Into<String>,
    {
        let mut cfg = Config::default();
        cfg.merge(pairs);
        cfg
    }

    /// Later values win.
    pub fn merge<I, K, V>(&mut self, pairs: I)
    where
        I: IntoIterator<Item = (K, V)>,
        K: Into<String>,
        V: Into<String>,
    {
        for (k, v) in pairs {
            self.values.insert(k.into(), v.into());
        }
    }

    pub fn load_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io { path: path.display().to_string(), source: e })?;
        Self::parse_toml(&text).map_err(|msg| CliError::Config { key: path.display().to_string(), msg })
    }

    pub fn parse_toml(text: &str) -> Result<Self, String> {
        let table: toml::Table = toml::from_str(text).map_err(|e| e.to_string())?;
        let mut flat = BTreeMap::new();
        flatten("", &toml::Value::Table(table), &mut flat)?;
        Ok(Config::from_pairs(flat))
    }

    pub fn entries(&self) -> &BTreeMap<String, String> {
        &self.values
    }

    pub fn contains(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.used.borrow_mut().insert(key.to_string());
        self.values.get(key).map(String::as_str)
    }

    pub fn string_or(&self, key: &str, default: &str) -> String {
        self.raw(key).unwrap_or(default).to_string()
    }

    pub fn f64(&self, key: &str) -> Result<f64, CliError> {
        let raw = self.raw(key).ok_or_else(|| missing(key))?;
        parse_f64(key, raw)
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64, CliError> {
        self.raw(key).map_or(Ok(default), |raw| parse_f64(key, raw))
    }

    pub fn opt_f64(&self, key: &str) -> Result<Option<f64>, CliError> {
        self.raw(key).map(|raw| parse_f64(key, raw)).transpose()
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize, CliError> {
        match self.raw(key) {
            None => Ok(default),
            Some(raw) => raw.trim().parse().map_err(|_| bad(key, format!("expected a nonnegative integer, got `{raw}`"))),
        }
    }

    pub fn bool_or(&self, key: &str, default: bool) -> Result<bool, CliError> {
        match self.raw(key).map(str::trim) {
            None => Ok(default),
            Some("true" | "1" | "yes") => Ok(true),
            Some("false" | "0" | "no") => Ok(false),
            Some(raw) => Err(bad(key, format!("expected true or false, got `{raw}`"))),
        }
    }

    /// Comma-separated numbers.
    pub fn list(&self, key: &str) -> Result<Option<Vec<f64>>, CliError> {
        let Some(raw) = self.raw(key) else { return Ok(None) };
        let items = split_list(raw);
        if items.is_empty() {
            return Err(bad(key, "empty list".into()));
        }
        items.iter().map(|s| parse_f64(key, s)).collect::<Result<Vec<_>, _>>().map(Some)
    }

    /// `<prefix>.values` (may hold `inf`), or `<prefix>.min`, `.max`, `.n` (inclusive, `n >= 1`).
    pub fn grid(&self, prefix: &str) -> Result<Grid, CliError> {
        let values_key = format!("{prefix}.values");
        if let Some(v) = self.list(&values_key)? {
            return Ok(Grid(v));
        }
        let min = self.f64(&format!("{prefix}.min"))?;
        let max = self.f64(&format!("{prefix}.max"))?;
        let n_key = format!("{prefix}.n");
        let n = self.usize_or(&n_key, 0)?;
        if n == 0 {
            return Err(bad(&n_key, "grid needs at least one point".into()));
        }
        if !(min.is_finite() && max.is_finite()) || max < min {
            return Err(bad(&format!("{prefix}.max"), format!("need finite min <= max, got [{min}, {max}]")));
        }
        if n == 1 {
            return Ok(Grid(vec![min]));
        }
        let step = (max - min) / (n - 1) as f64;
        Ok(Grid((0..n).map(|i| if i + 1 == n { max } else { min + step * i as f64 }).collect()))
    }

    /// Keys present in the configuration that no command read.
    pub fn unused(&self) -> Vec<String> {
        let used = self.used.borrow();
        self.values.keys().filter(|k| !used.contains(*k)).cloned().collect()
    }
}

pub fn split_list(raw: &str) -> Vec<&str> {
    raw.trim()
        .trim_start_matches('[')
        .trim_end_matches(']')
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect()
}

fn parse_f64(key: &str, raw: &str) -> Result<f64, CliError> {
    let t = raw.trim();
    match t {
        "inf" | "+inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        _ => t.parse::<f64>().ok().filter(|x| !x.is_nan()).ok_or_else(|| bad(key, format!("expected a number, got `{raw}`"))),
    }
}

fn missing(key: &str) -> CliError {
    CliError::Config { key: key.to_string(), msg: "required key is missing".into() }
}

pub fn bad(key: &str, msg: String) -> CliError {
    CliError::Config { key: key.to_string(), msg }
}

fn flatten(prefix: &str, value: &toml::Value, out: &mut BTreeMap<String, String>) -> Result<(), String> {
    let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match value {
        toml::Value::Table(t) => {
            for (k, v) in t {
                flatten(&join(k), v, out)?;
            }
        }
        toml::Value::Array(items) => {
            let parts: Result<Vec<String>, String> = items.iter().map(scalar).collect();
            out.insert(prefix.to_string(), parts?.join(","));
        }
        other => {
            out.insert(prefix.to_string(), scalar(other)?);
        }
    }
    Ok(())
}

fn scalar(v: &toml::Value) -> Result<String, String> {
    match v {
        toml::Value::String(s) => Ok(s.clone()),
        toml::Value::Integer(i) => Ok(i.to_string()),
        toml::Value::Float(f) => Ok(f.to_string()),
        toml::Value::Boolean(b) => Ok(b.to_string()),
        other => Err(format!("unsupported value `{other}`")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_flatten_to_dotted_keys() {
        let cfg = Config::parse_toml("command = \"spectrum\"\n[trap]\neta = 5\n[sweep.inv_a]\nmin = -5\nmax = 5.0\nn = 3\n").unwrap();
        assert_eq!(cfg.raw("trap.eta"), Some("5"));
        assert_eq!(cfg.grid("sweep.inv_a").unwrap(), Grid(vec![-5.0, 0.0, 5.0]));
        assert_eq!(cfg.raw("command"), Some("spectrum"));
        assert!(cfg.unused().is_empty());
    }

    #[test]
    fn arrays_become_lists() {
        let cfg = Config::parse_toml("trap.eta = [1.1, 1]\n").unwrap();
        assert_eq!(cfg.list("trap.eta").unwrap(), Some(vec![1.1, 1.0]));
    }

    #[test]
    fn bad_values_name_the_key() {
        let cfg = Config::from_pairs([("trap.eta", "five"), ("grid.n", "-1")]);
        let err = cfg.f64("trap.eta").unwrap_err().to_string();
        assert!(err.contains("trap.eta"), "{err}");
        assert!(cfg.usize_or("grid.n", 1).unwrap_err().to_string().contains("grid.n"));
        assert!(cfg.f64("missing.key").unwrap_err().to_string().contains("missing.key"));
    }

    #[test]
    fn grid_endpoints_are_exact() {
        let cfg = Config::from_pairs([("g.min", "-5"), ("g.max", "5"), ("g.n", "200")]);
        let g = cfg.grid("g").unwrap().0;
        assert_eq!(g.len(), 200);
        assert_eq!((g[0], g[199]), (-5.0, 5.0));
    }
}
