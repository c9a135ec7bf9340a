//! Flat `key = value` configuration with dotted sections.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::RunError;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    entries: BTreeMap<String, String>,
}

/// Split one `--set key=value` argument.
pub fn parse_set(arg: &str) -> Result<(String, String), RunError> {
    let (k, v) = arg
        .split_once('=')
        .ok_or_else(|| RunError::Config(format!("--set '{arg}' is not key=value")))?;
    let (k, v) = (k.trim(), v.trim());
    if !swigner::io::valid_key(k) {
        return Err(RunError::Config(format!("--set: bad key '{k}'")));
    }
    if v.is_empty() {
        return Err(RunError::Config(format!("--set {k}: empty value")));
    }
    Ok((k.to_string(), v.to_string()))
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, RunError> {
        let entries = swigner::io::parse_kv(text).map_err(|e| RunError::Config(e.to_string()))?;
        Ok(Self { entries })
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// Override an existing key. Unknown keys are errors so typos do not pass silently.
    pub fn apply_set(&mut self, key: &str, value: &str) -> Result<(), RunError> {
        match self.entries.get_mut(key) {
            Some(v) => {
                *v = value.to_string();
                Ok(())
            }
            None => Err(RunError::Config(format!("unknown key '{key}'"))),
        }
    }

    pub fn merge(&mut self, other: &Config) -> Result<(), RunError> {
        for (k, v) in &other.entries {
            self.apply_set(k, v)?;
        }
        Ok(())
    }

    pub fn raw(&self, key: &str) -> Result<&str, RunError> {
        self.entries
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| RunError::Config(format!("missing key '{key}'")))
    }

    pub fn f64(&self, key: &str) -> Result<f64, RunError> {
        let s = self.raw(key)?;
        match s.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(RunError::Config(format!("{key} = '{s}' is not a finite number"))),
        }
    }

    pub fn usize(&self, key: &str) -> Result<usize, RunError> {
        let s = self.raw(key)?;
        s.parse().map_err(|_| RunError::Config(format!("{key} = '{s}' is not a non-negative integer")))
    }

    pub fn bool(&self, key: &str) -> Result<bool, RunError> {
        match self.raw(key)? {
            "true" => Ok(true),
            "false" => Ok(false),
            s => Err(RunError::Config(format!("{key} = '{s}' is not true/false"))),
        }
    }

    /// Comma separated numbers.
    pub fn list(&self, key: &str) -> Result<Vec<f64>, RunError> {
        let s = self.raw(key)?;
        s.split(',')
            .map(|t| match t.trim().parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(RunError::Config(format!("{key}: '{}' is not a number", t.trim()))),
            })
            .collect()
    }

    /// Text form grouped by section, parseable by [`Config::parse`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let (top, nested): (Vec<_>, Vec<_>) = self.entries.iter().partition(|(k, _)| !k.contains('.'));
        for (k, v) in top {
            let _ = writeln!(out, "{k} = {v}");
        }
        let mut section = "";
        for (k, v) in nested {
            let (sec, leaf) = k.rsplit_once('.').unwrap();
            if sec != section {
                let _ = writeln!(out, "\n[{sec}]");
                section = sec;
            }
            let _ = writeln!(out, "{leaf} = {v}");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_parsing() {
        assert_eq!(parse_set("grid.n = 512").unwrap(), ("grid.n".into(), "512".into()));
        assert!(parse_set("novalue").is_err());
        assert!(parse_set("=3").is_err());
        assert!(parse_set("a=").is_err());
    }

    #[test]
    fn overrides_need_known_keys() {
        let mut c = Config::parse("[grid]\nn = 256\n").unwrap();
        c.apply_set("grid.n", "128").unwrap();
        assert_eq!(c.usize("grid.n").unwrap(), 128);
        assert!(c.apply_set("grid.m", "1").is_err());
        assert!(c.f64("grid.n").is_ok());
        c.apply_set("grid.n", "abc").unwrap();
        assert!(c.usize("grid.n").is_err());
    }

    #[test]
    fn text_round_trip() {
        let c = Config::parse("seed_note = x\n[a]\nb = 1\n[a.c]\nd = 2, 3\n[e]\nf = true\n").unwrap();
        assert_eq!(Config::parse(&c.to_text()).unwrap(), c);
        assert_eq!(c.list("a.c.d").unwrap(), vec![2.0, 3.0]);
    }
}
