//! `key = value` run configuration, merged from an optional file and
//! command-line flags (flags win). Keys are checked against the list each
//! command accepts.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::CliError;

/// Parse `key = value` lines. `#` starts a comment; blank lines are skipped.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::usage(format!(
                "config line {}: expected key = value, got {raw:?}",
                n + 1
            ))
        })?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || value.is_empty() {
            return Err(CliError::usage(format!(
                "config line {}: empty key or value",
                n + 1
            )));
        }
        if out.insert(key.to_string(), value.to_string()).is_some() {
            return Err(CliError::usage(format!(
                "config line {}: duplicate key {key}",
                n + 1
            )));
        }
    }
    Ok(out)
}

pub fn read_config(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_config(&text)
}

/// Validated settings for one command.
#[derive(Debug, Clone, Default)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

impl Settings {
    /// Merge file values with flag values and reject keys outside `allowed`.
    pub fn merge(
        file: BTreeMap<String, String>,
        flags: Vec<(&'static str, String)>,
        allowed: &[&str],
    ) -> Result<Self, CliError> {
        let mut values = file;
        for (k, v) in flags {
            values.insert(k.to_string(), v);
        }
        if let Some(bad) = values.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(CliError::usage(format!(
                "unknown key {bad:?}; accepted keys: {}",
                allowed.join(", ")
            )));
        }
        Ok(Settings { values })
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn f64(&self, key: &str, default: f64) -> Result<f64, CliError> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => parse_f64(key, v),
        }
    }

    pub fn opt_f64(&self, key: &str) -> Result<Option<f64>, CliError> {
        self.raw(key).map(|v| parse_f64(key, v)).transpose()
    }

    pub fn usize(&self, key: &str, default: usize) -> Result<usize, CliError> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| {
                CliError::usage(format!("{key} = {v:?} is not a non-negative integer"))
            }),
        }
    }

    pub fn u64(&self, key: &str, default: u64) -> Result<u64, CliError> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| {
                CliError::usage(format!("{key} = {v:?} is not a non-negative integer"))
            }),
        }
    }

    pub fn bool(&self, key: &str, default: bool) -> Result<bool, CliError> {
        match self.raw(key) {
            None => Ok(default),
            Some("true" | "1" | "yes") => Ok(true),
            Some("false" | "0" | "no") => Ok(false),
            Some(v) => Err(CliError::usage(format!("{key} = {v:?} is not a boolean"))),
        }
    }

    pub fn string<'a>(&'a self, key: &str, default: &'a str) -> &'a str {
        self.raw(key).unwrap_or(default)
    }

    /// Comma-separated list of numbers.
    pub fn f64_list(&self, key: &str, default: &[f64]) -> Result<Vec<f64>, CliError> {
        match self.raw(key) {
            None => Ok(default.to_vec()),
            Some(v) => v.split(',').map(|s| parse_f64(key, s.trim())).collect(),
        }
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64, CliError> {
    v.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| CliError::usage(format!("{key} = {v:?} is not a finite number")))
}
