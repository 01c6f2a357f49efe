//! Flat `key = value` experiment configuration.
//!
//! The file format is UTF-8 text, one `key = value` pair per line, `#` starts
//! a comment. Unknown keys are rejected so typos fail fast. Command-line
//! flags (`--seed`, `--out`, `--replicates`) override file values.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};

const KNOWN_KEYS: &[&str] = &[
    "seed",
    "replicates",
    "out",
    "r",
    "gamma",
    "m",
    "vote_budget",
    "family",
    "space",
    "norm",
    "dim",
    "gammas",
    "m_values",
    "test_size",
    "dist",
    "ball_center",
    "ball_width",
    "zeta_d_values",
    "gamma_values",
    "epsilon",
    "delta",
    "vc",
    "beta",
    "approx_size",
    "net_size",
    "pipeline_retries",
    "weak_retries",
    "data",
    "data_out",
    "corpus_size",
    "implication_instances",
    "implication_finite_instances",
];

/// Parsed configuration with typed accessors and defaults.
#[derive(Debug, Clone, Default)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn empty() -> Self {
        Config::default()
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(i) => &raw[..i],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected `key = value`, got `{raw}`", lineno + 1))?;
            let key = key.trim().to_string();
            if !KNOWN_KEYS.contains(&key.as_str()) {
                bail!("line {}: unknown config key `{key}`", lineno + 1);
            }
            values.insert(key, value.trim().to_string());
        }
        Ok(Config { values })
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::from_text(&text)
    }

    pub fn set(&mut self, key: &str, value: String) {
        self.values.insert(key.to_string(), value);
    }

    pub fn get_str(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn str_or(&self, key: &str, default: &str) -> String {
        self.get_str(key).unwrap_or(default).to_string()
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        match self.get_str(key) {
            None => Ok(default),
            Some(v) => v.parse().with_context(|| format!("config key `{key}`: bad number `{v}`")),
        }
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        match self.get_str(key) {
            None => Ok(default),
            Some(v) => v.parse().with_context(|| format!("config key `{key}`: bad integer `{v}`")),
        }
    }

    pub fn u64_or(&self, key: &str, default: u64) -> Result<u64> {
        match self.get_str(key) {
            None => Ok(default),
            Some(v) => v.parse().with_context(|| format!("config key `{key}`: bad integer `{v}`")),
        }
    }

    pub fn f64_list_or(&self, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        match self.get_str(key) {
            None => Ok(default.to_vec()),
            Some(v) => v
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse()
                        .with_context(|| format!("config key `{key}`: bad number `{t}`"))
                })
                .collect(),
        }
    }

    pub fn usize_list_or(&self, key: &str, default: &[usize]) -> Result<Vec<usize>> {
        match self.get_str(key) {
            None => Ok(default.to_vec()),
            Some(v) => v
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse()
                        .with_context(|| format!("config key `{key}`: bad integer `{t}`"))
                })
                .collect(),
        }
    }

    pub fn path(&self, key: &str) -> Option<PathBuf> {
        self.get_str(key).map(PathBuf::from)
    }
}
