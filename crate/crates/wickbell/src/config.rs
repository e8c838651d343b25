//! `key = value` experiment configuration.
//!
//! A file holds one assignment per line; `#` starts a comment and blank
//! lines are ignored. An optional `experiment = <name>` line names the
//! experiment. Command-line overrides use the same `key=value` syntax and
//! win over the file, which wins over the built-in defaults. Every key is
//! checked against the experiment's schema before anything runs.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::catalog::Experiment;

/// Where a value came from, for diagnostics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Origin {
    Default,
    File { path: PathBuf, line: usize },
    Override { index: usize },
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Default => write!(f, "default"),
            Origin::File { path, line } => write!(f, "{}:{}", path.display(), line),
            Origin::Override { index } => write!(f, "override #{}", index + 1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{origin}: field `{field}`: {message}")]
pub struct ConfigError {
    pub origin: Origin,
    pub field: String,
    pub message: String,
}

impl ConfigError {
    fn new(origin: Origin, field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            origin,
            field: field.into(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Entry {
    value: String,
    origin: Origin,
}

/// Fully resolved configuration: every schema key has a value.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    experiment: Experiment,
    entries: BTreeMap<String, Entry>,
}

fn split_assignment(text: &str) -> Option<(&str, &str)> {
    let (k, v) = text.split_once('=')?;
    let k = k.trim();
    (!k.is_empty()).then_some((k, v.trim()))
}

/// Parses the text of a config file into ordered `(key, value, line)`.
pub fn parse_lines(text: &str, path: &Path) -> Result<Vec<(String, String, Origin)>, ConfigError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let origin = Origin::File {
            path: path.to_path_buf(),
            line: i + 1,
        };
        match split_assignment(line) {
            Some((k, v)) => {
                if out.iter().any(|(seen, _, _): &(String, String, Origin)| seen == k) {
                    return Err(ConfigError::new(origin, k, "duplicate key"));
                }
                out.push((k.to_string(), v.to_string(), origin));
            }
            None => return Err(ConfigError::new(origin, line, "expected `key = value`")),
        }
    }
    Ok(out)
}

impl Config {
    /// Builds a configuration from an optional file body and overrides.
    ///
    /// `experiment` from the command line takes precedence over an
    /// `experiment =` line in the file; the two must agree if both are set.
    pub fn resolve(
        experiment: Option<Experiment>,
        file: Option<(&Path, &str)>,
        overrides: &[String],
    ) -> Result<Self, ConfigError> {
        let mut assigned: Vec<(String, String, Origin)> = match file {
            Some((path, text)) => parse_lines(text, path)?,
            None => Vec::new(),
        };
        for (index, o) in overrides.iter().enumerate() {
            let origin = Origin::Override { index };
            let (k, v) = split_assignment(o).ok_or_else(|| ConfigError::new(origin.clone(), o, "expected `key=value`"))?;
            assigned.push((k.to_string(), v.to_string(), origin));
        }

        let mut named = None;
        assigned.retain(|(k, v, origin)| {
            if k == "experiment" {
                named = Some((v.clone(), origin.clone()));
                false
            } else {
                true
            }
        });
        let from_text = named
            .map(|(v, origin)| {
                Experiment::from_str(&v)
                    .map(|e| (e, origin.clone()))
                    .map_err(|m| ConfigError::new(origin, "experiment", m))
            })
            .transpose()?;
        let experiment = match (experiment, from_text) {
            (Some(a), Some((b, origin))) if a != b => {
                return Err(ConfigError::new(
                    origin,
                    "experiment",
                    format!("config names `{}` but `{}` was requested", b.name(), a.name()),
                ))
            }
            (Some(a), _) => a,
            (None, Some((b, _))) => b,
            (None, None) => {
                return Err(ConfigError::new(Origin::Default, "experiment", "no experiment selected"));
            }
        };

        let schema = experiment.schema();
        let mut entries: BTreeMap<String, Entry> = schema
            .iter()
            .map(|(k, v)| {
                (
                    k.to_string(),
                    Entry {
                        value: v.to_string(),
                        origin: Origin::Default,
                    },
                )
            })
            .collect();
        for (k, v, origin) in assigned {
            match entries.get_mut(&k) {
                Some(e) => *e = Entry { value: v, origin },
                None => {
                    let known: Vec<&str> = schema.iter().map(|(k, _)| *k).collect();
                    return Err(ConfigError::new(
                        origin,
                        k,
                        format!("unknown key for `{}` (known: {})", experiment.name(), known.join(", ")),
                    ));
                }
            }
        }
        Ok(Self { experiment, entries })
    }

    pub fn experiment(&self) -> Experiment {
        self.experiment
    }

    /// Resolved `(key, value)` pairs in key order.
    pub fn echo(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(k, e)| (k.as_str(), e.value.as_str()))
    }

    fn entry(&self, key: &str) -> &Entry {
        self.entries
            .get(key)
            .unwrap_or_else(|| panic!("`{key}` is not in the `{}` schema", self.experiment.name()))
    }

    fn error(&self, key: &str, message: impl Into<String>) -> ConfigError {
        ConfigError::new(self.entry(key).origin.clone(), key, message)
    }

    pub fn raw(&self, key: &str) -> &str {
        &self.entry(key).value
    }

    fn parse<T: FromStr>(&self, key: &str, what: &str) -> Result<T, ConfigError> {
        self.raw(key)
            .parse()
            .map_err(|_| self.error(key, format!("`{}` is not {what}", self.raw(key))))
    }

    pub fn f64(&self, key: &str) -> Result<f64, ConfigError> {
        let v: f64 = self.parse(key, "a number")?;
        if !v.is_finite() {
            return Err(self.error(key, "must be finite"));
        }
        Ok(v)
    }

    pub fn positive(&self, key: &str) -> Result<f64, ConfigError> {
        let v = self.f64(key)?;
        if v <= 0.0 {
            return Err(self.error(key, format!("must be positive, got {v}")));
        }
        Ok(v)
    }

    pub fn usize_at_least(&self, key: &str, min: usize) -> Result<usize, ConfigError> {
        let v: usize = self.parse(key, "a non-negative integer")?;
        if v < min {
            return Err(self.error(key, format!("must be at least {min}, got {v}")));
        }
        Ok(v)
    }

    pub fn u64(&self, key: &str) -> Result<u64, ConfigError> {
        self.parse(key, "a non-negative integer")
    }

    pub fn usize_list(&self, key: &str, min: usize) -> Result<Vec<usize>, ConfigError> {
        let items: Result<Vec<usize>, _> = self.raw(key).split(',').map(|s| s.trim().parse::<usize>()).collect();
        let items = items.map_err(|_| self.error(key, "expected a comma-separated list of integers"))?;
        if items.is_empty() || items.iter().any(|&v| v < min) {
            return Err(self.error(key, format!("every entry must be at least {min}")));
        }
        Ok(items)
    }

    pub fn f64_list(&self, key: &str) -> Result<Vec<f64>, ConfigError> {
        let items: Result<Vec<f64>, _> = self.raw(key).split(',').map(|s| s.trim().parse::<f64>()).collect();
        match items {
            Ok(v) if !v.is_empty() && v.iter().all(|x| x.is_finite()) => Ok(v),
            _ => Err(self.error(key, "expected a comma-separated list of finite numbers")),
        }
    }

    pub fn choice<'a>(&self, key: &str, options: &[&'a str]) -> Result<&'a str, ConfigError> {
        let v = self.raw(key);
        options
            .iter()
            .find(|o| **o == v)
            .copied()
            .ok_or_else(|| self.error(key, format!("`{v}` is not one of {}", options.join(", "))))
    }

    /// Optional path; empty means unset.
    pub fn path(&self, key: &str) -> Option<PathBuf> {
        let v = self.raw(key);
        (!v.is_empty()).then(|| PathBuf::from(v))
    }

    /// Raises a validation error attributed to `key`.
    pub fn reject(&self, key: &str, message: impl Into<String>) -> ConfigError {
        self.error(key, message)
    }
}
