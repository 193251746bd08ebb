//! Analysis configuration, read from a TOML file.
//!
//! ```toml
//! edit_threshold = 0.5
//! rename_match_floor = 0.3
//! dedup_window_secs = 10
//! retention_horizon = 30
//! cohort = "returning"
//! directive_keys = ["block", "tags", "register", "loop", "become", "when"]
//! similar_modules = [["yum", "dnf", "package"], ["copy", "template"]]
//! ```

use std::collections::BTreeSet;
use std::path::Path;

use serde::Serialize;
use thiserror::Error;
use toml::{Table, Value};

use crate::task::{TaskParser, DEFAULT_DIRECTIVES};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("bad config value at `{key}`: {reason}")]
    BadConfig { key: String, reason: String },
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn bad(key: impl Into<String>, reason: impl Into<String>) -> ConfigError {
    ConfigError::BadConfig {
        key: key.into(),
        reason: reason.into(),
    }
}

/// Which users' suggestions feed the acceptance and edit analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Cohort {
    /// Users with at least two active days.
    Returning,
    All,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Config {
    pub directive_keys: Vec<String>,
    /// Groups of interchangeable module short names.
    pub similar_modules: Vec<BTreeSet<String>>,
    pub dedup_window_secs: u64,
    /// Edit fraction at or above which an accepted suggestion is a major edit.
    pub edit_threshold: f64,
    /// Minimum similarity for matching a renamed task in the committed document.
    pub rename_match_floor: f64,
    pub retention_horizon: u32,
    pub cohort: Cohort,
}

pub const DEFAULT_SIMILAR_MODULES: &[&[&str]] = &[
    &["yum", "dnf", "apt", "package", "zypper"],
    &["service", "systemd", "systemd_service", "sysvinit"],
    &["copy", "template"],
    &["lineinfile", "replace", "blockinfile"],
    &["get_url", "uri"],
    &["include_tasks", "import_tasks"],
];

impl Default for Config {
    fn default() -> Self {
        Self {
            directive_keys: DEFAULT_DIRECTIVES.iter().map(|s| s.to_string()).collect(),
            similar_modules: DEFAULT_SIMILAR_MODULES
                .iter()
                .map(|class| class.iter().map(|s| s.to_string()).collect())
                .collect(),
            dedup_window_secs: 10,
            edit_threshold: 0.5,
            rename_match_floor: 0.3,
            retention_horizon: 30,
            cohort: Cohort::Returning,
        }
    }
}

impl Config {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let table: Table = text.parse().map_err(|e: toml::de::Error| {
            bad(
                e.span().map_or("<root>".to_owned(), |s| format!("<offset {}>", s.start)),
                e.message(),
            )
        })?;
        let mut cfg = Config::default();
        for (key, value) in &table {
            match key.as_str() {
                "directive_keys" => cfg.directive_keys = string_list(key, value)?,
                "similar_modules" => {
                    let classes = value
                        .as_array()
                        .ok_or_else(|| bad(key, "expected a list of lists"))?;
                    cfg.similar_modules = classes
                        .iter()
                        .enumerate()
                        .map(|(i, class)| {
                            string_list(&format!("{key}[{i}]"), class)
                                .map(|names| names.into_iter().collect())
                        })
                        .collect::<Result<_, _>>()?;
                }
                "dedup_window_secs" => cfg.dedup_window_secs = integer(key, value)?,
                "edit_threshold" => cfg.edit_threshold = float(key, value)?,
                "rename_match_floor" => cfg.rename_match_floor = float(key, value)?,
                "retention_horizon" => {
                    cfg.retention_horizon = u32::try_from(integer(key, value)?)
                        .map_err(|_| bad(key, "too large"))?
                }
                "cohort" => {
                    cfg.cohort = match value.as_str() {
                        Some("returning") => Cohort::Returning,
                        Some("all") => Cohort::All,
                        _ => return Err(bad(key, "expected \"returning\" or \"all\"")),
                    }
                }
                other => return Err(bad(other, "unknown key")),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.edit_threshold > 0.0 && self.edit_threshold < 1.0) {
            return Err(bad("edit_threshold", "must lie strictly between 0 and 1"));
        }
        if !(0.0..=1.0).contains(&self.rename_match_floor) {
            return Err(bad("rename_match_floor", "must lie in [0, 1]"));
        }
        if self.retention_horizon < 1 {
            return Err(bad("retention_horizon", "must be at least 1"));
        }
        Ok(())
    }

    pub fn task_parser(&self) -> TaskParser {
        TaskParser::new(self.directive_keys.iter().cloned())
    }

    /// True when both short names fall in one configured class.
    pub fn are_similar_modules(&self, a: &str, b: &str) -> bool {
        self.similar_modules
            .iter()
            .any(|class| class.contains(a) && class.contains(b))
    }
}

fn string_list(key: &str, value: &Value) -> Result<Vec<String>, ConfigError> {
    value
        .as_array()
        .ok_or_else(|| bad(key, "expected a list of strings"))?
        .iter()
        .enumerate()
        .map(|(i, v)| {
            v.as_str()
                .map(str::to_owned)
                .ok_or_else(|| bad(format!("{key}[{i}]"), "expected a string"))
        })
        .collect()
}

fn integer(key: &str, value: &Value) -> Result<u64, ConfigError> {
    value
        .as_integer()
        .and_then(|n| u64::try_from(n).ok())
        .ok_or_else(|| bad(key, "expected a non-negative integer"))
}

fn float(key: &str, value: &Value) -> Result<f64, ConfigError> {
    match value {
        Value::Float(f) => Ok(*f),
        Value::Integer(i) => Ok(*i as f64),
        _ => Err(bad(key, "expected a number")),
    }
}

/// Loads `path`, or the defaults when no path is given.
pub fn load_config(path: Option<&Path>) -> Result<Config, ConfigError> {
    let Some(path) = path else {
        return Ok(Config::default());
    };
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Config::from_toml_str(&text)
}
