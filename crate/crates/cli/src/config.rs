//! Sectioned `key = value` run configuration.
//!
//! ```text
//! # comment
//! [density]
//! kind = translator
//!
//! [problem]
//! mode = vertical
//! n = 1
//! domain = -1 1
//! nodes = 257
//! lambda = 0
//! boundary = fixture:grim_reaper
//! ```

use std::collections::BTreeMap;

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Float,
    Int,
    Text,
    Floats,
    Ints,
    Texts,
}

const SCHEMA: &[(&str, &[(&str, Kind)])] = &[
    ("density", &[("dependence", Kind::Text), ("kind", Kind::Text), ("alpha", Kind::Float), ("p", Kind::Float)]),
    (
        "problem",
        &[
            ("fixture", Kind::Text),
            ("mode", Kind::Text),
            ("n", Kind::Int),
            ("domain", Kind::Floats),
            ("theta", Kind::Floats),
            ("phi", Kind::Floats),
            ("nodes", Kind::Ints),
            ("lambda", Kind::Float),
            ("boundary", Kind::Text),
            ("apex", Kind::Float),
            ("radius", Kind::Float),
            ("steps", Kind::Int),
        ],
    ),
    (
        "solver",
        &[("tol", Kind::Float), ("max_iter", Kind::Int), ("backtrack", Kind::Float), ("armijo", Kind::Float), ("fd_step", Kind::Float)],
    ),
    ("spectrum", &[("tol", Kind::Float), ("residual_tol", Kind::Float), ("max_iter", Kind::Int)]),
    (
        "calibration",
        &[("base", Kind::Text), ("steps", Kind::Int), ("trials", Kind::Int), ("samples", Kind::Int), ("seed", Kind::Int)],
    ),
    ("output", &[("directory", Kind::Text), ("formats", Kind::Texts)]),
    ("sweep", &[("parameter", Kind::Text), ("range", Kind::Text)]),
];

fn kind_of(section: &str, key: &str) -> Option<Kind> {
    SCHEMA.iter().find(|(s, _)| *s == section)?.1.iter().find(|(k, _)| *k == key).map(|(_, t)| *t)
}

#[derive(Clone, Debug)]
struct Entry {
    value: String,
    line: usize,
}

/// A parsed and schema-checked configuration.
#[derive(Clone, Debug, Default)]
pub struct Config {
    entries: BTreeMap<(String, String), Entry>,
}

fn parse_float(s: &str) -> Option<f64> {
    s.parse::<f64>().ok().filter(|v| v.is_finite())
}

fn check_value(kind: Kind, value: &str) -> Result<(), String> {
    let items: Vec<&str> = value.split(|c: char| c.is_whitespace() || c == ',').filter(|s| !s.is_empty()).collect();
    let ok = match kind {
        Kind::Float => parse_float(value).is_some(),
        Kind::Int => value.parse::<u64>().is_ok(),
        Kind::Text => !value.is_empty(),
        Kind::Floats => !items.is_empty() && items.iter().all(|s| parse_float(s).is_some()),
        Kind::Ints => !items.is_empty() && items.iter().all(|s| s.parse::<u64>().is_ok()),
        Kind::Texts => true,
    };
    if ok {
        Ok(())
    } else {
        let what = match kind {
            Kind::Float => "a finite number",
            Kind::Int => "a nonnegative integer",
            Kind::Text => "a nonempty value",
            Kind::Floats => "a list of finite numbers",
            Kind::Ints => "a list of nonnegative integers",
            Kind::Texts => "a list",
        };
        Err(format!("expected {what}, got {value:?}"))
    }
}

impl Config {
    pub fn parse(text: &str) -> CliResult<Config> {
        let mut cfg = Config::default();
        let mut section: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(rest) = content.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| CliError::config(line, "unterminated section header"))?
                    .trim();
                if !SCHEMA.iter().any(|(s, _)| *s == name) {
                    return Err(CliError::config(line, format!("unknown section [{name}]")));
                }
                section = Some(name.to_string());
                continue;
            }
            let (key, value) =
                content.split_once('=').ok_or_else(|| CliError::config(line, "expected `key = value`"))?;
            let sec = section.clone().ok_or_else(|| CliError::config(line, "key outside of any section"))?;
            cfg.insert(&sec, key.trim(), value.trim(), line)?;
        }
        Ok(cfg)
    }

    fn insert(&mut self, section: &str, key: &str, value: &str, line: usize) -> CliResult<()> {
        let kind =
            kind_of(section, key).ok_or_else(|| CliError::config(line, format!("unknown key `{key}` in [{section}]")))?;
        check_value(kind, value).map_err(|m| CliError::config(line, format!("{section}.{key}: {m}")))?;
        let slot = (section.to_string(), key.to_string());
        if line > 0 && self.entries.get(&slot).is_some_and(|e| e.line > 0) {
            return Err(CliError::config(line, format!("duplicate key `{key}` in [{section}]")));
        }
        self.entries.insert(slot, Entry { value: value.to_string(), line });
        Ok(())
    }

    /// Applies a `section.key=value` override; overrides replace file values.
    pub fn set(&mut self, assignment: &str) -> CliResult<()> {
        let (path, value) = assignment
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("override {assignment:?} is not `section.key=value`")))?;
        let (section, key) = path
            .trim()
            .split_once('.')
            .ok_or_else(|| CliError::Usage(format!("override {assignment:?} is not `section.key=value`")))?;
        self.entries.remove(&(section.to_string(), key.to_string()));
        self.insert(section, key, value.trim(), 0).map_err(|e| CliError::Usage(format!("override: {e}")))
    }

    pub fn has(&self, section: &str, key: &str) -> bool {
        self.entries.contains_key(&(section.to_string(), key.to_string()))
    }

    pub fn has_section(&self, section: &str) -> bool {
        self.entries.keys().any(|(s, _)| s == section)
    }

    fn entry(&self, section: &str, key: &str) -> Option<&Entry> {
        self.entries.get(&(section.to_string(), key.to_string()))
    }

    fn missing(section: &str, key: &str) -> CliError {
        CliError::config(0, format!("missing required key `{key}` in [{section}]"))
    }

    pub fn text(&self, section: &str, key: &str) -> Option<&str> {
        self.entry(section, key).map(|e| e.value.as_str())
    }

    pub fn require_text(&self, section: &str, key: &str) -> CliResult<&str> {
        self.text(section, key).ok_or_else(|| Self::missing(section, key))
    }

    pub fn float(&self, section: &str, key: &str) -> Option<f64> {
        self.text(section, key).and_then(parse_float)
    }

    pub fn require_float(&self, section: &str, key: &str) -> CliResult<f64> {
        self.float(section, key).ok_or_else(|| Self::missing(section, key))
    }

    pub fn int(&self, section: &str, key: &str) -> Option<u64> {
        self.text(section, key).and_then(|v| v.parse().ok())
    }

    pub fn require_int(&self, section: &str, key: &str) -> CliResult<u64> {
        self.int(section, key).ok_or_else(|| Self::missing(section, key))
    }

    pub fn floats(&self, section: &str, key: &str) -> Option<Vec<f64>> {
        self.text(section, key).map(|v| split_list(v).iter().filter_map(|s| parse_float(s)).collect())
    }

    pub fn ints(&self, section: &str, key: &str) -> Option<Vec<usize>> {
        self.text(section, key).map(|v| split_list(v).iter().filter_map(|s| s.parse().ok()).collect())
    }

    pub fn texts(&self, section: &str, key: &str) -> Option<Vec<String>> {
        self.text(section, key).map(|v| split_list(v).into_iter().map(String::from).collect())
    }

    /// Line of a key in the file, zero for overrides and absent keys.
    pub fn line(&self, section: &str, key: &str) -> usize {
        self.entry(section, key).map_or(0, |e| e.line)
    }
}

fn split_list(v: &str) -> Vec<&str> {
    v.split(|c: char| c.is_whitespace() || c == ',').filter(|s| !s.is_empty()).collect()
}
