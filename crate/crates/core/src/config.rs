//! `key = value` configuration files. Lines starting with `#` are comments.

use std::path::Path;
use std::time::Duration;

use crate::align::CostMatrix;
use crate::annotate::Granularity;
use crate::error::{Error, Result};
use crate::eval::M2Options;

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub substitution: f64,
    pub indel: f64,
    pub token_constant: f64,
    pub confusion_cost: f64,
    pub diacritic_cost: f64,
    /// Tags seen this many times or fewer are not modeled.
    pub threshold: usize,
    /// Per-sentence scoring budget; `None` means unlimited. A budget of 0
    /// times out every sentence.
    pub timeout_secs: Option<f64>,
    pub granularity: Granularity,
    pub max_unchanged: usize,
    pub beta: f64,
    /// 0 lets the thread pool pick.
    pub jobs: usize,
}

impl Default for Config {
    fn default() -> Self {
        let m2 = M2Options::default();
        Config {
            substitution: 1.0,
            indel: 1.0,
            token_constant: crate::align::DEFAULT_TOKEN_CONSTANT,
            confusion_cost: crate::align::DEFAULT_CONFUSION_COST,
            diacritic_cost: crate::align::DEFAULT_DIACRITIC_COST,
            threshold: 100,
            timeout_secs: m2.timeout.map(|d| d.as_secs_f64()),
            granularity: Granularity::Fine,
            max_unchanged: m2.max_unchanged,
            beta: m2.beta,
            jobs: 0,
        }
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Config> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Config::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Config> {
        let mut cfg = Config::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::format("config", Some(i + 1), "expected key = value"));
            };
            cfg.set(key.trim(), value.trim())
                .map_err(|e| Error::format("config", Some(i + 1), e))?;
        }
        Ok(cfg)
    }

    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        match key {
            "substitution" => self.substitution = cost(key, value)?,
            "indel" => self.indel = cost(key, value)?,
            "token_constant" => self.token_constant = cost(key, value)?,
            "confusion_cost" => self.confusion_cost = cost(key, value)?,
            "diacritic_cost" => self.diacritic_cost = cost(key, value)?,
            "timeout_secs" => {
                self.timeout_secs = match value {
                    "none" | "off" => None,
                    _ => Some(cost(key, value)?),
                }
            }
            "beta" => {
                self.beta = cost(key, value)?;
                if self.beta == 0.0 {
                    return Err("beta must be positive".into());
                }
            }
            "threshold" => self.threshold = count(key, value)?,
            "max_unchanged" => self.max_unchanged = count(key, value)?,
            "jobs" => self.jobs = count(key, value)?,
            "granularity" => self.granularity = value.parse().map_err(|e: Error| e.to_string())?,
            _ => return Err(format!("unknown key {key:?}")),
        }
        Ok(())
    }

    pub fn costs(&self) -> Result<CostMatrix> {
        CostMatrix::arabic()
            .with_substitution(self.substitution)?
            .with_indel(self.indel)?
            .with_token_constant(self.token_constant)?
            .with_confusion_cost(self.confusion_cost)?
            .with_diacritic_cost(self.diacritic_cost)
    }

    pub fn m2_options(&self) -> M2Options {
        M2Options {
            beta: self.beta,
            max_unchanged: self.max_unchanged,
            timeout: self.timeout_secs.map(Duration::from_secs_f64),
            ..M2Options::default()
        }
    }
}

fn cost(key: &str, value: &str) -> std::result::Result<f64, String> {
    match value.parse::<f64>() {
        Ok(v) if v.is_finite() && v >= 0.0 => Ok(v),
        Ok(_) => Err(format!("{key} must be a non-negative number, got {value:?}")),
        Err(_) => Err(format!("{key}: not a number: {value:?}")),
    }
}

fn count(key: &str, value: &str) -> std::result::Result<usize, String> {
    value
        .parse::<usize>()
        .map_err(|_| format!("{key} must be a non-negative integer, got {value:?}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_overrides() {
        assert_eq!(Config::default().threshold, 100);
        let cfg = Config::parse("# costs\nindel = 2\n\nthreshold=5\ngranularity = 13\ntimeout_secs = 0\n").unwrap();
        assert_eq!(cfg.indel, 2.0);
        assert_eq!(cfg.threshold, 5);
        assert_eq!(cfg.granularity, Granularity::Coarse);
        assert_eq!(cfg.m2_options().timeout, Some(Duration::ZERO));
        assert_eq!(Config::parse("timeout_secs = none").unwrap().m2_options().timeout, None);
        assert_eq!(cfg.substitution, Config::default().substitution);
    }

    #[test]
    fn rejects_bad_input() {
        for text in [
            "indel = -1",
            "colour = red",
            "threshold = 1.5",
            "no equals sign",
            "beta = 0",
        ] {
            let err = Config::parse(text).unwrap_err();
            assert!(err.to_string().contains("line 1"), "{text}: {err}");
        }
    }
}
