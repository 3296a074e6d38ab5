//! `key = value` run configuration.

use std::path::PathBuf;

use fiberspec::integrals::ConstantsSource;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid {field}: {msg}")]
    Validation { field: String, msg: String },
}

impl ConfigError {
    fn invalid(field: &str, msg: impl Into<String>) -> Self {
        ConfigError::Validation { field: field.to_string(), msg: msg.into() }
    }

    pub fn field(&self) -> Option<&str> {
        match self {
            ConfigError::Validation { field, .. } => Some(field),
            ConfigError::Parse { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub lambda_range: (f64, f64),
    pub mu_range: (f64, f64),
    pub step: f64,
    pub k_list: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub gamma: f64,
    pub lambda: f64,
    pub mu: f64,
    pub k: (f64, f64),
    pub grid_n: usize,
    pub rel_tol: f64,
    pub constants_source: ConstantsSource,
    pub sweep: SweepConfig,
    pub output: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            gamma: 1.0,
            lambda: 0.0,
            mu: 0.0,
            k: (0.0, 0.0),
            grid_n: 256,
            rel_tol: 1e-10,
            constants_source: ConstantsSource::Computed,
            sweep: SweepConfig { lambda_range: (-12.0, 12.0), mu_range: (-12.0, 12.0), step: 0.5, k_list: vec![(0.0, 0.0)] },
            output: None,
        }
    }
}

pub const KEYS: [&str; 12] =
    ["gamma", "lambda", "mu", "K", "grid_N", "rel_tol", "constants_source", "lambda_range", "mu_range", "step", "k_list", "output"];

fn real(field: &str, v: &str) -> Result<f64, String> {
    let x: f64 = v.trim().parse().map_err(|_| format!("`{v}` is not a number"))?;
    if !x.is_finite() {
        return Err(format!("{field} must be finite"));
    }
    Ok(x)
}

fn pair(field: &str, v: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = v.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("expected two comma-separated numbers, got `{v}`"));
    }
    Ok((real(field, parts[0])?, real(field, parts[1])?))
}

pub fn parse_source(v: &str) -> Result<ConstantsSource, String> {
    match v.trim().to_ascii_lowercase().as_str() {
        "paper" => Ok(ConstantsSource::Paper),
        "computed" => Ok(ConstantsSource::Computed),
        other => Err(format!("unknown constants source `{other}` (paper|computed)")),
    }
}

impl RunConfig {
    /// Set one key from its textual value. Errors are messages without location.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let v = value.trim();
        match key {
            "gamma" => self.gamma = real(key, v)?,
            "lambda" => self.lambda = real(key, v)?,
            "mu" => self.mu = real(key, v)?,
            "K" => self.k = pair(key, v)?,
            "grid_N" => self.grid_n = v.parse().map_err(|_| format!("`{v}` is not a grid order"))?,
            "rel_tol" => self.rel_tol = real(key, v)?,
            "constants_source" => self.constants_source = parse_source(v)?,
            "lambda_range" => self.sweep.lambda_range = pair(key, v)?,
            "mu_range" => self.sweep.mu_range = pair(key, v)?,
            "step" => self.sweep.step = real(key, v)?,
            "k_list" => {
                self.sweep.k_list = v.split(';').filter(|s| !s.trim().is_empty()).map(|s| pair(key, s)).collect::<Result<_, _>>()?;
            }
            "output" => self.output = if v.is_empty() { None } else { Some(PathBuf::from(v)) },
            _ => return Err(format!("unknown key `{key}`")),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.gamma > 0.0) {
            return Err(ConfigError::invalid("gamma", "must be positive"));
        }
        if self.grid_n < 16 || self.grid_n % 2 != 0 {
            return Err(ConfigError::invalid("grid_N", "must be even and at least 16"));
        }
        if !(self.rel_tol >= 1e-13 && self.rel_tol < 1.0) {
            return Err(ConfigError::invalid("rel_tol", "must lie in [1e-13, 1)"));
        }
        if !(self.sweep.step > 0.0) {
            return Err(ConfigError::invalid("step", "must be positive"));
        }
        for (field, (lo, hi)) in [("lambda_range", self.sweep.lambda_range), ("mu_range", self.sweep.mu_range)] {
            if lo > hi {
                return Err(ConfigError::invalid(field, "lower end exceeds upper end"));
            }
        }
        if self.sweep.k_list.is_empty() {
            return Err(ConfigError::invalid("k_list", "must name at least one K"));
        }
        Ok(())
    }
}

/// Parse a configuration document; missing keys keep their defaults.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or(ConfigError::Parse { line: i + 1, msg: "expected `key = value`".into() })?;
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(ConfigError::Parse { line: i + 1, msg: format!("unknown key `{key}`") });
        }
        cfg.set(key, value).map_err(|msg| ConfigError::invalid(key, msg))?;
    }
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fills_defaults() {
        let c = parse_config("gamma = 1.0\nlambda = -1\nmu = 0").unwrap();
        assert_eq!(c.lambda, -1.0);
        assert_eq!(c.grid_n, 256);
        assert_eq!(c.rel_tol, 1e-10);
        assert_eq!(c.constants_source, ConstantsSource::Computed);
    }

    #[test]
    fn empty_is_default() {
        assert_eq!(parse_config("").unwrap(), RunConfig::default());
    }

    #[test]
    fn negative_gamma() {
        assert_eq!(parse_config("gamma = -2").unwrap_err().field(), Some("gamma"));
    }

    #[test]
    fn unknown_key_names_line() {
        assert_eq!(parse_config("# c\n\nfoo = 1").unwrap_err(), ConfigError::Parse { line: 3, msg: "unknown key `foo`".into() });
        assert!(matches!(parse_config("gamma 1"), Err(ConfigError::Parse { line: 1, .. })));
    }

    #[test]
    fn lists_and_comments() {
        let c = parse_config("K = 0.5, 1.0  # fiber\nk_list = 0,0; 1,0.5\nconstants_source = Paper\nstep = 0.25").unwrap();
        assert_eq!(c.k, (0.5, 1.0));
        assert_eq!(c.sweep.k_list, vec![(0.0, 0.0), (1.0, 0.5)]);
        assert_eq!(c.constants_source, ConstantsSource::Paper);
        assert_eq!(parse_config("step = 0").unwrap_err().field(), Some("step"));
        assert_eq!(parse_config("mu = inf").unwrap_err().field(), Some("mu"));
    }
}
