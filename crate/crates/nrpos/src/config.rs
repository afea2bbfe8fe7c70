//! Experiment configuration files and dotted-path overrides.

use std::path::Path;

use nrpos_core::optimizer::homd::{HomdParams, Scheme};
use nrpos_core::scenario::{validate_config, ScenarioConfig};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

/// Monte Carlo settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub realizations: usize,
    /// Scheme names, see [`Scheme::name`].
    pub schemes: Vec<String>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self { seed: 1, realizations: 20, schemes: Scheme::ALL.iter().map(|s| s.name().to_string()).collect() }
    }
}

/// A complete run description.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub scenario: ScenarioConfig,
    pub optimizer: HomdParams,
    pub experiment: ExperimentConfig,
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let c: Self = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn schemes(&self) -> Result<Vec<Scheme>, CliError> {
        let mut out: Vec<Scheme> = self
            .experiment
            .schemes
            .iter()
            .map(|s| Scheme::parse(s).ok_or_else(|| CliError::Config(format!("unknown scheme {s:?}"))))
            .collect::<Result<_, _>>()?;
        out.sort();
        out.dedup();
        Ok(out)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let mut problems = validate_config(&self.scenario);
        if self.experiment.realizations == 0 {
            problems.push("experiment.realizations must be at least 1".into());
        }
        if self.experiment.schemes.is_empty() {
            problems.push("experiment.schemes must not be empty".into());
        }
        if !problems.is_empty() {
            return Err(CliError::Config(problems.join("; ")));
        }
        self.schemes().map(|_| ())
    }

    /// Copy with `path` (for example `scenario.bandwidth_hz`) set to `value`.
    /// The value is parsed as JSON, falling back to a plain string.
    pub fn with_override(&self, path: &str, value: &str) -> Result<Self, CliError> {
        let mut tree = serde_json::to_value(self).map_err(|e| CliError::Config(e.to_string()))?;
        let mut node = &mut tree;
        let parts: Vec<&str> = path.split('.').collect();
        for (i, part) in parts.iter().enumerate() {
            let obj = node
                .as_object_mut()
                .ok_or_else(|| CliError::Config(format!("{path}: {} is not a section", parts[..i].join("."))))?;
            node = obj.get_mut(*part).ok_or_else(|| CliError::Config(format!("{path}: no field {part:?}")))?;
        }
        *node = serde_json::from_str(value).unwrap_or_else(|_| Value::String(value.to_string()));
        let c: Self = serde_json::from_value(tree).map_err(|e| CliError::Config(format!("{path}={value}: {e}")))?;
        c.validate()?;
        Ok(c)
    }
}

/// Split a `--values` list on top-level commas, so `[50,50],[100,100]`
/// yields two arrays.
pub fn split_values(list: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in list.chars() {
        match ch {
            '[' | '{' => depth += 1,
            ']' | '}' => depth -= 1,
            ',' if depth == 0 => {
                out.push(cur.trim().to_string());
                cur.clear();
                continue;
            }
            _ => {}
        }
        cur.push(ch);
    }
    out.push(cur.trim().to_string());
    out.retain(|v| !v.is_empty());
    out
}
