//! Experiment config files.
//!
//! A config is TOML (or JSON when the file ends in `.json`) with a
//! `[scenario]` table and an optional `[sweep]` table. Only
//! `scenario.layout.{tx, rx, ris}` is required:
//!
//! ```toml
//! [scenario]
//! environment = "indoor"
//! frequency_ghz = 28
//!
//! [scenario.layout]
//! tx = [0, 25, 2]
//! rx = [45, 45, 1]
//! ris = [40, 50, 2]
//!
//! [sweep]
//! axis = "joint"
//! azimuth = { start = 0, stop = 350, step = 10 }
//! ```
//!
//! The canonical form is JSON with sorted keys; its SHA-256 is the config
//! digest.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::channel::{validate_scenario, ScenarioConfig};
use crate::error::{Result, SimError};
use crate::sweep::SweepSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub scenario: ScenarioConfig,
    #[serde(default)]
    pub sweep: SweepSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConfigFormat {
    Toml,
    Json,
}

impl ConfigFormat {
    pub fn for_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => ConfigFormat::Json,
            _ => ConfigFormat::Toml,
        }
    }
}

/// Parses config text without validating the scenario.
pub fn parse_config(text: &str, format: ConfigFormat, path: &Path) -> Result<ConfigFile> {
    let err = |message: String| SimError::Config {
        path: path.to_path_buf(),
        message,
    };
    match format {
        ConfigFormat::Toml => toml::from_str(text).map_err(|e| err(e.to_string())),
        ConfigFormat::Json => serde_json::from_str(text).map_err(|e| err(e.to_string())),
    }
}

/// Reads, parses and validates a config file. Validation failures list
/// every violation; `allow_invalid` skips scenario validation.
pub fn load_config(path: &Path, allow_invalid: bool) -> Result<ConfigFile> {
    let text = std::fs::read_to_string(path).map_err(|e| SimError::io(path, e))?;
    let config = parse_config(&text, ConfigFormat::for_path(path), path)?;
    config.sweep.validate().map_err(|e| SimError::Config {
        path: path.to_path_buf(),
        message: format!("sweep: {e}"),
    })?;
    if !allow_invalid {
        let violations = validate_scenario(&config.scenario);
        if !violations.is_empty() {
            return Err(SimError::Validation(violations));
        }
    }
    Ok(config)
}

fn sort_keys(v: Value) -> Value {
    match v {
        Value::Object(map) => {
            let mut entries: Vec<(String, Value)> = map.into_iter().collect();
            entries.sort_by(|a, b| a.0.cmp(&b.0));
            Value::Object(entries.into_iter().map(|(k, v)| (k, sort_keys(v))).collect())
        }
        Value::Array(items) => Value::Array(items.into_iter().map(sort_keys).collect()),
        other => other,
    }
}

/// Pretty JSON with keys sorted at every level.
pub fn canonical_json<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("config types serialize to JSON");
    let mut s = serde_json::to_string_pretty(&sort_keys(v)).expect("JSON values serialize");
    s.push('\n');
    s
}

/// Hex SHA-256 of the canonical JSON of a scenario.
pub fn config_digest(config: &ScenarioConfig) -> String {
    hex::encode(Sha256::digest(canonical_json(config).as_bytes()))
}
