use std::fs;
use std::path::Path;

use flillab::experiments::ExperimentConfig;
use sha2::{Digest, Sha256};

use crate::CliError;

/// File name of the canonical config copy written next to the outputs.
pub const CANONICAL_CONFIG: &str = "config.canonical.json";

/// Parses a TOML config without validating it.
pub fn load_config_str(text: &str) -> Result<ExperimentConfig, CliError> {
    toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = fs::read_to_string(path).map_err(CliError::io(path))?;
    load_config_str(&text).map_err(|e| match e {
        CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// Checks a parsed config, including the bandwidth conditions of its
/// experiment.
pub fn validate(config: &ExperimentConfig) -> Result<(), CliError> {
    config.validate().map_err(|e| CliError::Config(e.to_string()))
}

pub fn parse_config_str(text: &str) -> Result<ExperimentConfig, CliError> {
    let config = load_config_str(text)?;
    validate(&config)?;
    Ok(config)
}

/// Reads and validates a config file.
pub fn parse_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    let config = load_config(path)?;
    validate(&config)?;
    Ok(config)
}

/// TOML rendering that parses back to an equal config.
pub fn emit_config(config: &ExperimentConfig) -> Result<String, CliError> {
    toml::to_string(config).map_err(|e| CliError::Runtime(e.to_string()))
}

/// Compact JSON with keys sorted at every level and numbers in shortest
/// round-trip form.
pub fn canonical_json(config: &ExperimentConfig) -> Result<String, CliError> {
    let value = serde_json::to_value(config).map_err(|e| CliError::Runtime(e.to_string()))?;
    Ok(value.to_string())
}

/// Hex SHA-256 of [`canonical_json`].
pub fn config_digest(config: &ExperimentConfig) -> Result<String, CliError> {
    Ok(digest_bytes(canonical_json(config)?.as_bytes()))
}

pub(crate) fn digest_bytes(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}
