use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::{digest_bytes, CANONICAL_CONFIG};
use crate::CliError;

pub const MANIFEST: &str = "manifest.json";

/// Identity and contents of one run directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    /// Hex SHA-256 of `config.canonical.json`.
    pub config_digest: String,
    pub experiment: String,
    pub seeds: Vec<u64>,
    pub threads: usize,
    /// RFC 3339 timestamps.
    pub started: String,
    pub finished: String,
    pub record_counts: BTreeMap<String, usize>,
    pub files: Vec<String>,
}

impl RunManifest {
    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        let path = dir.join(MANIFEST);
        let text = serde_json::to_string_pretty(self).map_err(|e| CliError::Runtime(e.to_string()))?;
        fs::write(&path, text + "\n").map_err(CliError::io(path))
    }

    pub fn read(dir: &Path) -> Result<Self, CliError> {
        let path = dir.join(MANIFEST);
        let text = fs::read_to_string(&path).map_err(CliError::io(&path))?;
        serde_json::from_str(&text).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))
    }
}

/// Recomputes the digest of the emitted config copy and compares it with
/// the manifest.
pub fn verify_manifest(dir: &Path) -> Result<bool, CliError> {
    let manifest = RunManifest::read(dir)?;
    let path = dir.join(CANONICAL_CONFIG);
    let bytes = fs::read(&path).map_err(CliError::io(path))?;
    Ok(digest_bytes(&bytes) == manifest.config_digest)
}
