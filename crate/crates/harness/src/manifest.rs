//! `manifest.json`: provenance of a run directory plus a checksum for every
//! file it lists.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{HarnessError, Result};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const CODE_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileEntry {
    pub name: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    pub code_version: String,
    pub seed: u64,
    /// Copy of the configuration as written to `config.json`.
    pub config: Value,
    /// Values substituted for `"auto"` settings, and the decay constants.
    pub resolved: Value,
    pub started: String,
    pub finished: String,
    /// `clean`, `contaminated` or `blow-up`.
    pub status: String,
    pub blow_up_time: Option<f64>,
    pub contamination_time: Option<f64>,
    pub energy_residual: Option<f64>,
    pub absorbed_energy: f64,
    pub warnings: Vec<String>,
    /// Command-specific results.
    pub report: Value,
    pub files: Vec<FileEntry>,
}

pub fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

pub fn sha256_file(path: &Path) -> Result<(u64, String)> {
    let bytes = fs::read(path).map_err(|e| HarnessError::io(path, e))?;
    Ok((bytes.len() as u64, hex::encode(Sha256::digest(&bytes))))
}

impl Manifest {
    /// Checksums `names` (relative to `dir`) into the inventory and writes
    /// the manifest.
    pub fn write(&mut self, dir: &Path, names: &[String]) -> Result<()> {
        self.files = names
            .iter()
            .map(|name| {
                let (bytes, sha256) = sha256_file(&dir.join(name))?;
                Ok(FileEntry {
                    name: name.clone(),
                    bytes,
                    sha256,
                })
            })
            .collect::<Result<_>>()?;
        let path = dir.join(MANIFEST_FILE);
        fs::write(&path, crate::json::to_pretty(self)).map_err(|e| HarnessError::io(&path, e))
    }

    /// Reads the manifest of `dir` without checking files.
    pub fn read(dir: &Path) -> Result<Self> {
        let path = dir.join(MANIFEST_FILE);
        let text = fs::read_to_string(&path).map_err(|e| HarnessError::io(&path, e))?;
        serde_json::from_str(&text).map_err(|e| HarnessError::format(&path, e.to_string()))
    }

    /// Reads the manifest of `dir` and checks every listed file against its
    /// recorded size and checksum.
    pub fn read_verified(dir: &Path) -> Result<Self> {
        let manifest = Self::read(dir)?;
        for entry in &manifest.files {
            let (_, actual) = sha256_file(&dir.join(&entry.name))?;
            if actual != entry.sha256 {
                return Err(HarnessError::Checksum {
                    file: entry.name.clone(),
                    expected: entry.sha256.clone(),
                    actual,
                });
            }
        }
        Ok(manifest)
    }
}
