use std::fs;
use std::path::{Path, PathBuf};

use ciot_core::config::Scenario;
use ciot_core::Error;
use serde::Serialize;

/// Provenance written as `manifest.json` next to a command's outputs.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub seed: u64,
    pub replications: u32,
    pub config_path: Option<PathBuf>,
    pub config: Scenario,
    /// File names relative to the output directory.
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str, seed: u64, replications: u32, config_path: Option<&Path>, config: &Scenario) -> Self {
        Self {
            command: command.to_string(),
            version: concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION")).to_string(),
            seed,
            replications,
            config_path: config_path.map(Path::to_path_buf),
            config: config.clone(),
            outputs: Vec::new(),
        }
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf, Error> {
        let path = dir.join("manifest.json");
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        fs::write(&path, text + "\n").map_err(|source| Error::Io { path: path.clone(), source })?;
        Ok(path)
    }
}
