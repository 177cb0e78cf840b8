//! Run manifests: every report embeds the resolved configuration, content
//! digests of its inputs, the tool version, and the seeds involved, so a
//! report is reproducible from its own header.

use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub tool_version: String,
    pub seeds: Vec<u64>,
    /// Full echo of the resolved configuration, defaults included.
    pub config: serde_json::Value,
    /// Input files sorted by path.
    pub inputs: Vec<InputDigest>,
}

impl RunManifest {
    pub fn new(command: &str, config: serde_json::Value) -> Self {
        Self {
            command: command.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            seeds: Vec::new(),
            config,
            inputs: Vec::new(),
        }
    }

    pub fn with_seeds(mut self, seeds: Vec<u64>) -> Self {
        self.seeds = seeds;
        self
    }

    pub fn add_input(&mut self, path: &Path) -> Result<(), CliError> {
        let bytes = std::fs::read(path)
            .map_err(|e| CliError::Input(format!("{}: {}", path.display(), e)))?;
        let digest = Sha256::digest(&bytes);
        let mut hex = String::with_capacity(64);
        for b in digest {
            hex.push_str(&format!("{b:02x}"));
        }
        self.inputs.push(InputDigest {
            path: path.display().to_string(),
            sha256: hex,
        });
        self.inputs.sort_by(|a, b| a.path.cmp(&b.path));
        Ok(())
    }
}
