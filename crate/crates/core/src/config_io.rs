//! Loading of configuration files. Both TOML and JSON are accepted; the
//! dialect is chosen by file extension.

use std::path::Path;

use serde::de::DeserializeOwned;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("{path}: unsupported config extension (expected .toml or .json)")]
    UnsupportedExtension { path: String },
}

pub fn load_config<T: DeserializeOwned>(path: &Path) -> Result<T, ConfigError> {
    let display = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: display.clone(),
        source: e,
    })?;
    match path.extension().and_then(|e| e.to_str()) {
        Some("toml") => toml::from_str(&text).map_err(|e| ConfigError::Parse {
            path: display,
            message: e.to_string(),
        }),
        Some("json") => serde_json::from_str(&text).map_err(|e| ConfigError::Parse {
            path: display,
            message: e.to_string(),
        }),
        _ => Err(ConfigError::UnsupportedExtension { path: display }),
    }
}
