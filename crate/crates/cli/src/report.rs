//! Report emission helpers: JSON documents with embedded manifests, flat
//! CSV, and the output-format selection flag.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::CliError;
use crate::manifest::RunManifest;

/// Which of the json/csv/svg outputs a command writes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OutputFormats {
    pub json: bool,
    pub csv: bool,
    pub svg: bool,
}

impl Default for OutputFormats {
    fn default() -> Self {
        Self {
            json: true,
            csv: true,
            svg: true,
        }
    }
}

impl OutputFormats {
    pub fn from_flags(flags: &[String]) -> Result<Self, CliError> {
        if flags.is_empty() {
            return Ok(Self::default());
        }
        let mut out = Self {
            json: false,
            csv: false,
            svg: false,
        };
        for flag in flags {
            match flag.as_str() {
                "json" => out.json = true,
                "csv" => out.csv = true,
                "svg" => out.svg = true,
                other => {
                    return Err(CliError::Input(format!(
                        "unknown output format `{other}` (expected json, csv, svg)"
                    )))
                }
            }
        }
        Ok(out)
    }
}

/// A report document: manifest first, then the body.
#[derive(Serialize)]
pub struct Report<T: Serialize> {
    pub manifest: RunManifest,
    #[serde(flatten)]
    pub body: T,
}

pub fn report_to_string<T: Serialize>(report: &Report<T>) -> Result<String, CliError> {
    let mut text = serde_json::to_string_pretty(report).map_err(CliError::internal)?;
    text.push('\n');
    Ok(text)
}

/// Minimal schema check used by tests and by downstream consumers: a report
/// must embed a complete manifest.
pub fn validate_report(value: &serde_json::Value) -> Result<(), String> {
    let manifest = value
        .get("manifest")
        .ok_or("report lacks a `manifest` object")?;
    for key in ["command", "tool_version", "seeds", "config", "inputs"] {
        if manifest.get(key).is_none() {
            return Err(format!("manifest lacks `{key}`"));
        }
    }
    let inputs = manifest["inputs"]
        .as_array()
        .ok_or("manifest `inputs` is not an array")?;
    for input in inputs {
        if input.get("path").is_none() || input.get("sha256").is_none() {
            return Err("manifest input entry lacks path/sha256".into());
        }
    }
    Ok(())
}

pub fn ensure_out_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Internal(format!("cannot create {}: {e}", dir.display())))
}

pub fn write_output(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents)
        .map_err(|e| CliError::Internal(format!("cannot write {}: {e}", path.display())))?;
    println!("wrote {}", path.display());
    Ok(())
}

/// One row of the flat curve CSV shared by every report.
pub fn curve_csv_rows(
    method: &str,
    curve: &propeval::metrics::CurveResult,
    curve_id: &str,
) -> Vec<[String; 6]> {
    curve
        .points
        .iter()
        .map(|(x, y)| {
            [
                method.to_string(),
                curve_id.to_string(),
                curve.x_label.clone(),
                curve.y_label.clone(),
                format!("{x}"),
                format!("{y}"),
            ]
        })
        .collect()
}

pub fn write_curve_csv(path: &Path, rows: &[[String; 6]]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["method", "curve", "x_label", "y_label", "x", "y"])
        .map_err(CliError::internal)?;
    for row in rows {
        w.write_record(row).map_err(CliError::internal)?;
    }
    let bytes = w.into_inner().map_err(CliError::internal)?;
    write_output(path, &String::from_utf8(bytes).map_err(CliError::internal)?)
}

/// Sanitize a method name for use in a file name.
pub fn file_slug(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect()
}

pub fn slug_path(dir: &Path, prefix: &str, name: &str, ext: &str) -> PathBuf {
    dir.join(format!("{prefix}{}.{ext}", file_slug(name)))
}
