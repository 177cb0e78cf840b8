//! Subcommand implementations.

pub mod bias;
pub mod convert;
pub mod eval;
pub mod finegrained;
pub mod gameability;
pub mod stats;
pub mod synth;

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use propeval::data_model::{
    canonical, coco,
    voc::{self, VocOptions},
    Dataset, ProposalFormat, ProposalSet,
};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum DatasetFormat {
    #[default]
    Canonical,
    Coco,
    /// A directory of VOC-style XML files.
    Voc,
}

pub fn load_dataset(
    path: &Path,
    format: DatasetFormat,
    voc_exclusive: bool,
) -> Result<Dataset, CliError> {
    let dataset = match format {
        DatasetFormat::Canonical => canonical::load_canonical(path)?,
        DatasetFormat::Coco => coco::parse_coco_file(path)?,
        DatasetFormat::Voc => voc::parse_voc_dir(
            path,
            VocOptions {
                exclusive_coordinates: voc_exclusive,
            },
        )?,
    };
    Ok(dataset)
}

/// Load a proposal file, inferring CSV/JSON from the extension.
pub fn load_proposal_file(path: &Path) -> Result<ProposalSet, CliError> {
    let format = ProposalFormat::from_path(path).ok_or_else(|| {
        CliError::Input(format!(
            "{}: cannot infer proposal format from extension (expected .csv or .json)",
            path.display()
        ))
    })?;
    Ok(propeval::data_model::load_proposals(path, format)?)
}

/// Resolve a category subset given inline names and/or a names file (one
/// name per line, `#` comments allowed).
pub fn resolve_subset(
    dataset: &Dataset,
    inline: &[String],
    file: Option<&PathBuf>,
) -> Result<BTreeSet<u32>, CliError> {
    let mut names: Vec<String> = inline.to_vec();
    if let Some(path) = file {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        for line in text.lines() {
            let trimmed = line.trim();
            if !trimmed.is_empty() && !trimmed.starts_with('#') {
                names.push(trimmed.to_string());
            }
        }
    }
    let mut ids = BTreeSet::new();
    for name in &names {
        let cat = dataset
            .category_by_name(name)
            .ok_or_else(|| CliError::Input(format!("unknown category name `{name}`")))?;
        ids.insert(cat.id);
    }
    Ok(ids)
}

pub fn load_eval_config(
    path: Option<&PathBuf>,
) -> Result<propeval::metrics::EvaluationConfig, CliError> {
    let cfg: propeval::metrics::EvaluationConfig = match path {
        Some(p) => propeval::config_io::load_config(p)?,
        None => Default::default(),
    };
    cfg.validate()?;
    Ok(cfg)
}
