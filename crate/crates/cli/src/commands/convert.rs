//! `propeval convert`: translate annotation and proposal files into the
//! toolkit's canonical formats.

use std::path::PathBuf;

use clap::Args;

use propeval::data_model::canonical::to_canonical_string;
use propeval::data_model::proposals::{proposals_to_csv_string, proposals_to_json_string};
use propeval::data_model::{load_proposals, ProposalFormat};

use super::{load_dataset, DatasetFormat};
use crate::error::CliError;
use crate::manifest::RunManifest;
use crate::report::write_output;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum InputFormat {
    Voc,
    Coco,
    Canonical,
    ProposalsCsv,
    ProposalsJson,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Canonical,
    ProposalsCsv,
    ProposalsJson,
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    /// Input file (or VOC directory).
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub input_format: InputFormat,
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, value_enum)]
    pub output_format: OutputFormat,
    #[arg(long)]
    pub voc_exclusive: bool,
}

pub fn run(args: &ConvertArgs) -> Result<(), CliError> {
    let text = match (args.input_format, args.output_format) {
        (InputFormat::Voc, OutputFormat::Canonical)
        | (InputFormat::Coco, OutputFormat::Canonical)
        | (InputFormat::Canonical, OutputFormat::Canonical) => {
            let dataset_format = match args.input_format {
                InputFormat::Voc => DatasetFormat::Voc,
                InputFormat::Coco => DatasetFormat::Coco,
                _ => DatasetFormat::Canonical,
            };
            let dataset = load_dataset(&args.input, dataset_format, args.voc_exclusive)?;
            to_canonical_string(&dataset)
        }
        (InputFormat::ProposalsCsv, OutputFormat::ProposalsJson) => {
            let set = load_proposals(&args.input, ProposalFormat::Csv)?;
            proposals_to_json_string(&set)
        }
        (InputFormat::ProposalsJson, OutputFormat::ProposalsCsv) => {
            let set = load_proposals(&args.input, ProposalFormat::Json)?;
            proposals_to_csv_string(&set)
        }
        (InputFormat::ProposalsCsv, OutputFormat::ProposalsCsv) => {
            let set = load_proposals(&args.input, ProposalFormat::Csv)?;
            proposals_to_csv_string(&set)
        }
        (InputFormat::ProposalsJson, OutputFormat::ProposalsJson) => {
            let set = load_proposals(&args.input, ProposalFormat::Json)?;
            proposals_to_json_string(&set)
        }
        (input, output) => {
            return Err(CliError::Input(format!(
                "cannot convert {input:?} to {output:?}"
            )))
        }
    };
    if let Some(parent) = args.output.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| {
                CliError::Internal(format!("cannot create {}: {e}", parent.display()))
            })?;
        }
    }
    write_output(&args.output, &text)?;

    // provenance sidecar: the converted file itself has a fixed schema
    let mut manifest = RunManifest::new(
        "convert",
        serde_json::json!({
            "input_format": format!("{:?}", args.input_format),
            "output_format": format!("{:?}", args.output_format),
            "voc_exclusive": args.voc_exclusive,
        }),
    );
    if args.input.is_file() {
        manifest.add_input(&args.input)?;
    }
    let mut manifest_text = serde_json::to_string_pretty(&manifest).map_err(CliError::internal)?;
    manifest_text.push('\n');
    let sidecar = args.output.with_extension(format!(
        "{}.manifest.json",
        args.output
            .extension()
            .and_then(|e| e.to_str())
            .unwrap_or("out")
    ));
    write_output(&sidecar, &manifest_text)
}
