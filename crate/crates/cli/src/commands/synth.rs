//! `propeval synth`: generate a synthetic box world (full and partially
//! annotated views) from a config file, optionally together with reference
//! proposal files for the world.

use std::path::PathBuf;

use clap::Args;

use propeval::data_model::canonical::to_canonical_string;
use propeval::data_model::{save_proposals, ProposalFormat};
use propeval::proposers::{oracle_dmp, random_proposer, DmpConfig};
use propeval::synth::{generate_dataset, SynthConfig};

use crate::error::CliError;
use crate::manifest::RunManifest;
use crate::report::{ensure_out_dir, write_output};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum ProposalFileFormat {
    #[default]
    Csv,
    Json,
}

impl From<ProposalFileFormat> for ProposalFormat {
    fn from(f: ProposalFileFormat) -> Self {
        match f {
            ProposalFileFormat::Csv => ProposalFormat::Csv,
            ProposalFileFormat::Json => ProposalFormat::Json,
        }
    }
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Generator config (.toml or .json).
    #[arg(long)]
    pub synth_config: PathBuf,
    /// Override the seed in the config.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Also emit oracle-DMP proposals for the world (DmpConfig file).
    #[arg(long)]
    pub dmp_config: Option<PathBuf>,
    /// Also emit this many uniform random proposals per image.
    #[arg(long)]
    pub random_proposals: Option<usize>,
    #[arg(long, value_enum, default_value_t)]
    pub proposal_format: ProposalFileFormat,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(args: &SynthArgs) -> Result<(), CliError> {
    let mut cfg: SynthConfig = propeval::config_io::load_config(&args.synth_config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let mut manifest =
        RunManifest::new("synth", serde_json::to_value(&cfg).unwrap()).with_seeds(vec![cfg.seed]);
    manifest.add_input(&args.synth_config)?;

    let (full, partial) = generate_dataset(&cfg)?;
    ensure_out_dir(&args.out)?;
    write_output(
        &args.out.join("dataset_full.json"),
        &to_canonical_string(&full),
    )?;
    write_output(
        &args.out.join("dataset_partial.json"),
        &to_canonical_string(&partial),
    )?;

    let ext = match args.proposal_format {
        ProposalFileFormat::Csv => "csv",
        ProposalFileFormat::Json => "json",
    };
    if let Some(dmp_path) = &args.dmp_config {
        manifest.add_input(dmp_path)?;
        let mut dmp_cfg: DmpConfig = propeval::config_io::load_config(dmp_path)?;
        if let Some(seed) = args.seed {
            dmp_cfg.seed = seed;
        }
        manifest.seeds.push(dmp_cfg.seed);
        let proposals = oracle_dmp(&full, &dmp_cfg)?;
        let path = args.out.join(format!("proposals_oracle_dmp.{ext}"));
        save_proposals(&proposals, &path, args.proposal_format.into())?;
        println!("wrote {}", path.display());
    }
    if let Some(per_image) = args.random_proposals {
        let proposals = random_proposer(&full, per_image, cfg.seed)?;
        let path = args.out.join(format!("proposals_random.{ext}"));
        save_proposals(&proposals, &path, args.proposal_format.into())?;
        println!("wrote {}", path.display());
    }

    let mut manifest_text = serde_json::to_string_pretty(&manifest).map_err(CliError::internal)?;
    manifest_text.push('\n');
    write_output(&args.out.join("manifest.json"), &manifest_text)?;
    println!(
        "generated {} images, {} instances ({} in the partial view)",
        full.images().len(),
        full.instances().len(),
        partial.instances().len()
    );
    Ok(())
}
