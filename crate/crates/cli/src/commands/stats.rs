//! `propeval stats`: annotation statistics against a category split.

use std::path::PathBuf;

use clap::Args;

use propeval::data_model::{annotation_stats, StatsReport};

use super::{load_dataset, resolve_subset, DatasetFormat};
use crate::error::CliError;
use crate::manifest::RunManifest;
use crate::report::{ensure_out_dir, report_to_string, write_output, OutputFormats, Report};

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long, value_enum, default_value_t)]
    pub dataset_format: DatasetFormat,
    /// Category names forming the split, comma separated. Defaults to the
    /// dataset's annotated categories.
    #[arg(long, value_delimiter = ',')]
    pub subset: Vec<String>,
    #[arg(long)]
    pub subset_file: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub voc_exclusive: bool,
}

pub fn run(args: &StatsArgs, formats: &OutputFormats) -> Result<(), CliError> {
    let dataset = load_dataset(&args.dataset, args.dataset_format, args.voc_exclusive)?;
    let split = if args.subset.is_empty() && args.subset_file.is_none() {
        dataset.annotated_categories().clone()
    } else {
        resolve_subset(&dataset, &args.subset, args.subset_file.as_ref())?
    };

    let mut manifest = RunManifest::new(
        "stats",
        serde_json::json!({ "split_category_ids": split.iter().collect::<Vec<_>>() }),
    );
    manifest.add_input(&args.dataset)?;
    if let Some(p) = &args.subset_file {
        manifest.add_input(p)?;
    }

    let body = annotation_stats(&dataset, &split)?;
    println!(
        "instances inside split: {}, outside: {}",
        body.instances_inside_split, body.instances_outside_split
    );

    ensure_out_dir(&args.out)?;
    let report = Report { manifest, body };
    if formats.json {
        write_output(&args.out.join("stats.json"), &report_to_string(&report)?)?;
    }
    if formats.csv {
        write_stats_csv(&args.out, &report.body)?;
    }
    Ok(())
}

fn write_stats_csv(out: &std::path::Path, body: &StatsReport) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "category_id",
        "name",
        "supercategory",
        "in_split",
        "instance_count",
        "mean_relative_area",
        "covered_area_fraction",
    ])
    .map_err(CliError::internal)?;
    for row in &body.per_category {
        w.write_record([
            &row.id.to_string(),
            row.name.as_str(),
            row.supercategory.as_deref().unwrap_or(""),
            &row.in_split.to_string(),
            &row.instance_count.to_string(),
            &row.mean_relative_area
                .map_or(String::new(), |v| format!("{v}")),
            &format!("{}", row.covered_area_fraction),
        ])
        .map_err(CliError::internal)?;
    }
    let bytes = w.into_inner().map_err(CliError::internal)?;
    write_output(
        &out.join("stats.csv"),
        &String::from_utf8(bytes).map_err(CliError::internal)?,
    )
}
