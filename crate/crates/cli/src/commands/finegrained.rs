//! `propeval finegrained`: per-category recall ordered by size or
//! frequency, or grouped by supercategory.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::Args;

use propeval::diagnostics::{
    fine_grained_recall, FineGrainedKey, FineGrainedOptions, FineGrainedReport, SizeMetric,
};

use super::{load_dataset, load_eval_config, load_proposal_file, DatasetFormat};
use crate::error::CliError;
use crate::manifest::RunManifest;
use crate::plot::{render_line_chart, ChartSpec, Series};
use crate::report::{ensure_out_dir, report_to_string, write_output, OutputFormats, Report};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum KeyArg {
    Size,
    Frequency,
    Supercategory,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SizeMetricArg {
    /// Mean sqrt(box area / image area).
    SqrtArea,
    /// Mean box area / image area.
    Area,
}

#[derive(Debug, Args)]
pub struct FineGrainedArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long, value_enum, default_value_t)]
    pub dataset_format: DatasetFormat,
    #[arg(long)]
    pub proposals: PathBuf,
    #[arg(long, value_enum)]
    pub key: KeyArg,
    #[arg(long, default_value_t = 0.7)]
    pub iou_threshold: f64,
    #[arg(long, default_value_t = 1000)]
    pub budget: usize,
    #[arg(long, value_enum, default_value = "sqrt-area")]
    pub size_metric: SizeMetricArg,
    /// Two-column CSV `name,supercategory` for datasets lacking the field.
    #[arg(long)]
    pub supercategory_map: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub voc_exclusive: bool,
}

pub fn run(args: &FineGrainedArgs, formats: &OutputFormats) -> Result<(), CliError> {
    let cfg = load_eval_config(args.config.as_ref())?;
    let mut dataset = load_dataset(&args.dataset, args.dataset_format, args.voc_exclusive)?;
    let mut manifest = RunManifest::new("finegrained", serde_json::to_value(&cfg).unwrap());
    manifest.add_input(&args.dataset)?;
    manifest.add_input(&args.proposals)?;
    if let Some(p) = &args.config {
        manifest.add_input(p)?;
    }
    if let Some(map_path) = &args.supercategory_map {
        manifest.add_input(map_path)?;
        dataset = dataset.with_supercategories(&load_supercategory_map(map_path)?);
    }
    let proposals = load_proposal_file(&args.proposals)?;
    proposals.validate_for(&dataset)?;

    let opts = FineGrainedOptions {
        key: match args.key {
            KeyArg::Size => FineGrainedKey::Size,
            KeyArg::Frequency => FineGrainedKey::Frequency,
            KeyArg::Supercategory => FineGrainedKey::Supercategory,
        },
        iou_threshold: args.iou_threshold,
        budget: args.budget,
        size_metric: match args.size_metric {
            SizeMetricArg::SqrtArea => SizeMetric::MeanSqrtRelativeArea,
            SizeMetricArg::Area => SizeMetric::MeanRelativeArea,
        },
    };
    let body = fine_grained_recall(&dataset, &proposals, &cfg, &opts)?;

    ensure_out_dir(&args.out)?;
    let report = Report { manifest, body };
    if formats.json {
        write_output(
            &args.out.join("finegrained.json"),
            &report_to_string(&report)?,
        )?;
    }
    if formats.csv {
        write_rows_csv(&args.out, &report.body)?;
    }
    if formats.svg {
        let chart = ChartSpec {
            title: format!(
                "recall at {} IOU by {:?}",
                report.body.iou_threshold, report.body.key
            ),
            x_label: "category rank".into(),
            y_label: "recall".into(),
            log_x: false,
            series: vec![Series {
                name: proposals.method_name().to_string(),
                points: report.body.curve.points.clone(),
            }],
        };
        write_output(
            &args.out.join("finegrained.svg"),
            &render_line_chart(&chart),
        )?;
    }
    Ok(())
}

fn load_supercategory_map(path: &PathBuf) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_reader(text.as_bytes());
    let mut map = BTreeMap::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        if record.len() != 2 {
            return Err(CliError::Input(format!(
                "{}: expected 2 columns `name,supercategory`",
                path.display()
            )));
        }
        map.insert(record[0].to_string(), record[1].to_string());
    }
    Ok(map)
}

fn write_rows_csv(out: &std::path::Path, body: &FineGrainedReport) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["label", "key_value", "recall", "instance_count"])
        .map_err(CliError::internal)?;
    for row in &body.rows {
        w.write_record([
            row.label.as_str(),
            &format!("{}", row.key_value),
            &format!("{}", row.recall),
            &row.instance_count.to_string(),
        ])
        .map_err(CliError::internal)?;
    }
    let bytes = w.into_inner().map_err(CliError::internal)?;
    write_output(
        &out.join("finegrained.csv"),
        &String::from_utf8(bytes).map_err(CliError::internal)?,
    )
}
