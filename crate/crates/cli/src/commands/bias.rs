//! `propeval bias-capacity`: AUC as a function of the number of seen
//! categories, from supplied runs or from internal simulation.

use std::path::{Path, PathBuf};

use clap::Args;

use propeval::diagnostics::{bias_capacity, bias_capacity_simulation, BiasCapacityResult};
use propeval::proposers::DmpConfig;
use propeval::synth::{generate_dataset, SynthConfig};

use super::{load_dataset, load_eval_config, load_proposal_file, DatasetFormat};
use crate::error::CliError;
use crate::manifest::RunManifest;
use crate::plot::{render_line_chart, ChartSpec, Series};
use crate::report::{
    curve_csv_rows, ensure_out_dir, report_to_string, write_curve_csv, write_output, OutputFormats,
    Report,
};

#[derive(Debug, Args)]
pub struct BiasArgs {
    /// Fully annotated dataset (runs mode).
    #[arg(long, required_unless_present = "simulate")]
    pub dataset: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    pub dataset_format: DatasetFormat,
    /// CSV with header `k,path`: seen-count and proposal file per run
    /// (paths relative to this file).
    #[arg(long, required_unless_present = "simulate")]
    pub runs: Option<PathBuf>,
    /// Generate the world and the runs internally with the oracle DMP.
    #[arg(long)]
    pub simulate: bool,
    #[arg(long, required_if_eq("simulate", "true"))]
    pub synth_config: Option<PathBuf>,
    #[arg(long, required_if_eq("simulate", "true"))]
    pub dmp_config: Option<PathBuf>,
    /// Seen-category counts for simulation, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub seen_counts: Vec<usize>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Override the seeds in the synth/DMP configs.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub voc_exclusive: bool,
}

pub fn run(args: &BiasArgs, formats: &OutputFormats) -> Result<(), CliError> {
    let cfg = load_eval_config(args.config.as_ref())?;
    let mut manifest = RunManifest::new("bias-capacity", serde_json::to_value(&cfg).unwrap());
    if let Some(p) = &args.config {
        manifest.add_input(p)?;
    }

    let result = if args.simulate {
        run_simulation(args, &cfg, &mut manifest)?
    } else {
        run_from_files(args, &cfg, &mut manifest)?
    };

    ensure_out_dir(&args.out)?;
    let report = Report {
        manifest,
        body: result,
    };
    if formats.json {
        write_output(
            &args.out.join("bias_capacity.json"),
            &report_to_string(&report)?,
        )?;
    }
    if formats.csv {
        let mut rows = Vec::new();
        for run in &report.body.per_seen_count {
            rows.extend(curve_csv_rows(
                &run.method,
                &run.auc_vs_budget,
                "auc_vs_budget",
            ));
        }
        for summary in &report.body.auc_vs_seen_count {
            rows.extend(curve_csv_rows(
                "bias_capacity",
                &summary.curve,
                &format!("auc_vs_seen_count@M={}", summary.budget),
            ));
        }
        rows.extend(curve_csv_rows(
            "bias_capacity",
            &report.body.improvement_vs_budget,
            "improvement_vs_budget",
        ));
        write_curve_csv(&args.out.join("bias_capacity.csv"), &rows)?;
    }
    if formats.svg {
        emit_bias_svgs(&args.out, &report.body)?;
    }
    Ok(())
}

fn run_simulation(
    args: &BiasArgs,
    cfg: &propeval::metrics::EvaluationConfig,
    manifest: &mut RunManifest,
) -> Result<BiasCapacityResult, CliError> {
    if args.seen_counts.is_empty() {
        return Err(CliError::Input(
            "--simulate requires --seen-counts with at least two values".into(),
        ));
    }
    let synth_path = args.synth_config.as_ref().expect("required by clap");
    let dmp_path = args.dmp_config.as_ref().expect("required by clap");
    manifest.add_input(synth_path)?;
    manifest.add_input(dmp_path)?;

    let mut synth_cfg: SynthConfig = propeval::config_io::load_config(synth_path)?;
    let mut dmp_cfg: DmpConfig = propeval::config_io::load_config(dmp_path)?;
    if let Some(seed) = args.seed {
        synth_cfg.seed = seed;
        dmp_cfg.seed = seed;
    }
    manifest.seeds = vec![synth_cfg.seed, dmp_cfg.seed];

    let (full, _) = generate_dataset(&synth_cfg)?;
    Ok(bias_capacity_simulation(
        &full,
        &args.seen_counts,
        &dmp_cfg,
        cfg,
    )?)
}

fn run_from_files(
    args: &BiasArgs,
    cfg: &propeval::metrics::EvaluationConfig,
    manifest: &mut RunManifest,
) -> Result<BiasCapacityResult, CliError> {
    let dataset_path = args.dataset.as_ref().expect("required by clap");
    let runs_path = args.runs.as_ref().expect("required by clap");
    manifest.add_input(dataset_path)?;
    manifest.add_input(runs_path)?;
    let dataset = load_dataset(dataset_path, args.dataset_format, args.voc_exclusive)?;

    let text = std::fs::read_to_string(runs_path)
        .map_err(|e| CliError::Input(format!("{}: {e}", runs_path.display())))?;
    let base_dir = runs_path.parent().unwrap_or(Path::new("."));
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    let mut runs = Vec::new();
    for record in reader.records() {
        let record =
            record.map_err(|e| CliError::Input(format!("{}: {e}", runs_path.display())))?;
        if record.len() != 2 {
            return Err(CliError::Input(format!(
                "{}: expected 2 columns `k,path`, found {}",
                runs_path.display(),
                record.len()
            )));
        }
        let k: usize = record[0].parse().map_err(|_| {
            CliError::Input(format!(
                "{}: `{}` is not a seen-count",
                runs_path.display(),
                &record[0]
            ))
        })?;
        let path = base_dir.join(&record[1]);
        manifest.add_input(&path)?;
        let set = load_proposal_file(&path)?;
        set.validate_for(&dataset)?;
        runs.push((k, set));
    }
    if runs.is_empty() {
        return Err(CliError::Input(format!(
            "{}: no runs listed",
            runs_path.display()
        )));
    }
    Ok(bias_capacity(&dataset, &runs, cfg)?)
}

fn emit_bias_svgs(out: &Path, body: &BiasCapacityResult) -> Result<(), CliError> {
    let chart = ChartSpec {
        title: "AUC vs proposals by seen-category count".into(),
        x_label: "proposals".into(),
        y_label: "auc".into(),
        log_x: true,
        series: body
            .per_seen_count
            .iter()
            .map(|run| Series {
                name: format!("seen={}", run.seen_count),
                points: run.auc_vs_budget.points.clone(),
            })
            .collect(),
    };
    write_output(
        &out.join("auc_vs_budget_by_seen_count.svg"),
        &render_line_chart(&chart),
    )?;

    let chart = ChartSpec {
        title: "AUC vs seen categories".into(),
        x_label: "seen categories".into(),
        y_label: "auc".into(),
        log_x: false,
        series: body
            .auc_vs_seen_count
            .iter()
            .map(|summary| Series {
                name: format!("M={}", summary.budget),
                points: summary.curve.points.clone(),
            })
            .collect(),
    };
    write_output(
        &out.join("auc_vs_seen_count.svg"),
        &render_line_chart(&chart),
    )?;

    let chart = ChartSpec {
        title: "AUC improvement from fewest to most seen categories".into(),
        x_label: "proposals".into(),
        y_label: "auc improvement".into(),
        log_x: true,
        series: vec![Series {
            name: "improvement".into(),
            points: body.improvement_vs_budget.points.clone(),
        }],
    };
    write_output(
        &out.join("improvement_vs_budget.svg"),
        &render_line_chart(&chart),
    )
}
