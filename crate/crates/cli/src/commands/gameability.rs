//! `propeval gameability`: three-regime evaluation with AUC drops and
//! ranking inversions.

use std::path::PathBuf;

use clap::Args;

use propeval::diagnostics::{three_regime_eval, GameabilityReport};

use super::{load_dataset, load_eval_config, load_proposal_file, resolve_subset, DatasetFormat};
use crate::error::CliError;
use crate::manifest::RunManifest;
use crate::plot::{render_line_chart, ChartSpec, Series};
use crate::report::{
    ensure_out_dir, report_to_string, slug_path, write_output, OutputFormats, Report,
};

#[derive(Debug, Args)]
pub struct GameabilityArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long, value_enum, default_value_t)]
    pub dataset_format: DatasetFormat,
    /// Annotated-subset category names, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub subset: Vec<String>,
    /// File with one category name per line (merged with --subset).
    #[arg(long)]
    pub subset_file: Option<PathBuf>,
    #[arg(long, required = true, num_args = 1..)]
    pub proposals: Vec<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub voc_exclusive: bool,
}

pub fn run(args: &GameabilityArgs, formats: &OutputFormats) -> Result<(), CliError> {
    let cfg = load_eval_config(args.config.as_ref())?;
    let dataset = load_dataset(&args.dataset, args.dataset_format, args.voc_exclusive)?;
    let subset = resolve_subset(&dataset, &args.subset, args.subset_file.as_ref())?;

    let mut manifest = RunManifest::new("gameability", serde_json::to_value(&cfg).unwrap());
    manifest.add_input(&args.dataset)?;
    if let Some(p) = &args.config {
        manifest.add_input(p)?;
    }
    if let Some(p) = &args.subset_file {
        manifest.add_input(p)?;
    }
    let mut sets = Vec::new();
    for path in &args.proposals {
        manifest.add_input(path)?;
        let set = load_proposal_file(path)?;
        set.validate_for(&dataset)?;
        sets.push(set);
    }

    let report_body = three_regime_eval(&dataset, &subset, &sets, &cfg)?;
    ensure_out_dir(&args.out)?;
    let report = Report {
        manifest,
        body: report_body,
    };

    if formats.json {
        write_output(
            &args.out.join("gameability_report.json"),
            &report_to_string(&report)?,
        )?;
    }
    if formats.csv {
        write_gameability_csv(&args.out, &report.body)?;
    }
    if formats.svg {
        emit_drop_svgs(&args.out, &report.body)?;
    }

    for inversion in &report.body.inversions {
        println!(
            "inversion at budget {}: {} vs {}",
            inversion.budget, inversion.method_a, inversion.method_b
        );
    }
    Ok(())
}

fn write_gameability_csv(out: &std::path::Path, body: &GameabilityReport) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "method",
        "budget",
        "auc_annotated_subset",
        "auc_complement",
        "auc_all",
        "drop",
    ])
    .map_err(CliError::internal)?;
    for method in &body.methods {
        for row in &method.per_budget {
            w.write_record([
                method.method.as_str(),
                &row.budget.to_string(),
                &format!("{}", row.auc_annotated_subset),
                &format!("{}", row.auc_complement),
                &format!("{}", row.auc_all),
                &format!("{}", row.drop),
            ])
            .map_err(CliError::internal)?;
        }
    }
    let bytes = w.into_inner().map_err(CliError::internal)?;
    write_output(
        &out.join("gameability_report.csv"),
        &String::from_utf8(bytes).map_err(CliError::internal)?,
    )?;

    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["budget", "method_a", "method_b"])
        .map_err(CliError::internal)?;
    for inv in &body.inversions {
        w.write_record([
            &inv.budget.to_string(),
            inv.method_a.as_str(),
            inv.method_b.as_str(),
        ])
        .map_err(CliError::internal)?;
    }
    let bytes = w.into_inner().map_err(CliError::internal)?;
    write_output(
        &out.join("inversions.csv"),
        &String::from_utf8(bytes).map_err(CliError::internal)?,
    )
}

fn emit_drop_svgs(out: &std::path::Path, body: &GameabilityReport) -> Result<(), CliError> {
    let drop_points = |m: &propeval::diagnostics::MethodGameability| {
        m.per_budget
            .iter()
            .map(|r| (r.budget as f64, r.drop))
            .collect::<Vec<_>>()
    };
    for method in &body.methods {
        let chart = ChartSpec {
            title: format!("{}: AUC drop (subset − complement)", method.method),
            x_label: "proposals".into(),
            y_label: "auc drop".into(),
            log_x: true,
            series: vec![Series {
                name: method.method.clone(),
                points: drop_points(method),
            }],
        };
        write_output(
            &slug_path(out, "drop_vs_budget_", &method.method, "svg"),
            &render_line_chart(&chart),
        )?;
    }
    let chart = ChartSpec {
        title: "AUC drop vs proposals".into(),
        x_label: "proposals".into(),
        y_label: "auc drop".into(),
        log_x: true,
        series: body
            .methods
            .iter()
            .map(|m| Series {
                name: m.method.clone(),
                points: drop_points(m),
            })
            .collect(),
    };
    write_output(&out.join("drop_vs_budget.svg"), &render_line_chart(&chart))
}
