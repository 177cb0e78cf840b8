//! `propeval eval`: run the metric suite for one or more proposal files
//! against a dataset and emit JSON/CSV reports plus SVG curve plots.

use std::path::PathBuf;

use clap::Args;
use serde::Serialize;

use propeval::metrics::{
    abo, ar_vs_budget, auc, auc_vs_budget, average_recall, best_overlaps_with, mabo,
    recall_vs_budget, recall_vs_threshold, vus, BudgetAxis, CurveResult, EvaluationConfig,
};

use super::{load_dataset, load_eval_config, load_proposal_file, DatasetFormat};
use crate::error::CliError;
use crate::manifest::RunManifest;
use crate::plot::{render_line_chart, ChartSpec, Series};
use crate::report::{
    curve_csv_rows, ensure_out_dir, report_to_string, slug_path, write_curve_csv, write_output,
    OutputFormats, Report,
};

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Ground-truth dataset file (or VOC directory).
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long, value_enum, default_value_t)]
    pub dataset_format: DatasetFormat,
    /// One or more proposal files (.csv or .json).
    #[arg(long, required = true, num_args = 1..)]
    pub proposals: Vec<PathBuf>,
    /// Evaluation config (.toml or .json); defaults are used when absent.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    /// Treat VOC xmax/ymax as exclusive (skip the +1 shift).
    #[arg(long)]
    pub voc_exclusive: bool,
}

#[derive(Serialize)]
struct EvalBody {
    methods: Vec<MethodReport>,
}

#[derive(Serialize)]
struct MethodReport {
    method: String,
    scalars: ScalarMetrics,
    curves: Vec<NamedCurve>,
}

#[derive(Serialize)]
struct ScalarMetrics {
    per_budget: Vec<BudgetScalars>,
    /// Volume under the recall surface; absent when an axis has < 2 samples.
    vus: Option<f64>,
}

#[derive(Serialize)]
struct BudgetScalars {
    budget: usize,
    auc: f64,
    average_recall: f64,
    abo: f64,
    mabo: f64,
}

#[derive(Serialize)]
pub(crate) struct NamedCurve {
    pub id: String,
    #[serde(flatten)]
    pub curve: CurveResult,
}

pub fn run(args: &EvalArgs, formats: &OutputFormats) -> Result<(), CliError> {
    let cfg = load_eval_config(args.config.as_ref())?;
    let dataset = load_dataset(&args.dataset, args.dataset_format, args.voc_exclusive)?;

    let mut manifest = RunManifest::new("eval", serde_json::to_value(&cfg).unwrap());
    manifest.add_input(&args.dataset)?;
    if let Some(config_path) = &args.config {
        manifest.add_input(config_path)?;
    }

    let mut proposal_sets = Vec::new();
    for path in &args.proposals {
        manifest.add_input(path)?;
        let set = load_proposal_file(path)?;
        set.validate_for(&dataset)?;
        if proposal_sets
            .iter()
            .any(|p: &propeval::data_model::ProposalSet| p.method_name() == set.method_name())
        {
            return Err(CliError::Input(format!(
                "duplicate method name `{}`",
                set.method_name()
            )));
        }
        proposal_sets.push(set);
    }

    let cap = proposal_sets
        .iter()
        .map(|p| p.max_proposals_per_image())
        .max()
        .unwrap_or(0);
    let budgets = cfg.budgets_capped(cap.max(1));

    let mut methods = Vec::new();
    for set in &proposal_sets {
        let table = best_overlaps_with(&dataset, set, &budgets, cfg.matching)?;
        let mut per_budget = Vec::new();
        for &m in &budgets {
            per_budget.push(BudgetScalars {
                budget: m,
                auc: auc(&table, &cfg, m)?,
                average_recall: average_recall(&table, m)?,
                abo: abo(&table, None, m)?,
                mabo: mabo(&table, m)?,
            });
        }
        let vus_value = if budgets.len() >= 2 && cfg.iou_thresholds.len() >= 2 {
            Some(vus(&table, &cfg)?)
        } else {
            None
        };

        let mut curves = Vec::new();
        for &t in &cfg.iou_thresholds {
            curves.push(NamedCurve {
                id: format!("recall_vs_budget@t={t}"),
                curve: recall_vs_budget(&table, &cfg, t)?,
            });
        }
        for &m in &budgets {
            curves.push(NamedCurve {
                id: format!("recall_vs_threshold@M={m}"),
                curve: recall_vs_threshold(&table, &cfg, m)?,
            });
        }
        curves.push(NamedCurve {
            id: "auc_vs_budget".into(),
            curve: auc_vs_budget(&table, &cfg)?,
        });
        curves.push(NamedCurve {
            id: "ar_vs_budget".into(),
            curve: ar_vs_budget(&table, &cfg)?,
        });

        methods.push(MethodReport {
            method: set.method_name().to_string(),
            scalars: ScalarMetrics {
                per_budget,
                vus: vus_value,
            },
            curves,
        });
    }
    methods.sort_by(|a, b| a.method.cmp(&b.method));

    ensure_out_dir(&args.out)?;
    let report = Report {
        manifest,
        body: EvalBody { methods },
    };
    if formats.json {
        write_output(
            &args.out.join("eval_report.json"),
            &report_to_string(&report)?,
        )?;
    }
    if formats.csv {
        let mut rows = Vec::new();
        for method in &report.body.methods {
            for named in &method.curves {
                rows.extend(curve_csv_rows(&method.method, &named.curve, &named.id));
            }
        }
        write_curve_csv(&args.out.join("eval_report.csv"), &rows)?;
    }
    if formats.svg {
        emit_eval_svgs(&args.out, &report.body, &cfg, &budgets)?;
    }
    Ok(())
}

fn emit_eval_svgs(
    out: &std::path::Path,
    body: &EvalBody,
    cfg: &EvaluationConfig,
    budgets: &[usize],
) -> Result<(), CliError> {
    let log_budgets = cfg.budget_axis == BudgetAxis::Log;
    for method in &body.methods {
        let recall_budget: Vec<Series> = cfg
            .iou_thresholds
            .iter()
            .map(|t| {
                let id = format!("recall_vs_budget@t={t}");
                let curve = &method.curves.iter().find(|c| c.id == id).unwrap().curve;
                Series {
                    name: format!("t={t}"),
                    points: curve.points.clone(),
                }
            })
            .collect();
        let chart = ChartSpec {
            title: format!("{}: recall vs proposals", method.method),
            x_label: "proposals".into(),
            y_label: "recall".into(),
            log_x: log_budgets,
            series: recall_budget,
        };
        write_output(
            &slug_path(out, "recall_vs_budget_", &method.method, "svg"),
            &render_line_chart(&chart),
        )?;

        let recall_threshold: Vec<Series> = budgets
            .iter()
            .map(|m| {
                let id = format!("recall_vs_threshold@M={m}");
                let curve = &method.curves.iter().find(|c| c.id == id).unwrap().curve;
                Series {
                    name: format!("M={m}"),
                    points: curve.points.clone(),
                }
            })
            .collect();
        let chart = ChartSpec {
            title: format!("{}: recall vs IOU threshold", method.method),
            x_label: "iou threshold".into(),
            y_label: "recall".into(),
            log_x: false,
            series: recall_threshold,
        };
        write_output(
            &slug_path(out, "recall_vs_threshold_", &method.method, "svg"),
            &render_line_chart(&chart),
        )?;
    }

    for (curve_id, title, file) in [
        ("auc_vs_budget", "AUC vs proposals", "auc_vs_budget.svg"),
        (
            "ar_vs_budget",
            "average recall vs proposals",
            "ar_vs_budget.svg",
        ),
    ] {
        let series: Vec<Series> = body
            .methods
            .iter()
            .map(|m| Series {
                name: m.method.clone(),
                points: m
                    .curves
                    .iter()
                    .find(|c| c.id == curve_id)
                    .unwrap()
                    .curve
                    .points
                    .clone(),
            })
            .collect();
        let chart = ChartSpec {
            title: title.into(),
            x_label: "proposals".into(),
            y_label: curve_id.split("_vs_").next().unwrap_or("value").into(),
            log_x: log_budgets,
            series,
        };
        write_output(&out.join(file), &render_line_chart(&chart))?;
    }
    Ok(())
}
