//! Scalar metrics and curves computed from a best-overlap table.
//!
//! Recall, AUC, ABO and MABO follow the grid semantics of the evaluation
//! protocol directly. Average recall and VUS integrate the empirical recall
//! step function analytically over the threshold axis (the exact limit of
//! trapezoidal integration as the grid step goes to zero), which keeps them
//! within any fine-grid reference tolerance.

use std::collections::BTreeMap;

use super::{BestOverlapTable, CurveResult, EvaluationConfig, MetricsError, ThresholdComparison};

fn base_metadata(cfg: &EvaluationConfig, table: &BestOverlapTable) -> BTreeMap<String, String> {
    let mut meta = BTreeMap::new();
    meta.insert(
        "threshold_comparison".to_string(),
        format!("{:?}", cfg.threshold_comparison),
    );
    meta.insert("matching".to_string(), format!("{:?}", cfg.matching));
    meta.insert(
        "budgets".to_string(),
        table
            .budgets()
            .iter()
            .map(|b| b.to_string())
            .collect::<Vec<_>>()
            .join(","),
    );
    meta
}

/// Fraction of instances whose best IOU at budget `m` passes threshold `t`.
///
/// An empty table (no ground truth) yields 0 with a warning rather than NaN.
pub fn recall_at(
    table: &BestOverlapTable,
    t: f64,
    m: usize,
    comparison: ThresholdComparison,
) -> Result<f64, MetricsError> {
    let idx = table.budget_index(m)?;
    let rows = table.rows();
    if rows.is_empty() {
        log::warn!("recall over an empty ground-truth set defined as 0");
        return Ok(0.0);
    }
    let hits = rows
        .iter()
        .filter(|r| comparison.passes(r.best[idx], t))
        .count();
    Ok(hits as f64 / rows.len() as f64)
}

/// Recall sampled over the configured budgets at a fixed threshold.
pub fn recall_vs_budget(
    table: &BestOverlapTable,
    cfg: &EvaluationConfig,
    t: f64,
) -> Result<CurveResult, MetricsError> {
    let points = table
        .budgets()
        .iter()
        .map(|&m| Ok((m as f64, recall_at(table, t, m, cfg.threshold_comparison)?)))
        .collect::<Result<Vec<_>, MetricsError>>()?;
    let mut meta = base_metadata(cfg, table);
    meta.insert("iou_threshold".to_string(), format!("{t}"));
    Ok(CurveResult::new(
        "proposals",
        "recall",
        points,
        table.method_name(),
        meta,
    ))
}

/// Recall sampled over the configured thresholds at a fixed budget.
pub fn recall_vs_threshold(
    table: &BestOverlapTable,
    cfg: &EvaluationConfig,
    m: usize,
) -> Result<CurveResult, MetricsError> {
    let points = cfg
        .iou_thresholds
        .iter()
        .map(|&t| Ok((t, recall_at(table, t, m, cfg.threshold_comparison)?)))
        .collect::<Result<Vec<_>, MetricsError>>()?;
    let mut meta = base_metadata(cfg, table);
    meta.insert("budget".to_string(), m.to_string());
    Ok(CurveResult::new(
        "iou_threshold",
        "recall",
        points,
        table.method_name(),
        meta,
    ))
}

fn trapezoid(points: &[(f64, f64)]) -> f64 {
    points
        .windows(2)
        .map(|p| (p[1].0 - p[0].0) * (p[0].1 + p[1].1) / 2.0)
        .sum()
}

/// Area under the recall-vs-threshold curve at budget `m`, over the
/// configured threshold window, normalized to [0, 1].
///
/// Integration uses the configured threshold grid restricted to
/// `auc_threshold_range` and is normalized by the span of the grid points
/// used (equal to the range width whenever the grid covers the range, as
/// the default grid does).
pub fn auc(
    table: &BestOverlapTable,
    cfg: &EvaluationConfig,
    m: usize,
) -> Result<f64, MetricsError> {
    let [lo, hi] = cfg.auc_threshold_range;
    let grid: Vec<f64> = cfg
        .iou_thresholds
        .iter()
        .copied()
        .filter(|&t| t >= lo && t <= hi)
        .collect();
    if grid.len() < 2 {
        return Err(MetricsError::InsufficientGrid {
            axis: "iou_threshold",
            found: grid.len(),
        });
    }
    let points = grid
        .iter()
        .map(|&t| Ok((t, recall_at(table, t, m, cfg.threshold_comparison)?)))
        .collect::<Result<Vec<_>, MetricsError>>()?;
    let span = grid[grid.len() - 1] - grid[0];
    Ok(trapezoid(&points) / span)
}

/// AUC sampled over the configured budgets.
pub fn auc_vs_budget(
    table: &BestOverlapTable,
    cfg: &EvaluationConfig,
) -> Result<CurveResult, MetricsError> {
    let points = table
        .budgets()
        .iter()
        .map(|&m| Ok((m as f64, auc(table, cfg, m)?)))
        .collect::<Result<Vec<_>, MetricsError>>()?;
    let mut meta = base_metadata(cfg, table);
    meta.insert(
        "auc_threshold_range".to_string(),
        format!(
            "{},{}",
            cfg.auc_threshold_range[0], cfg.auc_threshold_range[1]
        ),
    );
    Ok(CurveResult::new(
        "proposals",
        "auc",
        points,
        table.method_name(),
        meta,
    ))
}

/// Average best overlap at budget `m`: the mean best IOU over instances,
/// optionally restricted to one category.
pub fn abo(table: &BestOverlapTable, category: Option<u32>, m: usize) -> Result<f64, MetricsError> {
    let idx = table.budget_index(m)?;
    let (sum, count) = table
        .rows()
        .iter()
        .filter(|r| category.is_none_or(|c| r.category_id == c))
        .fold((0.0f64, 0usize), |(s, n), r| (s + r.best[idx], n + 1));
    if count == 0 {
        log::warn!("abo over an empty instance set defined as 0");
        return Ok(0.0);
    }
    Ok(sum / count as f64)
}

/// Mean ABO over the classes that have at least one instance
/// (class-balanced, not instance-weighted).
pub fn mabo(table: &BestOverlapTable, m: usize) -> Result<f64, MetricsError> {
    let idx = table.budget_index(m)?;
    let mut per_class: BTreeMap<u32, (f64, usize)> = BTreeMap::new();
    for row in table.rows() {
        let entry = per_class.entry(row.category_id).or_insert((0.0, 0));
        entry.0 += row.best[idx];
        entry.1 += 1;
    }
    if per_class.is_empty() {
        log::warn!("mabo over an empty table defined as 0");
        return Ok(0.0);
    }
    let sum: f64 = per_class.values().map(|(s, n)| s / *n as f64).sum();
    Ok(sum / per_class.len() as f64)
}

/// Exact integral of the empirical recall step function over
/// `t ∈ [lo, hi]`, divided by the window width.
///
/// For a single instance, recall contributes `clamp(best − lo, 0, hi − lo)`
/// to the unnormalized integral; strict and non-strict comparisons differ
/// only on a measure-zero set, so the value is comparison-independent.
fn mean_recall_over_window(table: &BestOverlapTable, budget_idx: usize, lo: f64, hi: f64) -> f64 {
    let rows = table.rows();
    if rows.is_empty() {
        log::warn!("average recall over an empty ground-truth set defined as 0");
        return 0.0;
    }
    let width = hi - lo;
    let sum: f64 = rows
        .iter()
        .map(|r| (r.best[budget_idx] - lo).clamp(0.0, width))
        .sum();
    sum / (rows.len() as f64 * width)
}

/// Average recall at budget `m`: mean recall over IOU thresholds in
/// `[0.5, 1.0]`, computed in closed form.
pub fn average_recall(table: &BestOverlapTable, m: usize) -> Result<f64, MetricsError> {
    let idx = table.budget_index(m)?;
    Ok(mean_recall_over_window(table, idx, 0.5, 1.0))
}

/// Average recall sampled over the configured budgets.
pub fn ar_vs_budget(
    table: &BestOverlapTable,
    cfg: &EvaluationConfig,
) -> Result<CurveResult, MetricsError> {
    let points = table
        .budgets()
        .iter()
        .map(|&m| Ok((m as f64, average_recall(table, m)?)))
        .collect::<Result<Vec<_>, MetricsError>>()?;
    Ok(CurveResult::new(
        "proposals",
        "average_recall",
        points,
        table.method_name(),
        base_metadata(cfg, table),
    ))
}

/// Volume under the recall surface: mean recall over the threshold window
/// (exact in t) integrated over the budget axis (linear or log positions)
/// by trapezoid, normalized to [0, 1].
pub fn vus(table: &BestOverlapTable, cfg: &EvaluationConfig) -> Result<f64, MetricsError> {
    if table.budgets().len() < 2 {
        return Err(MetricsError::InsufficientGrid {
            axis: "budget",
            found: table.budgets().len(),
        });
    }
    if cfg.iou_thresholds.len() < 2 {
        return Err(MetricsError::InsufficientGrid {
            axis: "iou_threshold",
            found: cfg.iou_thresholds.len(),
        });
    }
    let [lo, hi] = cfg.auc_threshold_range;
    let points: Vec<(f64, f64)> = table
        .budgets()
        .iter()
        .enumerate()
        .map(|(idx, &m)| {
            (
                cfg.budget_axis.position(m),
                mean_recall_over_window(table, idx, lo, hi),
            )
        })
        .collect();
    let span = points[points.len() - 1].0 - points[0].0;
    Ok(trapezoid(&points) / span)
}
