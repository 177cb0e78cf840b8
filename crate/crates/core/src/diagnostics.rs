//! Gameability and bias-capacity diagnostics.
//!
//! * Three-regime evaluation: score every method on (a) only the annotated
//!   category subset, (b) only its complement, and (c) all categories, then
//!   report AUC drops between (a) and (b) and any ranking inversions. A
//!   method tuned to the annotated subset shines under (a) and collapses
//!   under (b); category-independent methods move together.
//! * Bias capacity: how measured AUC grows with the number of categories a
//!   method has "seen". Flat curves indicate category independence.
//! * Fine-grained recall: per-category recall ordered by object size or
//!   frequency, or grouped by supercategory.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::data_model::{DataError, Dataset, ProposalSet};
use crate::metrics::{
    auc, auc_vs_budget, best_overlaps_with, BestOverlapTable, CurveResult, EvaluationConfig,
    MetricsError,
};
use crate::proposers::{oracle_dmp, DmpConfig, ProposerError};
use crate::rng::{derive_seed, stage};

#[derive(Debug, Error)]
pub enum DiagnosticsError {
    #[error("invalid diagnostics input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Proposer(#[from] ProposerError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    AnnotatedSubset,
    Complement,
    All,
}

/// AUC of one method at one budget under the three regimes.
#[derive(Debug, Clone, Serialize)]
pub struct RegimeAuc {
    pub budget: usize,
    pub auc_annotated_subset: f64,
    pub auc_complement: f64,
    pub auc_all: f64,
    /// `auc_annotated_subset − auc_complement`, exactly.
    pub drop: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MethodGameability {
    pub method: String,
    pub per_budget: Vec<RegimeAuc>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RankingEntry {
    pub budget: usize,
    pub regime: Regime,
    /// Method names ordered by descending AUC (ties by name).
    pub ranking: Vec<String>,
}

/// A method pair whose order differs between the annotated-subset and
/// complement regimes at some budget.
#[derive(Debug, Clone, Serialize)]
pub struct Inversion {
    pub budget: usize,
    pub method_a: String,
    pub method_b: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct GameabilityReport {
    pub methods: Vec<MethodGameability>,
    pub rankings: Vec<RankingEntry>,
    pub inversions: Vec<Inversion>,
}

/// Run the full metric suite under the three regimes and report AUC drops
/// and ranking inversions per budget.
pub fn three_regime_eval(
    full: &Dataset,
    subset: &BTreeSet<u32>,
    proposals: &[ProposalSet],
    cfg: &EvaluationConfig,
) -> Result<GameabilityReport, DiagnosticsError> {
    cfg.validate()?;
    if subset.is_empty() {
        return Err(DiagnosticsError::InvalidInput(
            "annotated subset must be non-empty".into(),
        ));
    }
    let all_ids = full.all_category_ids();
    let complement: BTreeSet<u32> = all_ids.difference(subset).copied().collect();
    if complement.is_empty() {
        return Err(DiagnosticsError::InvalidInput(
            "annotated subset equals the whole category universe; no complement regime".into(),
        ));
    }
    if proposals.is_empty() {
        return Err(DiagnosticsError::InvalidInput(
            "no proposal sets given".into(),
        ));
    }
    let mut names = BTreeSet::new();
    for p in proposals {
        if !names.insert(p.method_name().to_string()) {
            return Err(DiagnosticsError::InvalidInput(format!(
                "duplicate method name `{}`",
                p.method_name()
            )));
        }
    }

    let subset_ds = full.restrict_categories(subset)?;
    let complement_ds = full.restrict_categories(&complement)?;
    let budgets = &cfg.proposal_budgets;

    let mut methods = Vec::with_capacity(proposals.len());
    for p in proposals {
        let table_subset = best_overlaps_with(&subset_ds, p, budgets, cfg.matching)?;
        let table_complement = best_overlaps_with(&complement_ds, p, budgets, cfg.matching)?;
        let table_all = best_overlaps_with(full, p, budgets, cfg.matching)?;
        let per_budget = budgets
            .iter()
            .map(|&m| {
                let auc_annotated_subset = auc(&table_subset, cfg, m)?;
                let auc_complement = auc(&table_complement, cfg, m)?;
                let auc_all = auc(&table_all, cfg, m)?;
                Ok(RegimeAuc {
                    budget: m,
                    auc_annotated_subset,
                    auc_complement,
                    auc_all,
                    drop: auc_annotated_subset - auc_complement,
                })
            })
            .collect::<Result<Vec<_>, MetricsError>>()?;
        methods.push(MethodGameability {
            method: p.method_name().to_string(),
            per_budget,
        });
    }
    methods.sort_by(|a, b| a.method.cmp(&b.method));

    let mut rankings = Vec::new();
    let mut inversions = Vec::new();
    for (budget_idx, &budget) in budgets.iter().enumerate() {
        let mut per_regime_positions: BTreeMap<Regime, BTreeMap<&str, usize>> = BTreeMap::new();
        for regime in [Regime::AnnotatedSubset, Regime::Complement, Regime::All] {
            let value = |m: &MethodGameability| match regime {
                Regime::AnnotatedSubset => m.per_budget[budget_idx].auc_annotated_subset,
                Regime::Complement => m.per_budget[budget_idx].auc_complement,
                Regime::All => m.per_budget[budget_idx].auc_all,
            };
            let mut order: Vec<&MethodGameability> = methods.iter().collect();
            order.sort_by(|a, b| value(b).total_cmp(&value(a)).then(a.method.cmp(&b.method)));
            per_regime_positions.insert(
                regime,
                order
                    .iter()
                    .enumerate()
                    .map(|(pos, m)| (m.method.as_str(), pos))
                    .collect(),
            );
            rankings.push(RankingEntry {
                budget,
                regime,
                ranking: order.iter().map(|m| m.method.clone()).collect(),
            });
        }
        let subset_pos = &per_regime_positions[&Regime::AnnotatedSubset];
        let complement_pos = &per_regime_positions[&Regime::Complement];
        for (i, a) in methods.iter().enumerate() {
            for b in &methods[i + 1..] {
                let sub_order = subset_pos[a.method.as_str()] < subset_pos[b.method.as_str()];
                let comp_order =
                    complement_pos[a.method.as_str()] < complement_pos[b.method.as_str()];
                if sub_order != comp_order {
                    inversions.push(Inversion {
                        budget,
                        method_a: a.method.clone(),
                        method_b: b.method.clone(),
                    });
                }
            }
        }
    }

    Ok(GameabilityReport {
        methods,
        rankings,
        inversions,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SeenCountCurve {
    pub seen_count: usize,
    pub method: String,
    pub auc_vs_budget: CurveResult,
}

#[derive(Debug, Clone, Serialize)]
pub struct BudgetSummaryCurve {
    pub budget: usize,
    /// AUC at this budget as a function of the seen-category count.
    pub curve: CurveResult,
}

#[derive(Debug, Clone, Serialize)]
pub struct BiasCapacityResult {
    pub per_seen_count: Vec<SeenCountCurve>,
    pub auc_vs_seen_count: Vec<BudgetSummaryCurve>,
    /// `auc(k_max, M) − auc(k_min, M)` as a function of the budget M.
    pub improvement_vs_budget: CurveResult,
}

/// Evaluate runs produced with varying numbers of seen categories against
/// the fully annotated dataset. The result does not depend on the order in
/// which runs are supplied.
pub fn bias_capacity(
    full: &Dataset,
    runs: &[(usize, ProposalSet)],
    cfg: &EvaluationConfig,
) -> Result<BiasCapacityResult, DiagnosticsError> {
    cfg.validate()?;
    let mut seen = BTreeSet::new();
    for (k, _) in runs {
        if !seen.insert(*k) {
            return Err(DiagnosticsError::InvalidInput(format!(
                "duplicate seen-count {k}"
            )));
        }
    }
    if runs.len() < 2 {
        return Err(DiagnosticsError::InvalidInput(format!(
            "need at least 2 distinct seen-counts, found {}",
            runs.len()
        )));
    }

    let mut ordered: Vec<&(usize, ProposalSet)> = runs.iter().collect();
    ordered.sort_by_key(|(k, _)| *k);

    let budgets = &cfg.proposal_budgets;
    let mut per_seen_count = Vec::with_capacity(ordered.len());
    let mut auc_by_run: Vec<Vec<f64>> = Vec::with_capacity(ordered.len());
    for (k, p) in &ordered {
        let table = best_overlaps_with(full, p, budgets, cfg.matching)?;
        let curve = auc_vs_budget(&table, cfg)?;
        auc_by_run.push(curve.points.iter().map(|(_, y)| *y).collect());
        per_seen_count.push(SeenCountCurve {
            seen_count: *k,
            method: p.method_name().to_string(),
            auc_vs_budget: curve,
        });
    }

    let mut auc_vs_seen_count = Vec::with_capacity(budgets.len());
    for (b_idx, &budget) in budgets.iter().enumerate() {
        let points: Vec<(f64, f64)> = ordered
            .iter()
            .zip(&auc_by_run)
            .map(|((k, _), aucs)| (*k as f64, aucs[b_idx]))
            .collect();
        let mut meta = BTreeMap::new();
        meta.insert("budget".to_string(), budget.to_string());
        auc_vs_seen_count.push(BudgetSummaryCurve {
            budget,
            curve: CurveResult::new("seen_categories", "auc", points, "bias_capacity", meta),
        });
    }

    let first = &auc_by_run[0];
    let last = &auc_by_run[auc_by_run.len() - 1];
    let improvement_points: Vec<(f64, f64)> = budgets
        .iter()
        .enumerate()
        .map(|(i, &m)| (m as f64, last[i] - first[i]))
        .collect();
    let mut meta = BTreeMap::new();
    meta.insert("k_min".to_string(), ordered[0].0.to_string());
    meta.insert(
        "k_max".to_string(),
        ordered[ordered.len() - 1].0.to_string(),
    );
    let improvement_vs_budget = CurveResult::new(
        "proposals",
        "auc_improvement",
        improvement_points,
        "bias_capacity",
        meta,
    );

    Ok(BiasCapacityResult {
        per_seen_count,
        auc_vs_seen_count,
        improvement_vs_budget,
    })
}

/// Simulation mode: the runs are produced internally by the oracle DMP with
/// `seen = first k categories`, one derived seed per k.
pub fn bias_capacity_simulation(
    full: &Dataset,
    seen_counts: &[usize],
    base: &DmpConfig,
    cfg: &EvaluationConfig,
) -> Result<BiasCapacityResult, DiagnosticsError> {
    let num_categories = full.categories().len();
    let mut runs = Vec::with_capacity(seen_counts.len());
    for &k in seen_counts {
        if k > num_categories {
            return Err(DiagnosticsError::InvalidInput(format!(
                "seen-count {k} exceeds the {num_categories} categories"
            )));
        }
        let dmp_cfg = DmpConfig {
            seen_categories: (0..k as u32).collect(),
            seed: derive_seed(base.seed, stage::BIAS_CAPACITY_RUN, k as u64),
            ..base.clone()
        };
        let set = oracle_dmp(full, &dmp_cfg)?.with_method_name(format!("dmp_seen_{k:02}"));
        runs.push((k, set));
    }
    bias_capacity(full, &runs, cfg)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FineGrainedKey {
    Size,
    Frequency,
    Supercategory,
}

/// How a category's characteristic size is summarized for the `size` key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SizeMetric {
    /// Mean of sqrt(box area / image area): linear object scale.
    #[default]
    MeanSqrtRelativeArea,
    /// Mean of box area / image area.
    MeanRelativeArea,
}

#[derive(Debug, Clone, Serialize)]
pub struct FineGrainedOptions {
    pub key: FineGrainedKey,
    pub iou_threshold: f64,
    pub budget: usize,
    pub size_metric: SizeMetric,
}

impl FineGrainedOptions {
    pub fn new(key: FineGrainedKey, budget: usize) -> Self {
        Self {
            key,
            iou_threshold: 0.7,
            budget,
            size_metric: SizeMetric::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FineGrainedRow {
    /// Category name, or supercategory name for grouped output.
    pub label: String,
    /// The ordering key: mean size, instance count, or group instance count.
    pub key_value: f64,
    pub recall: f64,
    pub instance_count: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct FineGrainedReport {
    pub key: FineGrainedKey,
    pub iou_threshold: f64,
    pub budget: usize,
    pub rows: Vec<FineGrainedRow>,
    /// Recall against the row rank (1-based), in row order.
    pub curve: CurveResult,
}

/// Per-category recall@t at one budget, ordered by size or frequency, or
/// grouped by supercategory with instance-weighted group recall.
/// Categories without instances are omitted.
pub fn fine_grained_recall(
    full: &Dataset,
    proposals: &ProposalSet,
    cfg: &EvaluationConfig,
    opts: &FineGrainedOptions,
) -> Result<FineGrainedReport, DiagnosticsError> {
    cfg.validate()?;
    if opts.budget == 0 {
        return Err(DiagnosticsError::InvalidInput(
            "budget must be positive".into(),
        ));
    }
    if !(opts.iou_threshold > 0.0 && opts.iou_threshold <= 1.0) {
        return Err(DiagnosticsError::InvalidInput(format!(
            "iou threshold {} outside (0, 1]",
            opts.iou_threshold
        )));
    }
    let table = best_overlaps_with(full, proposals, &[opts.budget], cfg.matching)?;

    let mut rows = match opts.key {
        FineGrainedKey::Size | FineGrainedKey::Frequency => {
            per_category_rows(full, &table, cfg, opts)?
        }
        FineGrainedKey::Supercategory => supercategory_rows(full, &table, cfg, opts)?,
    };

    match opts.key {
        FineGrainedKey::Size | FineGrainedKey::Frequency => {
            rows.sort_by(|a, b| {
                a.key_value
                    .total_cmp(&b.key_value)
                    .then(a.label.cmp(&b.label))
            });
        }
        FineGrainedKey::Supercategory => rows.sort_by(|a, b| a.label.cmp(&b.label)),
    }

    let points: Vec<(f64, f64)> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| ((i + 1) as f64, r.recall))
        .collect();
    let mut meta = BTreeMap::new();
    meta.insert("key".to_string(), format!("{:?}", opts.key));
    meta.insert(
        "iou_threshold".to_string(),
        format!("{}", opts.iou_threshold),
    );
    meta.insert("budget".to_string(), opts.budget.to_string());
    meta.insert(
        "labels".to_string(),
        rows.iter()
            .map(|r| r.label.as_str())
            .collect::<Vec<_>>()
            .join(","),
    );
    let curve = CurveResult::new(
        "category_rank",
        "recall",
        points,
        proposals.method_name(),
        meta,
    );

    Ok(FineGrainedReport {
        key: opts.key,
        iou_threshold: opts.iou_threshold,
        budget: opts.budget,
        rows,
        curve,
    })
}

fn category_recall(
    table: &BestOverlapTable,
    cfg: &EvaluationConfig,
    t: f64,
    category_id: u32,
) -> (usize, f64) {
    let hits_and_counts = table
        .rows()
        .iter()
        .filter(|r| r.category_id == category_id)
        .fold((0usize, 0usize), |(hits, n), r| {
            let hit = cfg.threshold_comparison.passes(r.best[0], t);
            (hits + usize::from(hit), n + 1)
        });
    let (hits, n) = hits_and_counts;
    (n, if n == 0 { 0.0 } else { hits as f64 / n as f64 })
}

fn per_category_rows(
    full: &Dataset,
    table: &BestOverlapTable,
    cfg: &EvaluationConfig,
    opts: &FineGrainedOptions,
) -> Result<Vec<FineGrainedRow>, DiagnosticsError> {
    let mut rows = Vec::new();
    for cat in full.categories() {
        let (count, recall) = category_recall(table, cfg, opts.iou_threshold, cat.id);
        if count == 0 {
            continue;
        }
        let key_value = match opts.key {
            FineGrainedKey::Frequency => count as f64,
            FineGrainedKey::Size => {
                let sum: f64 = full
                    .instances()
                    .iter()
                    .filter(|i| i.category_id == cat.id)
                    .map(|i| {
                        let image = full.image(&i.image_id).expect("validated");
                        let rel = i.bbox.area() / image.area();
                        match opts.size_metric {
                            SizeMetric::MeanSqrtRelativeArea => rel.sqrt(),
                            SizeMetric::MeanRelativeArea => rel,
                        }
                    })
                    .sum();
                sum / count as f64
            }
            FineGrainedKey::Supercategory => unreachable!("handled separately"),
        };
        rows.push(FineGrainedRow {
            label: cat.name.clone(),
            key_value,
            recall,
            instance_count: count,
        });
    }
    Ok(rows)
}

fn supercategory_rows(
    full: &Dataset,
    table: &BestOverlapTable,
    cfg: &EvaluationConfig,
    opts: &FineGrainedOptions,
) -> Result<Vec<FineGrainedRow>, DiagnosticsError> {
    let mut category_groups: BTreeMap<u32, &str> = BTreeMap::new();
    for cat in full.categories() {
        let has_instances = full.instances().iter().any(|i| i.category_id == cat.id);
        if !has_instances {
            continue;
        }
        match &cat.supercategory {
            Some(s) => {
                category_groups.insert(cat.id, s.as_str());
            }
            None => {
                return Err(DiagnosticsError::InvalidInput(format!(
                    "category `{}` has no supercategory; supply a supercategory map",
                    cat.name
                )));
            }
        }
    }
    let mut groups: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    for row in table.rows() {
        let group = category_groups
            .get(&row.category_id)
            .expect("instances imply grouping");
        let hit = cfg
            .threshold_comparison
            .passes(row.best[0], opts.iou_threshold);
        let entry = groups.entry(group).or_insert((0, 0));
        entry.0 += usize::from(hit);
        entry.1 += 1;
    }
    Ok(groups
        .into_iter()
        .map(|(name, (hits, count))| FineGrainedRow {
            label: name.to_string(),
            key_value: count as f64,
            recall: hits as f64 / count as f64,
            instance_count: count,
        })
        .collect())
}
