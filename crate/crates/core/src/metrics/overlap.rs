//! Best-overlap tables: for every ground-truth instance, the maximum IOU
//! against the top-M proposals of its image, materialized for every
//! configured budget M.

use rayon::prelude::*;

use crate::data_model::{Dataset, ProposalSet};
use crate::geometry::{iou, ScoredBox};

use super::{MatchingMode, MetricsError};

/// One ground-truth instance's best overlaps across budgets.
#[derive(Debug, Clone)]
pub struct OverlapRow {
    pub instance_id: u64,
    pub image_id: String,
    pub category_id: u32,
    /// `best[i]` is the best IOU within the top `budgets[i]` proposals;
    /// non-decreasing in the budget index.
    pub best: Vec<f64>,
}

/// Best IOU per instance per budget for one proposal method.
#[derive(Debug, Clone)]
pub struct BestOverlapTable {
    method_name: String,
    budgets: Vec<usize>,
    rows: Vec<OverlapRow>,
}

impl BestOverlapTable {
    pub fn method_name(&self) -> &str {
        &self.method_name
    }

    pub fn budgets(&self) -> &[usize] {
        &self.budgets
    }

    pub fn rows(&self) -> &[OverlapRow] {
        &self.rows
    }

    pub fn budget_index(&self, budget: usize) -> Result<usize, MetricsError> {
        self.budgets
            .iter()
            .position(|&m| m == budget)
            .ok_or(MetricsError::BudgetNotMaterialized(budget))
    }

    /// Best IOUs of every instance at the given budget, in table order.
    pub fn best_at(&self, budget: usize) -> Result<impl Iterator<Item = f64> + '_, MetricsError> {
        let idx = self.budget_index(budget)?;
        Ok(self.rows.iter().map(move |r| r.best[idx]))
    }

    /// Assemble a table directly from per-instance best values (used by
    /// tests and by callers that precompute overlaps).
    pub fn from_rows(
        method_name: impl Into<String>,
        budgets: Vec<usize>,
        rows: Vec<OverlapRow>,
    ) -> Self {
        Self {
            method_name: method_name.into(),
            budgets,
            rows,
        }
    }
}

/// Compute the best-overlap table for `budgets` (which must be strictly
/// increasing).
///
/// A single proposal may be the best match for several instances; the
/// greedy one-to-one alternative is selected with
/// [`best_overlaps_with`]. Images without proposals yield all-zero rows.
/// Budgets larger than an image's proposal list use the whole list.
///
/// Work is parallelized over images and merged in ascending image-id
/// order, so results are identical for any thread count.
pub fn best_overlaps(
    dataset: &Dataset,
    proposals: &ProposalSet,
    budgets: &[usize],
) -> Result<BestOverlapTable, MetricsError> {
    best_overlaps_with(dataset, proposals, budgets, MatchingMode::IndependentMax)
}

pub fn best_overlaps_with(
    dataset: &Dataset,
    proposals: &ProposalSet,
    budgets: &[usize],
    matching: MatchingMode,
) -> Result<BestOverlapTable, MetricsError> {
    if budgets.is_empty() {
        return Err(MetricsError::InvalidConfig("no budgets requested".into()));
    }
    for pair in budgets.windows(2) {
        if pair[1] <= pair[0] {
            return Err(MetricsError::InvalidConfig(
                "budgets must be strictly increasing".into(),
            ));
        }
    }
    if budgets[0] == 0 {
        return Err(MetricsError::InvalidConfig(
            "budgets must be positive".into(),
        ));
    }

    let by_image: Vec<(&str, Vec<&crate::data_model::GroundTruthInstance>)> =
        dataset.instances_by_image().into_iter().collect();

    let rows: Vec<OverlapRow> = by_image
        .par_iter()
        .flat_map_iter(|(image_id, instances)| {
            let candidates = proposals.proposals(image_id);
            image_rows(instances, candidates, budgets, matching).into_iter()
        })
        .collect();

    Ok(BestOverlapTable {
        method_name: proposals.method_name().to_string(),
        budgets: budgets.to_vec(),
        rows,
    })
}

fn image_rows(
    instances: &[&crate::data_model::GroundTruthInstance],
    candidates: &[ScoredBox],
    budgets: &[usize],
    matching: MatchingMode,
) -> Vec<OverlapRow> {
    match matching {
        MatchingMode::IndependentMax => instances
            .iter()
            .map(|inst| {
                let mut best = Vec::with_capacity(budgets.len());
                let mut running = 0.0f64;
                let mut next = 0usize;
                for &budget in budgets {
                    let until = budget.min(candidates.len());
                    while next < until {
                        let v = iou(&inst.bbox, candidates[next].bbox());
                        if v > running {
                            running = v;
                        }
                        next += 1;
                    }
                    best.push(running);
                }
                OverlapRow {
                    instance_id: inst.instance_id,
                    image_id: inst.image_id.clone(),
                    category_id: inst.category_id,
                    best,
                }
            })
            .collect(),
        MatchingMode::GreedyOneToOne => one_to_one_rows(instances, candidates, budgets),
    }
}

/// Greedy one-to-one matching, recomputed independently per budget:
/// instances are processed in descending order of their unconstrained best
/// IOU (ties by ascending instance id) and each takes the best surviving
/// proposal, consuming it. Zero-overlap instances consume nothing.
fn one_to_one_rows(
    instances: &[&crate::data_model::GroundTruthInstance],
    candidates: &[ScoredBox],
    budgets: &[usize],
) -> Vec<OverlapRow> {
    let mut rows: Vec<OverlapRow> = instances
        .iter()
        .map(|inst| OverlapRow {
            instance_id: inst.instance_id,
            image_id: inst.image_id.clone(),
            category_id: inst.category_id,
            best: Vec::with_capacity(budgets.len()),
        })
        .collect();

    for &budget in budgets {
        let pool = &candidates[..budget.min(candidates.len())];
        // unconstrained best per instance, used for the processing order
        let unconstrained: Vec<f64> = instances
            .iter()
            .map(|inst| {
                pool.iter()
                    .map(|c| iou(&inst.bbox, c.bbox()))
                    .fold(0.0f64, f64::max)
            })
            .collect();
        let mut order: Vec<usize> = (0..instances.len()).collect();
        order.sort_by(|&a, &b| {
            unconstrained[b]
                .total_cmp(&unconstrained[a])
                .then(instances[a].instance_id.cmp(&instances[b].instance_id))
        });

        let mut consumed = vec![false; pool.len()];
        let mut assigned = vec![0.0f64; instances.len()];
        for &i in &order {
            let mut best = 0.0f64;
            let mut best_j = None;
            for (j, c) in pool.iter().enumerate() {
                if consumed[j] {
                    continue;
                }
                let v = iou(&instances[i].bbox, c.bbox());
                if v > best {
                    best = v;
                    best_j = Some(j);
                }
            }
            if let Some(j) = best_j {
                consumed[j] = true;
            }
            assigned[i] = best;
        }
        for (row, v) in rows.iter_mut().zip(&assigned) {
            row.best.push(*v);
        }
    }
    rows
}
