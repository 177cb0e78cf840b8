//! Evaluation configuration: IOU thresholds, proposal budgets, comparison
//! conventions, and integration grids. Every field has a default and the
//! resolved configuration is echoed into all reports.

use serde::{Deserialize, Serialize};

use super::MetricsError;

/// How `best_iou ⊳ t` is decided when counting recalled instances.
///
/// The strict form is the printed definition of recall; `GreaterEqual` is
/// offered because common practice differs. The choice is echoed into every
/// report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdComparison {
    #[default]
    StrictGreater,
    GreaterEqual,
}

impl ThresholdComparison {
    pub fn passes(self, best_iou: f64, threshold: f64) -> bool {
        match self {
            ThresholdComparison::StrictGreater => best_iou > threshold,
            ThresholdComparison::GreaterEqual => best_iou >= threshold,
        }
    }
}

/// Spacing interpretation of the proposal-budget axis in integrals/plots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BudgetAxis {
    Linear,
    #[default]
    Log,
}

impl BudgetAxis {
    pub fn position(self, budget: usize) -> f64 {
        match self {
            BudgetAxis::Linear => budget as f64,
            BudgetAxis::Log => (budget as f64).ln(),
        }
    }
}

/// How ground-truth instances claim proposals.
///
/// The default lets one proposal be the best match for several instances
/// (an independent max per instance). The greedy one-to-one mode, offered
/// for comparison studies, processes instances in descending best-IOU order
/// and consumes each proposal at most once.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum MatchingMode {
    #[default]
    IndependentMax,
    GreedyOneToOne,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvaluationConfig {
    /// Strictly increasing thresholds in (0, 1].
    pub iou_thresholds: Vec<f64>,
    /// Strictly increasing top-M budgets.
    pub proposal_budgets: Vec<usize>,
    pub threshold_comparison: ThresholdComparison,
    /// Threshold window `[t_lo, t_hi]` that AUC and VUS integrate over.
    pub auc_threshold_range: [f64; 2],
    /// Grid step of the reference trapezoidal integration that the
    /// analytic average-recall integral is validated against.
    pub ar_grid_step: f64,
    pub budget_axis: BudgetAxis,
    pub matching: MatchingMode,
}

impl Default for EvaluationConfig {
    fn default() -> Self {
        Self {
            // 0.5 to 1.0, step 0.05
            iou_thresholds: (10..=20).map(|i| i as f64 / 20.0).collect(),
            proposal_budgets: vec![1, 3, 10, 32, 100, 316, 1000, 3162, 10000],
            threshold_comparison: ThresholdComparison::default(),
            auc_threshold_range: [0.5, 1.0],
            ar_grid_step: 0.01,
            budget_axis: BudgetAxis::default(),
            matching: MatchingMode::default(),
        }
    }
}

impl EvaluationConfig {
    pub fn validate(&self) -> Result<(), MetricsError> {
        let invalid = |m: String| Err(MetricsError::InvalidConfig(m));
        if self.iou_thresholds.is_empty() {
            return invalid("iou_thresholds must be non-empty".into());
        }
        for t in &self.iou_thresholds {
            if !(*t > 0.0 && *t <= 1.0) {
                return invalid(format!("iou threshold {t} outside (0, 1]"));
            }
        }
        for pair in self.iou_thresholds.windows(2) {
            if pair[1] <= pair[0] {
                return invalid(format!(
                    "iou_thresholds must be strictly increasing ({} then {})",
                    pair[0], pair[1]
                ));
            }
        }
        if self.proposal_budgets.is_empty() {
            return invalid("proposal_budgets must be non-empty".into());
        }
        if self.proposal_budgets[0] == 0 {
            return invalid("proposal budgets must be positive".into());
        }
        for pair in self.proposal_budgets.windows(2) {
            if pair[1] <= pair[0] {
                return invalid(format!(
                    "proposal_budgets must be strictly increasing ({} then {})",
                    pair[0], pair[1]
                ));
            }
        }
        let [lo, hi] = self.auc_threshold_range;
        if !(lo > 0.0 && hi <= 1.0 && lo < hi) {
            return invalid(format!(
                "auc_threshold_range [{lo}, {hi}] must satisfy 0 < lo < hi <= 1"
            ));
        }
        if !(self.ar_grid_step > 0.0 && self.ar_grid_step.is_finite()) {
            return invalid(format!(
                "ar_grid_step {} must be positive",
                self.ar_grid_step
            ));
        }
        Ok(())
    }

    /// Budgets no larger than `cap` (used to drop budgets beyond the
    /// available proposal count); always keeps at least the smallest budget.
    pub fn budgets_capped(&self, cap: usize) -> Vec<usize> {
        let mut budgets: Vec<usize> = self
            .proposal_budgets
            .iter()
            .copied()
            .filter(|&m| m <= cap)
            .collect();
        if budgets.is_empty() {
            if let Some(&first) = self.proposal_budgets.first() {
                budgets.push(first);
            }
        }
        budgets
    }
}
