//! The recall-based metric suite: best-overlap matching, recall@t, recall
//! curves, AUC, ABO/MABO, average recall, and VUS.

mod config;
mod overlap;
mod summary;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use config::{BudgetAxis, EvaluationConfig, MatchingMode, ThresholdComparison};
pub use overlap::{best_overlaps, best_overlaps_with, BestOverlapTable, OverlapRow};
pub use summary::{
    abo, ar_vs_budget, auc, auc_vs_budget, average_recall, mabo, recall_at, recall_vs_budget,
    recall_vs_threshold, vus,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("invalid evaluation config: {0}")]
    InvalidConfig(String),
    #[error("budget {0} was not materialized in the best-overlap table")]
    BudgetNotMaterialized(usize),
    #[error("category {0} has no instances in the table")]
    EmptyCategory(u32),
    #[error("{axis} axis needs at least 2 samples for a surface integral, found {found}")]
    InsufficientGrid { axis: &'static str, found: usize },
}

/// A sampled metric curve: the unit behind every report and plot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveResult {
    pub x_label: String,
    pub y_label: String,
    /// Sample points with strictly increasing x.
    pub points: Vec<(f64, f64)>,
    pub method_name: String,
    /// Echoes of the configuration that produced the curve.
    pub metadata: BTreeMap<String, String>,
}

impl CurveResult {
    pub fn new(
        x_label: impl Into<String>,
        y_label: impl Into<String>,
        points: Vec<(f64, f64)>,
        method_name: impl Into<String>,
        metadata: BTreeMap<String, String>,
    ) -> Self {
        let curve = Self {
            x_label: x_label.into(),
            y_label: y_label.into(),
            points,
            method_name: method_name.into(),
            metadata,
        };
        debug_assert!(
            curve.points.windows(2).all(|p| p[1].0 > p[0].0),
            "curve x values must be strictly increasing"
        );
        curve
    }
}
