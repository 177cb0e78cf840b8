//! Object-proposal evaluation toolkit.
//!
//! The crate evaluates ranked object-proposal boxes against ground-truth
//! annotations with the standard recall-based metric family (recall@t, AUC,
//! ABO/MABO, average recall, VUS), and ships the machinery needed to probe
//! how robust those numbers are when the ground truth only annotates a
//! subset of the categories actually present:
//!
//! * [`geometry`] — box arithmetic, IOU, non-maximum suppression.
//! * [`data_model`] — datasets, proposal sets, and parsers/converters for
//!   VOC-style XML, COCO-style JSON, and the toolkit's canonical formats.
//! * [`metrics`] — best-overlap tables and the metric suite.
//! * [`synth`] — seeded synthetic box worlds with partial annotation.
//! * [`proposers`] — reference proposal generators, including an oracle
//!   "detector masquerading as proposal generator".
//! * [`diagnostics`] — three-regime evaluation, AUC-drop and ranking
//!   inversions, bias-capacity curves, fine-grained per-category recall.

pub mod config_io;
pub mod data_model;
pub mod diagnostics;
pub mod geometry;
pub mod metrics;
pub mod proposers;
pub mod rng;
pub mod synth;
