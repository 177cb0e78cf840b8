//! Reference proposal generators.
//!
//! Two category-blind controls (uniform random boxes and a deterministic
//! sliding-window grid) and the oracle DMP: a synthetic "detector
//! masquerading as proposal generator" that emits jittered copies of the
//! ground-truth boxes it has "seen", merge-sorts them by score, applies NMS
//! and keeps the top M — reproducing how per-category detections get
//! re-labeled as proposals.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rand_distr::{Distribution, Normal, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data_model::{Dataset, ProposalSet};
use crate::geometry::{iou, nms, BoundingBox, ScoredBox};
use crate::rng::{stage, stream};

#[derive(Debug, Error)]
pub enum ProposerError {
    #[error("invalid proposer config: {0}")]
    InvalidConfig(String),
}

/// Uniformly random valid boxes with i.i.d. uniform scores.
///
/// Box centers are uniform over the image; half-extents are uniform up to
/// the largest value that keeps the box inside, so the center distribution
/// is exactly uniform (at the cost of smaller boxes near the borders).
pub fn random_proposer(
    dataset: &Dataset,
    per_image: usize,
    seed: u64,
) -> Result<ProposalSet, ProposerError> {
    if per_image == 0 {
        return Err(ProposerError::InvalidConfig(
            "per_image must be positive".into(),
        ));
    }
    let lists: Vec<(String, Vec<ScoredBox>)> = dataset
        .images()
        .par_iter()
        .enumerate()
        .map(|(index, image)| {
            let mut rng = stream(seed, stage::RANDOM_PROPOSER, index as u64);
            let (w, h) = (f64::from(image.width), f64::from(image.height));
            let mut boxes = Vec::with_capacity(per_image);
            for rank in 0..per_image {
                let bbox = random_box(&mut rng, w, h);
                let score = rng.random::<f64>();
                boxes.push(ScoredBox::new(bbox, score, rank).expect("finite score"));
            }
            (image.image_id.clone(), boxes)
        })
        .collect();
    Ok(ProposalSet::new("random", lists.into_iter().collect()))
}

fn random_box(rng: &mut impl Rng, w: f64, h: f64) -> BoundingBox {
    loop {
        let cx = rng.random::<f64>() * w;
        let cy = rng.random::<f64>() * h;
        let hx = rng.random::<f64>() * cx.min(w - cx);
        let hy = rng.random::<f64>() * cy.min(h - cy);
        if let Ok(b) = BoundingBox::new(cx - hx, cy - hy, cx + hx, cy + hy) {
            return b;
        }
    }
}

/// Deterministic dense grid of windows.
///
/// For each (scale, aspect ratio) pair the window is
/// `scale·√ratio × scale/√ratio` pixels, swept with a stride of
/// `stride_fraction` times the window side and clipped to the image. All
/// windows carry score 0; source ranks run row-major over
/// (scale, ratio, y, x).
pub fn sliding_window_proposer(
    dataset: &Dataset,
    scales: &[f64],
    aspect_ratios: &[f64],
    stride_fraction: f64,
) -> Result<ProposalSet, ProposerError> {
    if scales.is_empty() || aspect_ratios.is_empty() {
        return Err(ProposerError::InvalidConfig(
            "scales and aspect_ratios must be non-empty".into(),
        ));
    }
    for s in scales {
        if !(s.is_finite() && *s > 0.0) {
            return Err(ProposerError::InvalidConfig(format!(
                "scale {s} must be positive"
            )));
        }
    }
    for r in aspect_ratios {
        if !(r.is_finite() && *r > 0.0) {
            return Err(ProposerError::InvalidConfig(format!(
                "ratio {r} must be positive"
            )));
        }
    }
    if !(stride_fraction > 0.0 && stride_fraction <= 1.0) {
        return Err(ProposerError::InvalidConfig(format!(
            "stride_fraction {stride_fraction} outside (0, 1]"
        )));
    }

    let mut per_image = BTreeMap::new();
    for image in dataset.images() {
        let (w, h) = (f64::from(image.width), f64::from(image.height));
        let mut boxes = Vec::new();
        let mut rank = 0usize;
        for scale in scales {
            for ratio in aspect_ratios {
                let win_w = scale * ratio.sqrt();
                let win_h = scale / ratio.sqrt();
                let stride_x = stride_fraction * win_w;
                let stride_y = stride_fraction * win_h;
                let mut y = 0.0;
                while y < h {
                    let mut x = 0.0;
                    while x < w {
                        if let Ok(b) =
                            BoundingBox::new(x, y, (x + win_w).min(w), (y + win_h).min(h))
                        {
                            boxes.push(ScoredBox::new(b, 0.0, rank).expect("finite score"));
                            rank += 1;
                        }
                        x += stride_x;
                    }
                    y += stride_y;
                }
            }
        }
        per_image.insert(image.image_id.clone(), boxes);
    }
    Ok(ProposalSet::new("sliding_window", per_image))
}

/// Configuration of the oracle DMP.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DmpConfig {
    /// Categories the emulated detector was trained on.
    pub seen_categories: BTreeSet<u32>,
    /// Probability that a seen-category instance gets a detection.
    pub hit_rate: f64,
    /// Corner noise as a fraction of the box side.
    pub jitter_sigma: f64,
    /// Expected spurious boxes per image (Poisson mean); these carry low
    /// scores, below the typical detection scores.
    pub false_positive_rate: f64,
    pub nms_threshold: f64,
    /// Top-M truncation per image.
    pub budget: usize,
    pub seed: u64,
}

impl DmpConfig {
    pub fn validate(&self, dataset: &Dataset) -> Result<(), ProposerError> {
        let invalid = |m: String| Err(ProposerError::InvalidConfig(m));
        if !(0.0..=1.0).contains(&self.hit_rate) {
            return invalid(format!("hit_rate {} outside [0, 1]", self.hit_rate));
        }
        if !(self.jitter_sigma >= 0.0 && self.jitter_sigma.is_finite()) {
            return invalid(format!("jitter_sigma {} must be >= 0", self.jitter_sigma));
        }
        if !(self.false_positive_rate >= 0.0 && self.false_positive_rate.is_finite()) {
            return invalid(format!(
                "false_positive_rate {} must be >= 0",
                self.false_positive_rate
            ));
        }
        if !(0.0..1.0).contains(&self.nms_threshold) {
            return invalid(format!(
                "nms_threshold {} outside [0, 1)",
                self.nms_threshold
            ));
        }
        if self.budget == 0 {
            return invalid("budget must be positive".into());
        }
        let count = dataset.categories().len() as u32;
        for &c in &self.seen_categories {
            if c >= count {
                return invalid(format!("seen category {c} not in the dataset"));
            }
        }
        Ok(())
    }
}

/// Emulate a detector masquerading as a proposal generator.
///
/// Per image: (1) every ground-truth instance of a seen category gets, with
/// probability `hit_rate`, a detection whose corners carry Gaussian noise
/// (σ = `jitter_sigma` · box side) and whose score is the IOU with its
/// source plus a small tie-breaking term; (2) Poisson-many random
/// low-score boxes are added; (3) the per-category detections are
/// merge-sorted by score into one list; (4) NMS; (5) top-M truncation.
///
/// Draws are consumed per instance regardless of hit/miss and false
/// positives use a separate stream, so changing `hit_rate`,
/// `false_positive_rate`, or `seen_categories` never perturbs the
/// remaining draws.
pub fn oracle_dmp(full: &Dataset, cfg: &DmpConfig) -> Result<ProposalSet, ProposerError> {
    cfg.validate(full)?;
    let by_image: Vec<(&str, Vec<&crate::data_model::GroundTruthInstance>)> =
        full.instances_by_image().into_iter().collect();

    let lists: Vec<(String, Vec<ScoredBox>)> = by_image
        .par_iter()
        .enumerate()
        .map(|(index, (image_id, instances))| {
            let image = full.image(image_id).expect("image exists");
            let (w, h) = (f64::from(image.width), f64::from(image.height));
            let normal = Normal::new(0.0, 1.0).expect("unit normal");
            let mut candidates: Vec<(BoundingBox, f64)> = Vec::new();

            let mut hit_rng = stream(cfg.seed, stage::DMP_HITS, index as u64);
            for inst in instances {
                let u_hit: f64 = hit_rng.random();
                let mut jittered =
                    jitter_box(&mut hit_rng, &normal, &inst.bbox, cfg.jitter_sigma, w, h);
                let u_score: f64 = hit_rng.random();
                if !(cfg.seen_categories.contains(&inst.category_id) && u_hit < cfg.hit_rate) {
                    continue;
                }
                loop {
                    if let Some(b) = jittered {
                        let score = iou(&b, &inst.bbox) + 1e-3 * u_score;
                        candidates.push((b, score));
                        break;
                    }
                    jittered =
                        jitter_box(&mut hit_rng, &normal, &inst.bbox, cfg.jitter_sigma, w, h);
                }
            }

            let mut fp_rng = stream(cfg.seed, stage::DMP_FALSE_POSITIVES, index as u64);
            if cfg.false_positive_rate > 0.0 {
                let poisson = Poisson::new(cfg.false_positive_rate).expect("positive finite rate");
                let count = poisson.sample(&mut fp_rng) as usize;
                for _ in 0..count {
                    let b = random_box(&mut fp_rng, w, h);
                    let score = 0.3 * fp_rng.random::<f64>();
                    candidates.push((b, score));
                }
            }

            // merge-sort by score; emission order breaks exact ties
            let mut pool: Vec<ScoredBox> = candidates
                .into_iter()
                .enumerate()
                .map(|(rank, (b, score))| ScoredBox::new(b, score, rank).expect("finite score"))
                .collect();
            pool.sort_by(crate::geometry::by_score_desc);
            let pool: Vec<ScoredBox> = pool
                .into_iter()
                .enumerate()
                .map(|(rank, b)| {
                    let score = b.score();
                    ScoredBox::new(*b.bbox(), score, rank).expect("finite score")
                })
                .collect();

            let mut kept = nms(&pool, cfg.nms_threshold);
            kept.truncate(cfg.budget);
            (image_id.to_string(), kept)
        })
        .collect();

    Ok(ProposalSet::new("oracle_dmp", lists.into_iter().collect()))
}

/// One jitter attempt: four corner draws are always consumed; returns None
/// when the noisy box degenerates or falls outside the image.
fn jitter_box(
    rng: &mut impl Rng,
    normal: &Normal<f64>,
    source: &BoundingBox,
    sigma_fraction: f64,
    w: f64,
    h: f64,
) -> Option<BoundingBox> {
    let sx = sigma_fraction * source.width();
    let sy = sigma_fraction * source.height();
    let n1 = normal.sample(rng);
    let n2 = normal.sample(rng);
    let n3 = normal.sample(rng);
    let n4 = normal.sample(rng);
    BoundingBox::new(
        source.x_min() + sx * n1,
        source.y_min() + sy * n3,
        source.x_max() + sx * n2,
        source.y_max() + sy * n4,
    )
    .ok()?
    .clip_to_image(w, h)
}
