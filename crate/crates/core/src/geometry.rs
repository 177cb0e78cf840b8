//! Box arithmetic, IOU, and non-maximum suppression.
//!
//! Boxes live in continuous image coordinates with a half-open convention:
//! `[x_min, x_max) × [y_min, y_max)`, area = width · height with no "+1"
//! term. Format converters normalize legacy inclusive-pixel conventions
//! into this form at parse time (see [`crate::data_model::voc`]).

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("invalid box [{x_min}, {y_min}, {x_max}, {y_max}]: {reason}")]
    InvalidBox {
        x_min: f64,
        y_min: f64,
        x_max: f64,
        y_max: f64,
        reason: &'static str,
    },
    #[error("score {0} is not finite")]
    NonFiniteScore(f64),
}

/// Axis-aligned rectangle with strictly positive area and finite coordinates.
///
/// Degenerate boxes are rejected at construction time, not silently clamped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingBox {
    x_min: f64,
    y_min: f64,
    x_max: f64,
    y_max: f64,
}

impl BoundingBox {
    pub fn new(x_min: f64, y_min: f64, x_max: f64, y_max: f64) -> Result<Self, GeometryError> {
        let invalid = |reason| GeometryError::InvalidBox {
            x_min,
            y_min,
            x_max,
            y_max,
            reason,
        };
        if !(x_min.is_finite() && y_min.is_finite() && x_max.is_finite() && y_max.is_finite()) {
            return Err(invalid("coordinates must be finite"));
        }
        if x_max <= x_min || y_max <= y_min {
            return Err(invalid("box must have strictly positive area"));
        }
        Ok(Self {
            x_min,
            y_min,
            x_max,
            y_max,
        })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn y_min(&self) -> f64 {
        self.y_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn y_max(&self) -> f64 {
        self.y_max
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn corners(&self) -> [f64; 4] {
        [self.x_min, self.y_min, self.x_max, self.y_max]
    }

    /// Intersection area with `other`; zero when the interiors are disjoint.
    pub fn intersection_area(&self, other: &BoundingBox) -> f64 {
        let ix = self.x_max.min(other.x_max) - self.x_min.max(other.x_min);
        let iy = self.y_max.min(other.y_max) - self.y_min.max(other.y_min);
        if ix > 0.0 && iy > 0.0 {
            ix * iy
        } else {
            0.0
        }
    }

    /// Restrict the box to `[0, width] × [0, height]`.
    ///
    /// Returns `None` when nothing with positive area is left.
    pub fn clip_to_image(&self, width: f64, height: f64) -> Option<BoundingBox> {
        BoundingBox::new(
            self.x_min.max(0.0),
            self.y_min.max(0.0),
            self.x_max.min(width),
            self.y_max.min(height),
        )
        .ok()
    }
}

/// Intersection over union (Jaccard index) of two boxes, in `[0, 1]`.
///
/// Exactly 0 for disjoint interiors and exactly 1 for identical boxes.
pub fn iou(a: &BoundingBox, b: &BoundingBox) -> f64 {
    let inter = a.intersection_area(b);
    if inter <= 0.0 {
        return 0.0;
    }
    inter / (a.area() + b.area() - inter)
}

/// A box with a confidence score and its position in the producer's list.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredBox {
    bbox: BoundingBox,
    score: f64,
    source_rank: usize,
}

impl ScoredBox {
    pub fn new(bbox: BoundingBox, score: f64, source_rank: usize) -> Result<Self, GeometryError> {
        if !score.is_finite() {
            return Err(GeometryError::NonFiniteScore(score));
        }
        Ok(Self {
            bbox,
            score,
            source_rank,
        })
    }

    pub fn bbox(&self) -> &BoundingBox {
        &self.bbox
    }

    pub fn score(&self) -> f64 {
        self.score
    }

    pub fn source_rank(&self) -> usize {
        self.source_rank
    }

    pub(crate) fn with_source_rank(mut self, source_rank: usize) -> Self {
        self.source_rank = source_rank;
        self
    }
}

/// Ordering used everywhere a proposal list is normalized: descending score,
/// ties broken by ascending source rank.
pub(crate) fn by_score_desc(a: &ScoredBox, b: &ScoredBox) -> std::cmp::Ordering {
    b.score
        .total_cmp(&a.score)
        .then(a.source_rank.cmp(&b.source_rank))
}

/// Greedy non-maximum suppression.
///
/// Repeatedly keeps the highest-scoring surviving box and removes every box
/// whose IOU with it is strictly greater than `iou_threshold`, so a
/// threshold of 0 suppresses any positive overlap. Equal scores are broken
/// by lower source rank. The output is sorted by descending score and every
/// surviving pair has IOU ≤ `iou_threshold`.
pub fn nms(boxes: &[ScoredBox], iou_threshold: f64) -> Vec<ScoredBox> {
    assert!(
        (0.0..1.0).contains(&iou_threshold),
        "nms threshold must lie in [0, 1), got {iou_threshold}"
    );
    let mut order: Vec<usize> = (0..boxes.len()).collect();
    order.sort_by(|&i, &j| by_score_desc(&boxes[i], &boxes[j]));

    let mut suppressed = vec![false; boxes.len()];
    let mut kept = Vec::new();
    for (pos, &i) in order.iter().enumerate() {
        if suppressed[i] {
            continue;
        }
        kept.push(boxes[i].clone());
        for &j in &order[pos + 1..] {
            if !suppressed[j] && iou(boxes[i].bbox(), boxes[j].bbox()) > iou_threshold {
                suppressed[j] = true;
            }
        }
    }
    kept
}
