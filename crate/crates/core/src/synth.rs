//! Seeded synthetic box worlds with partial annotation.
//!
//! The generator produces a fully annotated dataset together with a partial
//! view in which only a prefix of the category list is annotated, which is
//! exactly the structure of a benchmark that labels some categories and
//! leaves the rest as background. Per-category frequency weights and size
//! parameters make object scale a controlled knob.

use std::collections::BTreeSet;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data_model::{Category, DataError, Dataset, GroundTruthInstance, ImageRecord};
use crate::geometry::BoundingBox;
use crate::rng::{stage, stream};

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid synth config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Data(#[from] DataError),
}

/// Per-category box-size model: sides are
/// `mean_relative_side · min(width, height) · (1 ± jitter)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CategorySizeParams {
    pub mean_relative_side: f64,
    pub jitter: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub seed: u64,
    pub num_images: usize,
    /// (width, height) in pixels.
    pub image_size: (u32, u32),
    pub num_categories: usize,
    /// Relative instance frequencies, one positive weight per category.
    pub category_frequency_weights: Vec<f64>,
    /// One size model per category.
    pub category_size_params: Vec<CategorySizeParams>,
    /// Inclusive (min, max) instances per image.
    pub instances_per_image: (usize, usize),
    /// Fraction of categories (a prefix of the list) that the partial view
    /// annotates, in (0, 1].
    pub annotated_fraction_of_categories: f64,
}

impl SynthConfig {
    pub fn validate(&self) -> Result<(), SynthError> {
        let invalid = |m: String| Err(SynthError::InvalidConfig(m));
        if self.num_images == 0 {
            return invalid("num_images must be positive".into());
        }
        if self.image_size.0 == 0 || self.image_size.1 == 0 {
            return invalid("image_size must be positive".into());
        }
        if self.num_categories == 0 {
            return invalid("num_categories must be positive".into());
        }
        if self.category_frequency_weights.len() != self.num_categories {
            return invalid(format!(
                "category_frequency_weights has {} entries, expected {}",
                self.category_frequency_weights.len(),
                self.num_categories
            ));
        }
        if self.category_size_params.len() != self.num_categories {
            return invalid(format!(
                "category_size_params has {} entries, expected {}",
                self.category_size_params.len(),
                self.num_categories
            ));
        }
        for w in &self.category_frequency_weights {
            if !(w.is_finite() && *w > 0.0) {
                return invalid(format!("frequency weight {w} must be positive"));
            }
        }
        for p in &self.category_size_params {
            if !(p.mean_relative_side > 0.0 && p.mean_relative_side <= 1.0) {
                return invalid(format!(
                    "mean_relative_side {} outside (0, 1]",
                    p.mean_relative_side
                ));
            }
            if !(0.0..1.0).contains(&p.jitter) {
                return invalid(format!("jitter {} outside [0, 1)", p.jitter));
            }
        }
        if self.instances_per_image.0 > self.instances_per_image.1 {
            return invalid(format!(
                "instances_per_image min {} exceeds max {}",
                self.instances_per_image.0, self.instances_per_image.1
            ));
        }
        let f = self.annotated_fraction_of_categories;
        if !(f > 0.0 && f <= 1.0) {
            return invalid(format!(
                "annotated_fraction_of_categories {f} outside (0, 1]"
            ));
        }
        Ok(())
    }

    /// Number of categories the partial view annotates.
    pub fn annotated_count(&self) -> usize {
        ((self.annotated_fraction_of_categories * self.num_categories as f64).ceil() as usize)
            .clamp(1, self.num_categories)
    }
}

/// Draw a category index from cumulative weights.
fn weighted_choice(cumulative: &[f64], u: f64) -> usize {
    let target = u * cumulative[cumulative.len() - 1];
    cumulative
        .iter()
        .position(|&c| target < c)
        .unwrap_or(cumulative.len() - 1)
}

/// Generate the fully annotated dataset and its partially annotated view.
///
/// The output is a pure function of the config: images are generated from
/// per-image derived streams (in parallel) and assembled in image order.
/// Instances may overlap; no collision avoidance is attempted.
pub fn generate_dataset(cfg: &SynthConfig) -> Result<(Dataset, Dataset), SynthError> {
    cfg.validate()?;
    let (width, height) = cfg.image_size;
    let (w, h) = (f64::from(width), f64::from(height));
    let min_side = w.min(h);

    let mut cumulative = Vec::with_capacity(cfg.num_categories);
    let mut total = 0.0;
    for weight in &cfg.category_frequency_weights {
        total += weight;
        cumulative.push(total);
    }

    let categories: Vec<Category> = (0..cfg.num_categories)
        .map(|i| Category {
            id: i as u32,
            name: format!("cat_{i:02}"),
            supercategory: None,
        })
        .collect();

    let per_image: Vec<(ImageRecord, Vec<(u32, BoundingBox)>)> = (0..cfg.num_images)
        .into_par_iter()
        .map(|index| {
            let image_id = format!("img_{index:05}");
            let mut rng = stream(cfg.seed, stage::SYNTH_INSTANCES, index as u64);
            let (lo, hi) = cfg.instances_per_image;
            let count = rng.random_range(lo..=hi);
            let mut boxes = Vec::with_capacity(count);
            for _ in 0..count {
                let cat = weighted_choice(&cumulative, rng.random::<f64>());
                let params = &cfg.category_size_params[cat];
                let base = params.mean_relative_side * min_side;
                let bbox = loop {
                    let cx = rng.random::<f64>() * w;
                    let cy = rng.random::<f64>() * h;
                    let sx = base * (1.0 + params.jitter * (2.0 * rng.random::<f64>() - 1.0));
                    let sy = base * (1.0 + params.jitter * (2.0 * rng.random::<f64>() - 1.0));
                    let candidate = BoundingBox::new(
                        (cx - sx / 2.0).max(0.0),
                        (cy - sy / 2.0).max(0.0),
                        (cx + sx / 2.0).min(w),
                        (cy + sy / 2.0).min(h),
                    );
                    if let Ok(b) = candidate {
                        break b;
                    }
                };
                boxes.push((cat as u32, bbox));
            }
            (
                ImageRecord {
                    image_id,
                    width,
                    height,
                },
                boxes,
            )
        })
        .collect();

    let mut images = Vec::with_capacity(cfg.num_images);
    let mut instances = Vec::new();
    let mut next_id = 0u64;
    for (image, boxes) in per_image {
        for (category_id, bbox) in boxes {
            instances.push(GroundTruthInstance {
                instance_id: next_id,
                image_id: image.image_id.clone(),
                category_id,
                bbox,
            });
            next_id += 1;
        }
        images.push(image);
    }

    let all: BTreeSet<u32> = (0..cfg.num_categories as u32).collect();
    let full = Dataset::new(images, categories, instances, all)?;
    let annotated_prefix: BTreeSet<u32> = (0..cfg.annotated_count() as u32).collect();
    let partial = full.restrict_categories(&annotated_prefix)?;
    Ok((full, partial))
}
