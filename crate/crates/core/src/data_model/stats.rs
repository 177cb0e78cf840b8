//! Annotation statistics: instance counts inside/outside a category split,
//! per-category counts, mean relative areas, and covered image-area
//! fractions.

use std::collections::BTreeSet;

use serde::Serialize;

use super::{DataError, Dataset};

#[derive(Debug, Clone, Serialize)]
pub struct CategoryStats {
    pub id: u32,
    pub name: String,
    pub supercategory: Option<String>,
    pub in_split: bool,
    pub instance_count: usize,
    /// Mean of (box area / image area) over the category's instances;
    /// `None` when the category has no instances.
    pub mean_relative_area: Option<f64>,
    /// Sum of the category's box areas divided by the total image area of
    /// the dataset. Overlapping instances are counted additively.
    pub covered_area_fraction: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct StatsReport {
    pub split_category_ids: Vec<u32>,
    pub instances_inside_split: usize,
    pub instances_outside_split: usize,
    pub per_category: Vec<CategoryStats>,
    /// Sum of all box areas divided by the total image area.
    pub total_covered_area_fraction: f64,
}

/// Tally annotation statistics against a category split (for example the
/// natively annotated categories versus everything else).
pub fn annotation_stats(
    dataset: &Dataset,
    split: &BTreeSet<u32>,
) -> Result<StatsReport, DataError> {
    let category_count = dataset.categories().len();
    for &id in split {
        if id as usize >= category_count {
            return Err(DataError::UnknownCategoryId(id));
        }
    }

    let total_image_area: f64 = dataset.images().iter().map(|i| i.area()).sum();

    let mut counts = vec![0usize; category_count];
    let mut relative_area_sums = vec![0.0f64; category_count];
    let mut absolute_area_sums = vec![0.0f64; category_count];
    let mut inside = 0usize;
    for inst in dataset.instances() {
        let idx = inst.category_id as usize;
        counts[idx] += 1;
        let image = dataset
            .image(&inst.image_id)
            .expect("instance image validated at construction");
        let area = inst.bbox.area();
        relative_area_sums[idx] += area / image.area();
        absolute_area_sums[idx] += area;
        if split.contains(&inst.category_id) {
            inside += 1;
        }
    }

    let per_category = dataset
        .categories()
        .iter()
        .map(|c| {
            let idx = c.id as usize;
            CategoryStats {
                id: c.id,
                name: c.name.clone(),
                supercategory: c.supercategory.clone(),
                in_split: split.contains(&c.id),
                instance_count: counts[idx],
                mean_relative_area: if counts[idx] > 0 {
                    Some(relative_area_sums[idx] / counts[idx] as f64)
                } else {
                    None
                },
                covered_area_fraction: if total_image_area > 0.0 {
                    absolute_area_sums[idx] / total_image_area
                } else {
                    0.0
                },
            }
        })
        .collect();

    let total_instances = dataset.instances().len();
    Ok(StatsReport {
        split_category_ids: split.iter().copied().collect(),
        instances_inside_split: inside,
        instances_outside_split: total_instances - inside,
        per_category,
        total_covered_area_fraction: if total_image_area > 0.0 {
            absolute_area_sums.iter().sum::<f64>() / total_image_area
        } else {
            0.0
        },
    })
}
