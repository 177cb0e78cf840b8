//! The toolkit's canonical dataset format: a single JSON document with
//! a fixed key order and id-sorted arrays, so identical datasets always
//! serialize to identical bytes.
//!
//! ```json
//! {
//!   "images": [{"id": "...", "width": 1, "height": 1}],
//!   "categories": [{"id": 0, "name": "...", "supercategory": null}],
//!   "annotated_categories": [0],
//!   "annotations": [{"id": 0, "image_id": "...", "category_id": 0,
//!                    "bbox": [x_min, y_min, x_max, y_max]}]
//! }
//! ```

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::geometry::BoundingBox;

use super::{Category, DataError, Dataset, GroundTruthInstance, ImageRecord};

#[derive(Serialize, Deserialize)]
struct CanonicalDataset {
    images: Vec<CanonicalImage>,
    categories: Vec<CanonicalCategory>,
    annotated_categories: Vec<u32>,
    annotations: Vec<CanonicalAnnotation>,
}

#[derive(Serialize, Deserialize)]
struct CanonicalImage {
    id: String,
    width: u32,
    height: u32,
}

#[derive(Serialize, Deserialize)]
struct CanonicalCategory {
    id: u32,
    name: String,
    supercategory: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct CanonicalAnnotation {
    id: u64,
    image_id: String,
    category_id: u32,
    bbox: [f64; 4],
}

/// Serialize a dataset to the canonical JSON text (trailing newline
/// included). Arrays are emitted sorted by id.
pub fn to_canonical_string(dataset: &Dataset) -> String {
    let mut annotations: Vec<CanonicalAnnotation> = dataset
        .instances()
        .iter()
        .map(|i| CanonicalAnnotation {
            id: i.instance_id,
            image_id: i.image_id.clone(),
            category_id: i.category_id,
            bbox: i.bbox.corners(),
        })
        .collect();
    annotations.sort_by_key(|a| a.id);

    let doc = CanonicalDataset {
        images: dataset
            .images()
            .iter()
            .map(|i| CanonicalImage {
                id: i.image_id.clone(),
                width: i.width,
                height: i.height,
            })
            .collect(),
        categories: dataset
            .categories()
            .iter()
            .map(|c| CanonicalCategory {
                id: c.id,
                name: c.name.clone(),
                supercategory: c.supercategory.clone(),
            })
            .collect(),
        annotated_categories: dataset.annotated_categories().iter().copied().collect(),
        annotations,
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("canonical dataset serializes");
    text.push('\n');
    text
}

/// Parse canonical JSON text. Validation is strict: canonical documents are
/// produced by this toolkit and must already satisfy every invariant.
pub fn from_canonical_str(text: &str, source_name: &str) -> Result<Dataset, DataError> {
    let doc: CanonicalDataset =
        serde_json::from_str(text).map_err(|e| DataError::parse(source_name, e.to_string()))?;
    let images = doc
        .images
        .into_iter()
        .map(|i| ImageRecord {
            image_id: i.id,
            width: i.width,
            height: i.height,
        })
        .collect();
    let categories = doc
        .categories
        .into_iter()
        .map(|c| Category {
            id: c.id,
            name: c.name,
            supercategory: c.supercategory,
        })
        .collect();
    let mut instances = Vec::with_capacity(doc.annotations.len());
    for a in doc.annotations {
        let [x0, y0, x1, y1] = a.bbox;
        let bbox = BoundingBox::new(x0, y0, x1, y1).map_err(|e| DataError::InvalidAnnotation {
            id: a.id,
            reason: e.to_string(),
        })?;
        instances.push(GroundTruthInstance {
            instance_id: a.id,
            image_id: a.image_id,
            category_id: a.category_id,
            bbox,
        });
    }
    let annotated: BTreeSet<u32> = doc.annotated_categories.into_iter().collect();
    Dataset::new(images, categories, instances, annotated)
}

pub fn save_canonical(dataset: &Dataset, path: &Path) -> Result<(), DataError> {
    std::fs::write(path, to_canonical_string(dataset))
        .map_err(|e| DataError::io(path.display().to_string(), e))
}

pub fn load_canonical(path: &Path) -> Result<Dataset, DataError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| DataError::io(path.display().to_string(), e))?;
    from_canonical_str(&text, &path.display().to_string())
}
