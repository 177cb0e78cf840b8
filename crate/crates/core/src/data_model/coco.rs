//! COCO-style JSON annotation reader.
//!
//! Consumes the usual `images` / `annotations` / `categories` layout with
//! `bbox = [x, y, w, h]`. Source category ids may be sparse; they are
//! remapped to dense ids in the order the categories appear in the
//! `categories` array (identity is the name string). Numeric image ids are
//! stringified. Every listed category is considered annotated.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::Deserialize;

use crate::geometry::BoundingBox;

use super::voc::clip_with_warning;
use super::{Category, DataError, Dataset, GroundTruthInstance, ImageRecord};

#[derive(Deserialize)]
struct CocoDocument {
    images: Vec<CocoImage>,
    annotations: Vec<CocoAnnotation>,
    categories: Vec<CocoCategory>,
}

#[derive(Deserialize)]
struct CocoImage {
    id: u64,
    width: u32,
    height: u32,
}

#[derive(Deserialize)]
struct CocoAnnotation {
    id: u64,
    image_id: u64,
    category_id: u64,
    bbox: [f64; 4],
}

#[derive(Deserialize)]
struct CocoCategory {
    id: u64,
    name: String,
    #[serde(default)]
    supercategory: Option<String>,
}

pub fn parse_coco_str(text: &str, source_name: &str) -> Result<Dataset, DataError> {
    let doc: CocoDocument =
        serde_json::from_str(text).map_err(|e| DataError::parse(source_name, e.to_string()))?;

    let mut category_ids = BTreeMap::new();
    let mut categories = Vec::with_capacity(doc.categories.len());
    for cat in &doc.categories {
        let dense_id = categories.len() as u32;
        if category_ids.insert(cat.id, dense_id).is_some() {
            return Err(DataError::parse(
                source_name,
                format!("duplicate category id {}", cat.id),
            ));
        }
        categories.push(Category {
            id: dense_id,
            name: cat.name.clone(),
            supercategory: cat.supercategory.clone(),
        });
    }

    let mut image_dims = BTreeMap::new();
    let mut images = Vec::with_capacity(doc.images.len());
    for img in &doc.images {
        if image_dims.insert(img.id, (img.width, img.height)).is_some() {
            return Err(DataError::parse(
                source_name,
                format!("duplicate image id {}", img.id),
            ));
        }
        images.push(ImageRecord {
            image_id: img.id.to_string(),
            width: img.width,
            height: img.height,
        });
    }

    let mut seen_annotation_ids = BTreeSet::new();
    let mut instances = Vec::with_capacity(doc.annotations.len());
    for ann in &doc.annotations {
        if !seen_annotation_ids.insert(ann.id) {
            return Err(DataError::parse(
                source_name,
                format!("duplicate annotation id {}", ann.id),
            ));
        }
        let Some(&(width, height)) = image_dims.get(&ann.image_id) else {
            return Err(DataError::parse(
                source_name,
                format!(
                    "annotation {} references unknown image_id {}",
                    ann.id, ann.image_id
                ),
            ));
        };
        let Some(&category_id) = category_ids.get(&ann.category_id) else {
            return Err(DataError::parse(
                source_name,
                format!(
                    "annotation {} references unknown category_id {}",
                    ann.id, ann.category_id
                ),
            ));
        };
        let [x, y, w, h] = ann.bbox;
        let bbox = BoundingBox::new(x, y, x + w, y + h)
            .map_err(|e| DataError::parse(source_name, format!("annotation {}: {}", ann.id, e)))?;
        let bbox = clip_with_warning(bbox, width, height, source_name).ok_or_else(|| {
            DataError::parse(
                source_name,
                format!("annotation {}: box lies entirely outside its image", ann.id),
            )
        })?;
        instances.push(GroundTruthInstance {
            instance_id: ann.id,
            image_id: ann.image_id.to_string(),
            category_id,
            bbox,
        });
    }

    let annotated: BTreeSet<u32> = (0..categories.len() as u32).collect();
    Dataset::new(images, categories, instances, annotated)
}

pub fn parse_coco_file(path: &Path) -> Result<Dataset, DataError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| DataError::io(path.display().to_string(), e))?;
    parse_coco_str(&text, &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bbox_is_additive() {
        let text = r#"{
            "images": [{"id": 1, "width": 100, "height": 100}],
            "annotations": [{"id": 7, "image_id": 1, "category_id": 3, "bbox": [10, 20, 30, 40]}],
            "categories": [{"id": 3, "name": "cup"}]
        }"#;
        let d = parse_coco_str(text, "t.json").unwrap();
        assert_eq!(d.instances()[0].bbox.corners(), [10.0, 20.0, 40.0, 60.0]);
        assert_eq!(d.instances()[0].category_id, 0);
    }

    #[test]
    fn unknown_image_reference_names_annotation() {
        let text = r#"{
            "images": [{"id": 1, "width": 100, "height": 100}],
            "annotations": [{"id": 42, "image_id": 2, "category_id": 3, "bbox": [0, 0, 5, 5]}],
            "categories": [{"id": 3, "name": "cup"}]
        }"#;
        let err = parse_coco_str(text, "t.json").unwrap_err();
        assert!(err.to_string().contains("42"), "{err}");
    }

    #[test]
    fn two_image_fixture_with_supercategories() {
        let text = r#"{
            "images": [{"id": 10, "width": 64, "height": 64}, {"id": 11, "width": 32, "height": 32}],
            "annotations": [
                {"id": 1, "image_id": 10, "category_id": 5, "bbox": [0, 0, 10, 10]},
                {"id": 2, "image_id": 11, "category_id": 9, "bbox": [1, 1, 8, 8]}
            ],
            "categories": [
                {"id": 5, "name": "tv", "supercategory": "electronics"},
                {"id": 9, "name": "cat", "supercategory": "animal"}
            ]
        }"#;
        let d = parse_coco_str(text, "t.json").unwrap();
        assert_eq!(
            d.categories()[0].supercategory.as_deref(),
            Some("electronics")
        );
        assert_eq!(d.categories()[1].supercategory.as_deref(), Some("animal"));
        assert_eq!(d.images().len(), 2);
        assert_eq!(d.instances().len(), 2);
    }

    #[test]
    fn duplicate_ids_rejected() {
        let dup_ann = r#"{
            "images": [{"id": 1, "width": 100, "height": 100}],
            "annotations": [
                {"id": 7, "image_id": 1, "category_id": 3, "bbox": [0, 0, 5, 5]},
                {"id": 7, "image_id": 1, "category_id": 3, "bbox": [1, 1, 5, 5]}
            ],
            "categories": [{"id": 3, "name": "cup"}]
        }"#;
        assert!(parse_coco_str(dup_ann, "t.json").is_err());
        let dup_cat = r#"{
            "images": [], "annotations": [],
            "categories": [{"id": 3, "name": "cup"}, {"id": 3, "name": "mug"}]
        }"#;
        assert!(parse_coco_str(dup_cat, "t.json").is_err());
    }

    #[test]
    fn zero_extent_bbox_rejected() {
        let text = r#"{
            "images": [{"id": 1, "width": 100, "height": 100}],
            "annotations": [{"id": 7, "image_id": 1, "category_id": 3, "bbox": [10, 20, 0, 40]}],
            "categories": [{"id": 3, "name": "cup"}]
        }"#;
        let err = parse_coco_str(text, "t.json").unwrap_err();
        assert!(err.to_string().contains("annotation 7"), "{err}");
    }
}
