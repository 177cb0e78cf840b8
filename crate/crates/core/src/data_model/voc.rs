//! VOC-style XML annotation reader.
//!
//! Each document describes one image (`filename`, `size`, and a list of
//! `object` elements with `name` and `bndbox`). VOC boxes use inclusive
//! integer pixel coordinates; by default they are converted to the
//! half-open canonical convention via `x_max := xmax + 1`,
//! `y_max := ymax + 1`, which preserves the VOC area
//! `(xmax − xmin + 1) · (ymax − ymin + 1)` exactly. Sources that already
//! use exclusive coordinates can disable the shift with
//! [`VocOptions::exclusive_coordinates`].
//!
//! Boxes extending slightly past the image bounds are clipped with a
//! warning and rejected only if clipping empties them. `difficult` and
//! `truncated` flags are ignored.

use std::collections::BTreeSet;
use std::path::Path;

use serde::Deserialize;

use crate::geometry::BoundingBox;

use super::{Category, DataError, Dataset, GroundTruthInstance, ImageRecord};

#[derive(Debug, Clone, Copy, Default)]
pub struct VocOptions {
    /// Treat `xmax`/`ymax` as already exclusive (skip the `+1` shift).
    pub exclusive_coordinates: bool,
}

#[derive(Deserialize)]
struct VocAnnotation {
    filename: String,
    size: VocSize,
    #[serde(default, rename = "object")]
    objects: Vec<VocObject>,
}

#[derive(Deserialize)]
struct VocSize {
    width: u32,
    height: u32,
}

#[derive(Deserialize)]
struct VocObject {
    name: String,
    bndbox: VocBndbox,
}

#[derive(Deserialize)]
struct VocBndbox {
    xmin: f64,
    ymin: f64,
    xmax: f64,
    ymax: f64,
}

/// Parse a collection of `(document name, xml text)` pairs into one dataset.
///
/// Documents are processed in the order given; category ids are assigned by
/// first appearance of the category name across that order. Every category
/// seen is considered annotated.
pub fn parse_voc_documents<S: AsRef<str>>(
    documents: &[(S, S)],
    options: VocOptions,
) -> Result<Dataset, DataError> {
    let mut images = Vec::new();
    let mut categories: Vec<Category> = Vec::new();
    let mut instances = Vec::new();
    let mut next_instance_id: u64 = 0;

    for (name, xml) in documents {
        let doc_name = name.as_ref();
        let ann: VocAnnotation = quick_xml::de::from_str(xml.as_ref())
            .map_err(|e| DataError::parse(doc_name, e.to_string()))?;
        if ann.size.width == 0 || ann.size.height == 0 {
            return Err(DataError::parse(
                doc_name,
                format!(
                    "size element has non-positive dimensions {}x{}",
                    ann.size.width, ann.size.height
                ),
            ));
        }
        let image_id = ann.filename.clone();
        images.push(ImageRecord {
            image_id: image_id.clone(),
            width: ann.size.width,
            height: ann.size.height,
        });

        for (obj_index, obj) in ann.objects.iter().enumerate() {
            let category_id = match categories.iter().find(|c| c.name == obj.name) {
                Some(c) => c.id,
                None => {
                    let id = categories.len() as u32;
                    categories.push(Category {
                        id,
                        name: obj.name.clone(),
                        supercategory: None,
                    });
                    id
                }
            };
            let shift = if options.exclusive_coordinates {
                0.0
            } else {
                1.0
            };
            let b = &obj.bndbox;
            let bbox =
                BoundingBox::new(b.xmin, b.ymin, b.xmax + shift, b.ymax + shift).map_err(|e| {
                    DataError::parse(
                        doc_name,
                        format!("object {} (`{}`): {}", obj_index, obj.name, e),
                    )
                })?;
            let bbox = clip_with_warning(bbox, ann.size.width, ann.size.height, doc_name)
                .ok_or_else(|| {
                    DataError::parse(
                        doc_name,
                        format!(
                            "object {} (`{}`): box lies entirely outside the {}x{} image",
                            obj_index, obj.name, ann.size.width, ann.size.height
                        ),
                    )
                })?;
            instances.push(GroundTruthInstance {
                instance_id: next_instance_id,
                image_id: image_id.clone(),
                category_id,
                bbox,
            });
            next_instance_id += 1;
        }
    }

    let annotated: BTreeSet<u32> = (0..categories.len() as u32).collect();
    Dataset::new(images, categories, instances, annotated)
}

/// Read every `*.xml` file under `dir` (sorted by path) as one dataset.
pub fn parse_voc_dir(dir: &Path, options: VocOptions) -> Result<Dataset, DataError> {
    let mut paths: Vec<_> = std::fs::read_dir(dir)
        .map_err(|e| DataError::io(dir.display().to_string(), e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "xml"))
        .collect();
    paths.sort();
    let mut documents = Vec::with_capacity(paths.len());
    for path in paths {
        let text = std::fs::read_to_string(&path)
            .map_err(|e| DataError::io(path.display().to_string(), e))?;
        documents.push((path.display().to_string(), text));
    }
    parse_voc_documents(&documents, options)
}

pub(crate) fn clip_with_warning(
    bbox: BoundingBox,
    width: u32,
    height: u32,
    source: &str,
) -> Option<BoundingBox> {
    let (w, h) = (f64::from(width), f64::from(height));
    if bbox.x_min() >= 0.0 && bbox.y_min() >= 0.0 && bbox.x_max() <= w && bbox.y_max() <= h {
        return Some(bbox);
    }
    let clipped = bbox.clip_to_image(w, h)?;
    log::warn!(
        "{source}: box [{}, {}, {}, {}] extends past the {width}x{height} image; clipped",
        bbox.x_min(),
        bbox.y_min(),
        bbox.x_max(),
        bbox.y_max(),
    );
    Some(clipped)
}
