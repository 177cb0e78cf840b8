//! Canonical dataset and proposal representations, plus parsers/converters
//! for VOC-style XML, COCO-style JSON, and the toolkit's own formats.
//!
//! A [`Dataset`] models *partial annotation* as data: `annotated_categories`
//! records which categories were actually labeled, so evaluation regimes
//! that restrict the category universe are expressed by
//! [`Dataset::restrict_categories`] rather than by metric-time filtering.

pub mod canonical;
pub mod coco;
pub mod proposals;
pub mod stats;
pub mod voc;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::geometry::{BoundingBox, GeometryError};

pub use proposals::{load_proposals, save_proposals, ProposalFormat, ProposalSet};
pub use stats::{annotation_stats, CategoryStats, StatsReport};

#[derive(Debug, Error)]
pub enum DataError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("duplicate image id `{0}`")]
    DuplicateImageId(String),
    #[error("duplicate category id {0}")]
    DuplicateCategoryId(u32),
    #[error("duplicate category name `{0}`")]
    DuplicateCategoryName(String),
    #[error("duplicate annotation id {0}")]
    DuplicateAnnotationId(u64),
    #[error("category ids must be dense: expected ids 0..{count}, found id {found}")]
    NonDenseCategoryIds { count: usize, found: u32 },
    #[error("unknown category id {0}")]
    UnknownCategoryId(u32),
    #[error("unknown image id `{0}`")]
    UnknownImageId(String),
    #[error("image `{id}`: {reason}")]
    InvalidImage { id: String, reason: String },
    #[error("annotation {id}: {reason}")]
    InvalidAnnotation { id: u64, reason: String },
    #[error("annotated_categories refers to unknown category id {0}")]
    UnknownAnnotatedCategory(u32),
    #[error("annotation {id} has category {category_id} outside annotated_categories")]
    UnannotatedCategory { id: u64, category_id: u32 },
    #[error("parse error in {source_name}: {message}")]
    Parse {
        source_name: String,
        message: String,
    },
    #[error("{path} line {line}: {message}")]
    CsvParse {
        path: String,
        line: u64,
        message: String,
    },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl DataError {
    pub(crate) fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        DataError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(source_name: impl Into<String>, message: impl Into<String>) -> Self {
        DataError::Parse {
            source_name: source_name.into(),
            message: message.into(),
        }
    }
}

/// An object category. Identity is the name string; ids are dense indexes
/// assigned in first-appearance order by the parsers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Category {
    pub id: u32,
    pub name: String,
    pub supercategory: Option<String>,
}

/// One image: its external identifier and pixel dimensions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageRecord {
    pub image_id: String,
    pub width: u32,
    pub height: u32,
}

impl ImageRecord {
    pub fn area(&self) -> f64 {
        f64::from(self.width) * f64::from(self.height)
    }
}

/// A single annotated object instance.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruthInstance {
    pub instance_id: u64,
    pub image_id: String,
    pub category_id: u32,
    pub bbox: BoundingBox,
}

/// Images, the category universe, ground-truth instances, and the subset of
/// categories that is actually labeled.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    images: Vec<ImageRecord>,
    categories: Vec<Category>,
    instances: Vec<GroundTruthInstance>,
    annotated_categories: BTreeSet<u32>,
}

impl Dataset {
    /// Validates all invariants and normalizes ordering: images sorted by
    /// id, categories by id (which must be dense `0..n`), instances by
    /// `(image_id, instance_id)`.
    pub fn new(
        mut images: Vec<ImageRecord>,
        mut categories: Vec<Category>,
        mut instances: Vec<GroundTruthInstance>,
        annotated_categories: BTreeSet<u32>,
    ) -> Result<Self, DataError> {
        images.sort_by(|a, b| a.image_id.cmp(&b.image_id));
        for pair in images.windows(2) {
            if pair[0].image_id == pair[1].image_id {
                return Err(DataError::DuplicateImageId(pair[0].image_id.clone()));
            }
        }
        for img in &images {
            if img.image_id.is_empty() {
                return Err(DataError::InvalidImage {
                    id: String::new(),
                    reason: "empty image id".into(),
                });
            }
            if img.width == 0 || img.height == 0 {
                return Err(DataError::InvalidImage {
                    id: img.image_id.clone(),
                    reason: format!("non-positive dimensions {}x{}", img.width, img.height),
                });
            }
        }

        categories.sort_by_key(|c| c.id);
        let mut names = BTreeSet::new();
        for (idx, cat) in categories.iter().enumerate() {
            if cat.id as usize != idx {
                if categories.iter().filter(|c| c.id == cat.id).count() > 1 {
                    return Err(DataError::DuplicateCategoryId(cat.id));
                }
                return Err(DataError::NonDenseCategoryIds {
                    count: categories.len(),
                    found: cat.id,
                });
            }
            if cat.name.is_empty() {
                return Err(DataError::InvalidAnnotation {
                    id: u64::from(cat.id),
                    reason: "empty category name".into(),
                });
            }
            if !names.insert(cat.name.clone()) {
                return Err(DataError::DuplicateCategoryName(cat.name.clone()));
            }
        }

        let category_count = categories.len() as u32;
        for &id in &annotated_categories {
            if id >= category_count {
                return Err(DataError::UnknownAnnotatedCategory(id));
            }
        }

        let image_dims: BTreeMap<&str, (u32, u32)> = images
            .iter()
            .map(|i| (i.image_id.as_str(), (i.width, i.height)))
            .collect();
        let mut instance_ids = BTreeSet::new();
        for inst in &instances {
            if !instance_ids.insert(inst.instance_id) {
                return Err(DataError::DuplicateAnnotationId(inst.instance_id));
            }
            let Some(&(w, h)) = image_dims.get(inst.image_id.as_str()) else {
                return Err(DataError::UnknownImageId(inst.image_id.clone()));
            };
            if inst.category_id >= category_count {
                return Err(DataError::UnknownCategoryId(inst.category_id));
            }
            if !annotated_categories.contains(&inst.category_id) {
                return Err(DataError::UnannotatedCategory {
                    id: inst.instance_id,
                    category_id: inst.category_id,
                });
            }
            let b = &inst.bbox;
            if b.x_min() < 0.0
                || b.y_min() < 0.0
                || b.x_max() > f64::from(w)
                || b.y_max() > f64::from(h)
            {
                return Err(DataError::InvalidAnnotation {
                    id: inst.instance_id,
                    reason: format!(
                        "box [{}, {}, {}, {}] outside image bounds {}x{}",
                        b.x_min(),
                        b.y_min(),
                        b.x_max(),
                        b.y_max(),
                        w,
                        h
                    ),
                });
            }
        }
        instances.sort_by(|a, b| {
            a.image_id
                .cmp(&b.image_id)
                .then(a.instance_id.cmp(&b.instance_id))
        });

        Ok(Self {
            images,
            categories,
            instances,
            annotated_categories,
        })
    }

    pub fn images(&self) -> &[ImageRecord] {
        &self.images
    }

    pub fn categories(&self) -> &[Category] {
        &self.categories
    }

    pub fn instances(&self) -> &[GroundTruthInstance] {
        &self.instances
    }

    pub fn annotated_categories(&self) -> &BTreeSet<u32> {
        &self.annotated_categories
    }

    pub fn category(&self, id: u32) -> Option<&Category> {
        self.categories.get(id as usize)
    }

    pub fn category_by_name(&self, name: &str) -> Option<&Category> {
        self.categories.iter().find(|c| c.name == name)
    }

    pub fn image(&self, image_id: &str) -> Option<&ImageRecord> {
        self.images
            .binary_search_by(|i| i.image_id.as_str().cmp(image_id))
            .ok()
            .map(|idx| &self.images[idx])
    }

    pub fn all_category_ids(&self) -> BTreeSet<u32> {
        (0..self.categories.len() as u32).collect()
    }

    /// Instances grouped by image, in image-id order. Images without
    /// instances are present with empty lists.
    pub fn instances_by_image(&self) -> BTreeMap<&str, Vec<&GroundTruthInstance>> {
        let mut map: BTreeMap<&str, Vec<&GroundTruthInstance>> = self
            .images
            .iter()
            .map(|i| (i.image_id.as_str(), Vec::new()))
            .collect();
        for inst in &self.instances {
            map.get_mut(inst.image_id.as_str())
                .expect("instance image validated at construction")
                .push(inst);
        }
        map
    }

    /// Overlay supercategories from a name → supercategory map (used for
    /// sources that do not carry the field). Unmapped categories keep
    /// whatever they had.
    pub fn with_supercategories(&self, map: &BTreeMap<String, String>) -> Dataset {
        let mut out = self.clone();
        for cat in &mut out.categories {
            if let Some(group) = map.get(&cat.name) {
                cat.supercategory = Some(group.clone());
            }
        }
        out
    }

    /// Keep only instances of the categories in `keep`. The category table
    /// and image list are unchanged; `annotated_categories` becomes
    /// `keep ∩ annotated_categories`.
    pub fn restrict_categories(&self, keep: &BTreeSet<u32>) -> Result<Dataset, DataError> {
        let count = self.categories.len() as u32;
        for &id in keep {
            if id >= count {
                return Err(DataError::UnknownCategoryId(id));
            }
        }
        let annotated: BTreeSet<u32> = self
            .annotated_categories
            .intersection(keep)
            .copied()
            .collect();
        let instances = self
            .instances
            .iter()
            .filter(|i| keep.contains(&i.category_id))
            .cloned()
            .collect();
        Ok(Dataset {
            images: self.images.clone(),
            categories: self.categories.clone(),
            instances,
            annotated_categories: annotated,
        })
    }
}
