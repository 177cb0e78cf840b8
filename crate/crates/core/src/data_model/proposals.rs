//! Ranked proposal sets and their CSV/JSON file formats.
//!
//! The CSV layout is exactly `image_id,x_min,y_min,x_max,y_max,score` with
//! a header row; rows for one image need not be contiguous. Scores are
//! written with 17 significant digits and the remaining floats in shortest
//! round-trip form, so save → load reproduces a set bit-exactly.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::geometry::{by_score_desc, BoundingBox, ScoredBox};

use super::{DataError, Dataset};

/// Per-image ranked candidate lists for one proposal method.
///
/// Construction normalizes every list to descending score (score ties
/// broken by the producer's original order) and then rewrites
/// `source_rank` to the in-list position, so a set's lists are always
/// sorted and rank `r` is the `r`-th best proposal. An image with no
/// proposals is the same as an absent image and is not stored.
#[derive(Debug, Clone, PartialEq)]
pub struct ProposalSet {
    method_name: String,
    per_image: BTreeMap<String, Vec<ScoredBox>>,
}

impl ProposalSet {
    pub fn new(
        method_name: impl Into<String>,
        per_image: BTreeMap<String, Vec<ScoredBox>>,
    ) -> Self {
        let per_image = per_image
            .into_iter()
            .filter(|(_, boxes)| !boxes.is_empty())
            .map(|(image_id, mut boxes)| {
                boxes.sort_by(by_score_desc);
                let boxes = boxes
                    .into_iter()
                    .enumerate()
                    .map(|(rank, b)| b.with_source_rank(rank))
                    .collect();
                (image_id, boxes)
            })
            .collect();
        Self {
            method_name: method_name.into(),
            per_image,
        }
    }

    pub fn method_name(&self) -> &str {
        &self.method_name
    }

    pub fn with_method_name(mut self, method_name: impl Into<String>) -> Self {
        self.method_name = method_name.into();
        self
    }

    pub fn per_image(&self) -> &BTreeMap<String, Vec<ScoredBox>> {
        &self.per_image
    }

    /// Proposals for an image; images absent from the set are empty lists.
    pub fn proposals(&self, image_id: &str) -> &[ScoredBox] {
        self.per_image.get(image_id).map_or(&[], Vec::as_slice)
    }

    /// The top-`budget` proposals of an image (all of them when fewer exist).
    pub fn top(&self, image_id: &str, budget: usize) -> &[ScoredBox] {
        let all = self.proposals(image_id);
        &all[..budget.min(all.len())]
    }

    pub fn total_proposals(&self) -> usize {
        self.per_image.values().map(Vec::len).sum()
    }

    pub fn max_proposals_per_image(&self) -> usize {
        self.per_image.values().map(Vec::len).max().unwrap_or(0)
    }

    /// Check that every image in the set exists in `dataset`.
    pub fn validate_for(&self, dataset: &Dataset) -> Result<(), DataError> {
        for image_id in self.per_image.keys() {
            if dataset.image(image_id).is_none() {
                return Err(DataError::UnknownImageId(image_id.clone()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProposalFormat {
    Csv,
    Json,
}

impl ProposalFormat {
    /// Infer the format from a file extension (`.csv` or `.json`).
    pub fn from_path(path: &Path) -> Option<ProposalFormat> {
        match path.extension()?.to_str()? {
            "csv" => Some(ProposalFormat::Csv),
            "json" => Some(ProposalFormat::Json),
            _ => None,
        }
    }
}

const CSV_HEADER: [&str; 6] = ["image_id", "x_min", "y_min", "x_max", "y_max", "score"];

/// Shortest decimal form that round-trips to the same f64.
fn fmt_float(v: f64) -> String {
    format!("{v}")
}

/// 17 significant digits: always reparses to the identical f64.
fn fmt_score(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn proposals_to_csv_string(set: &ProposalSet) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("csv header");
    for (image_id, boxes) in set.per_image() {
        for b in boxes {
            let [x0, y0, x1, y1] = b.bbox().corners();
            w.write_record([
                image_id.as_str(),
                &fmt_float(x0),
                &fmt_float(y0),
                &fmt_float(x1),
                &fmt_float(y1),
                &fmt_score(b.score()),
            ])
            .expect("csv record");
        }
    }
    String::from_utf8(w.into_inner().expect("csv flush")).expect("csv is utf-8")
}

pub fn proposals_from_csv_str(
    text: &str,
    method_name: &str,
    path: &str,
) -> Result<ProposalSet, DataError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    {
        let headers = reader
            .headers()
            .map_err(|e| DataError::parse(path, e.to_string()))?;
        if headers.iter().ne(CSV_HEADER) {
            return Err(DataError::CsvParse {
                path: path.to_string(),
                line: 1,
                message: format!(
                    "expected header `{}`, found `{}`",
                    CSV_HEADER.join(","),
                    headers.iter().collect::<Vec<_>>().join(",")
                ),
            });
        }
    }

    let mut per_image: BTreeMap<String, Vec<ScoredBox>> = BTreeMap::new();
    for result in reader.records() {
        let record = result.map_err(|e| DataError::parse(path, e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        let err = |message: String| DataError::CsvParse {
            path: path.to_string(),
            line,
            message,
        };
        if record.len() != 6 {
            return Err(err(format!("expected 6 fields, found {}", record.len())));
        }
        let image_id = record[0].to_string();
        let mut nums = [0.0f64; 5];
        for (i, v) in nums.iter_mut().enumerate() {
            let field = &record[i + 1];
            *v = field.parse().map_err(|_| {
                err(format!(
                    "`{}` is not a number ({})",
                    field,
                    CSV_HEADER[i + 1]
                ))
            })?;
        }
        let bbox =
            BoundingBox::new(nums[0], nums[1], nums[2], nums[3]).map_err(|e| err(e.to_string()))?;
        let rank = per_image.get(&image_id).map_or(0, Vec::len);
        let scored = ScoredBox::new(bbox, nums[4], rank).map_err(|e| err(e.to_string()))?;
        per_image.entry(image_id).or_default().push(scored);
    }
    Ok(ProposalSet::new(method_name, per_image))
}

#[derive(Serialize, Deserialize)]
struct ProposalsJson {
    method: String,
    images: Vec<ProposalsImageJson>,
}

#[derive(Serialize, Deserialize)]
struct ProposalsImageJson {
    image_id: String,
    proposals: Vec<ProposalJson>,
}

#[derive(Serialize, Deserialize)]
struct ProposalJson {
    x_min: f64,
    y_min: f64,
    x_max: f64,
    y_max: f64,
    score: f64,
}

pub fn proposals_to_json_string(set: &ProposalSet) -> String {
    let doc = ProposalsJson {
        method: set.method_name().to_string(),
        images: set
            .per_image()
            .iter()
            .map(|(image_id, boxes)| ProposalsImageJson {
                image_id: image_id.clone(),
                proposals: boxes
                    .iter()
                    .map(|b| {
                        let [x_min, y_min, x_max, y_max] = b.bbox().corners();
                        ProposalJson {
                            x_min,
                            y_min,
                            x_max,
                            y_max,
                            score: b.score(),
                        }
                    })
                    .collect(),
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("proposals serialize");
    text.push('\n');
    text
}

pub fn proposals_from_json_str(text: &str, path: &str) -> Result<ProposalSet, DataError> {
    let doc: ProposalsJson =
        serde_json::from_str(text).map_err(|e| DataError::parse(path, e.to_string()))?;
    let mut per_image: BTreeMap<String, Vec<ScoredBox>> = BTreeMap::new();
    for image in doc.images {
        let mut boxes = Vec::with_capacity(image.proposals.len());
        for (rank, p) in image.proposals.iter().enumerate() {
            let bbox = BoundingBox::new(p.x_min, p.y_min, p.x_max, p.y_max).map_err(|e| {
                DataError::parse(path, format!("image `{}`: {}", image.image_id, e))
            })?;
            let scored = ScoredBox::new(bbox, p.score, rank).map_err(|e| {
                DataError::parse(path, format!("image `{}`: {}", image.image_id, e))
            })?;
            boxes.push(scored);
        }
        if per_image.insert(image.image_id.clone(), boxes).is_some() {
            return Err(DataError::parse(
                path,
                format!("image `{}` listed twice", image.image_id),
            ));
        }
    }
    Ok(ProposalSet::new(doc.method, per_image))
}

/// Load proposals from disk. For CSV, which carries no method name, the
/// method is named after the file stem.
pub fn load_proposals(path: &Path, format: ProposalFormat) -> Result<ProposalSet, DataError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| DataError::io(path.display().to_string(), e))?;
    let display = path.display().to_string();
    match format {
        ProposalFormat::Csv => {
            let method = path
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or("proposals");
            proposals_from_csv_str(&text, method, &display)
        }
        ProposalFormat::Json => proposals_from_json_str(&text, &display),
    }
}

pub fn save_proposals(
    set: &ProposalSet,
    path: &Path,
    format: ProposalFormat,
) -> Result<(), DataError> {
    let text = match format {
        ProposalFormat::Csv => proposals_to_csv_string(set),
        ProposalFormat::Json => proposals_to_json_string(set),
    };
    std::fs::write(path, text).map_err(|e| DataError::io(path.display().to_string(), e))
}
