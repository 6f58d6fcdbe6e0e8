//! Converts per-class probability maps into the outputs of the other
//! vision tasks: semantic segmentation, grounding boxes, detections,
//! multi-label and scene classification, counts and rule-based captions.
//!
//! Every function is deterministic: identical inputs give byte-identical
//! outputs, so batch runs can be parallelized per image and merged in any
//! order.

mod caption;
mod refine;

pub use caption::generate_caption;
pub use refine::split_by_markers;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mask::{binarize, connected_components, BBox, BinaryMask, Connectivity, ProbMap};

#[derive(Debug, Error)]
pub enum ConvertError {
    #[error("class maps must share dimensions: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(u32, u32, u32, u32),
    #[error("duplicate category {0:?}")]
    DuplicateCategory(String),
    #[error("at least one class map is required")]
    NoClasses,
    #[error("parameter {name} = {value} outside [0,1]")]
    BadParameter { name: &'static str, value: f64 },
}

/// How multi-label decisions are made.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassificationStrategy {
    /// Positive when the pooled confidence score reaches `tau_cls`.
    ProbLevel,
    /// Positive when the thresholded mask area exceeds `area_threshold`.
    MaskLevel,
}

/// Thresholds and pooling weights for all task conversions.
///
/// The defaults are the ones that performed best in practice:
/// `tau_cls = 0.5`, `lambda_multilabel = 0.5` and `lambda_scene = 1.0`
/// (pure average pooling for scene classification).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConversionConfig {
    /// Class-confidence gate and per-pixel binarization threshold.
    pub tau_seg: f32,
    /// Confidence threshold for a positive multi-label decision.
    pub tau_cls: f64,
    /// Mean/max pooling balance for multi-label confidence.
    pub lambda_multilabel: f64,
    /// Mean/max pooling balance for scene classification.
    pub lambda_scene: f64,
    pub classification_strategy: ClassificationStrategy,
    /// Minimum foreground area (exclusive) for the mask-level strategy.
    pub area_threshold_masklevel: u64,
    /// Split touching objects with the marker-based refinement pass.
    pub refine: bool,
    /// Suppression radius in pixels between refinement markers.
    pub marker_radius: u32,
}

impl Default for ConversionConfig {
    fn default() -> Self {
        Self {
            tau_seg: 0.5,
            tau_cls: 0.5,
            lambda_multilabel: 0.5,
            lambda_scene: 1.0,
            classification_strategy: ClassificationStrategy::ProbLevel,
            area_threshold_masklevel: 0,
            refine: true,
            marker_radius: 5,
        }
    }
}

impl ConversionConfig {
    pub fn validate(&self) -> Result<(), ConvertError> {
        let checks = [
            ("tau_seg", f64::from(self.tau_seg)),
            ("tau_cls", self.tau_cls),
            ("lambda_multilabel", self.lambda_multilabel),
            ("lambda_scene", self.lambda_scene),
        ];
        for (name, value) in checks {
            if !(0.0..=1.0).contains(&value) {
                return Err(ConvertError::BadParameter { name, value });
            }
        }
        Ok(())
    }
}

/// One detected object: box, category and a confidence score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub bbox: BBox,
    pub category: String,
    /// Mean probability over the object's pixels.
    pub score: f64,
}

/// Per-pixel category labels; 0 is background, label `k` maps to
/// `categories[k - 1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemSegMap {
    width: u32,
    height: u32,
    labels: Vec<u32>,
    categories: Vec<String>,
}

impl SemSegMap {
    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn categories(&self) -> &[String] {
        &self.categories
    }

    pub fn category_at(&self, x: u32, y: u32) -> Option<&str> {
        let label = self.labels[y as usize * self.width as usize + x as usize];
        if label == 0 {
            None
        } else {
            Some(&self.categories[label as usize - 1])
        }
    }

    /// Binary mask of the pixels assigned to `category`.
    pub fn class_mask(&self, category: &str) -> Option<BinaryMask> {
        let label = self.categories.iter().position(|c| c == category)? as u32 + 1;
        let bits = self.labels.iter().map(|&l| u8::from(l == label)).collect();
        Some(BinaryMask::new(self.width, self.height, bits).expect("dims are valid"))
    }
}

/// Pooled class confidence: `lambda * mean(P) + (1 - lambda) * max(P)`.
///
/// `lambda = 1` is pure average pooling, `lambda = 0` pure max pooling;
/// the result always lies between the map's min and max.
pub fn aggregate_confidence(map: &ProbMap, lambda: f64) -> f64 {
    assert!(
        (0.0..=1.0).contains(&lambda),
        "lambda {lambda} outside [0,1]"
    );
    // compensated summation keeps the mean exact enough for tie-free
    // thresholding on large rasters
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    let mut max = 0.0f64;
    for &v in map.values() {
        let v = f64::from(v);
        let y = v - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        if v > max {
            max = v;
        }
    }
    let mean = sum / map.values().len() as f64;
    lambda * mean + (1.0 - lambda) * max
}

fn validate_class_maps(per_class: &[ProbMap]) -> Result<(), ConvertError> {
    let mut seen = BTreeSet::new();
    for map in per_class {
        if !seen.insert(map.label.as_str()) {
            return Err(ConvertError::DuplicateCategory(map.label.clone()));
        }
    }
    for pair in per_class.windows(2) {
        if !pair[0].same_dims(&pair[1]) {
            return Err(ConvertError::DimensionMismatch(
                pair[0].width(),
                pair[0].height(),
                pair[1].width(),
                pair[1].height(),
            ));
        }
    }
    Ok(())
}

/// Whether a class map passes the confidence gate at `tau_seg`.
fn class_survives(map: &ProbMap, config: &ConversionConfig) -> bool {
    aggregate_confidence(map, config.lambda_multilabel) >= f64::from(config.tau_seg)
}

/// Aggregates per-class maps into one semantic segmentation map.
///
/// Classes whose pooled confidence falls below `tau_seg` are suppressed
/// entirely; surviving classes are binarized at `tau_seg`, and a pixel
/// claimed by several classes goes to the one with the highest per-pixel
/// probability (first class in input order on an exact tie).
pub fn semantic_segmentation(
    per_class: &[ProbMap],
    config: &ConversionConfig,
) -> Result<SemSegMap, ConvertError> {
    validate_class_maps(per_class)?;
    let first = per_class.first().ok_or(ConvertError::NoClasses)?;
    let (width, height) = (first.width(), first.height());
    let n = width as usize * height as usize;

    let mut labels = vec![0u32; n];
    let mut best = vec![0.0f32; n];
    let mut categories = Vec::new();
    for map in per_class {
        if !class_survives(map, config) {
            continue;
        }
        categories.push(map.label.clone());
        let label = categories.len() as u32;
        for (i, &p) in map.values().iter().enumerate() {
            if p >= config.tau_seg && (labels[i] == 0 || p > best[i]) {
                labels[i] = label;
                best[i] = p;
            }
        }
    }
    Ok(SemSegMap {
        width,
        height,
        labels,
        categories,
    })
}

/// Tight bounding box over a mask's foreground; `None` for empty masks.
pub fn mask_to_bbox(mask: &BinaryMask) -> Option<BBox> {
    let mut bbox: Option<BBox> = None;
    for (i, &bit) in mask.bits().iter().enumerate() {
        if bit == 0 {
            continue;
        }
        let x = (i as u32) % mask.width();
        let y = (i as u32) / mask.width();
        bbox = Some(match bbox {
            None => BBox::new(x, y, x, y),
            Some(b) => BBox::new(
                b.x_min.min(x),
                b.y_min.min(y),
                b.x_max.max(x),
                b.y_max.max(y),
            ),
        });
    }
    bbox
}

/// Extracts one detection per object instance from the class maps.
///
/// Each surviving class map is binarized at `tau_seg` and split into
/// connected components; when refinement is enabled, components holding
/// several probability peaks are further split so touching objects do not
/// merge into one box. Detections are ordered by input class, then by the
/// component's topmost row and leftmost column.
pub fn detect_objects(
    per_class: &[ProbMap],
    config: &ConversionConfig,
) -> Result<Vec<Detection>, ConvertError> {
    validate_class_maps(per_class)?;
    let mut detections = Vec::new();
    for map in per_class {
        if !class_survives(map, config) {
            continue;
        }
        let mask = binarize(map, config.tau_seg);
        let mut pieces = Vec::new();
        for component in connected_components(&mask, Connectivity::Eight) {
            if config.refine {
                pieces.extend(split_by_markers(
                    &component.mask,
                    map,
                    config.tau_seg,
                    config.marker_radius,
                ));
            } else {
                pieces.push(component.mask);
            }
        }
        let mut keyed: Vec<(BBox, BinaryMask)> = pieces
            .into_iter()
            .map(|m| (mask_to_bbox(&m).expect("component pieces are non-empty"), m))
            .collect();
        keyed.sort_by_key(|(b, _)| (b.y_min, b.x_min));
        for (bbox, piece) in keyed {
            let mut sum = 0.0f64;
            let mut count = 0u64;
            for (x, y) in piece.foreground() {
                sum += f64::from(map.get(x, y));
                count += 1;
            }
            detections.push(Detection {
                bbox,
                category: map.label.clone(),
                score: sum / count as f64,
            });
        }
    }
    Ok(detections)
}

/// Set of categories judged present in the image.
pub fn multilabel_classify(per_class: &[ProbMap], config: &ConversionConfig) -> BTreeSet<String> {
    per_class
        .iter()
        .filter(|map| match config.classification_strategy {
            ClassificationStrategy::ProbLevel => {
                aggregate_confidence(map, config.lambda_multilabel) >= config.tau_cls
            }
            ClassificationStrategy::MaskLevel => {
                binarize(map, config.tau_seg).area() > config.area_threshold_masklevel
            }
        })
        .map(|map| map.label.clone())
        .collect()
}

/// Single scene class: the highest pooled confidence, with exact ties
/// resolved to the lexicographically smallest category.
pub fn scene_classify(
    per_class: &[ProbMap],
    config: &ConversionConfig,
) -> Result<String, ConvertError> {
    let mut best: Option<(f64, &str)> = None;
    for map in per_class {
        let score = aggregate_confidence(map, config.lambda_scene);
        best = match best {
            None => Some((score, &map.label)),
            Some((bs, bl)) if score > bs || (score == bs && map.label.as_str() < bl) => {
                Some((score, &map.label))
            }
            keep => keep,
        };
    }
    best.map(|(_, label)| label.to_string())
        .ok_or(ConvertError::NoClasses)
}

/// Number of detections whose category equals `target`.
pub fn count_objects(detections: &[Detection], target: &str) -> usize {
    detections.iter().filter(|d| d.category == target).count()
}
