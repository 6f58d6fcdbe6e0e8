//! File formats: JSON-lines manifests, vocabulary files, probability-map
//! directories and mask images.
//!
//! Masks persist either as 8-bit single-channel images with 0/255 values
//! or as RLE runs inside JSON-lines records. Probability maps are 8-bit
//! PGM/PNG grayscale files (`value / 255`) or RLE JSON for hard 0/1 maps,
//! named `<image_id>/<category>.<ext>` inside the input directory.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{EngineError, RawAnnotation, Triplet, Vocab};
use crate::mask::{BBox, BinaryMask, MaskError, ProbMap, RleMask};

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
    #[error(transparent)]
    Mask(#[from] MaskError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ManifestError + '_ {
    move |source| ManifestError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// A manifest line that failed to parse; reported, never fatal.
#[derive(Debug, Clone, Serialize)]
pub struct LineIssue {
    /// 1-based line number.
    pub line: usize,
    pub message: String,
}

/// Reads a JSON-lines file, collecting malformed lines as issues.
/// Blank lines are skipped.
pub fn read_jsonl<T: DeserializeOwned>(
    path: &Path,
) -> Result<(Vec<T>, Vec<LineIssue>), ManifestError> {
    let file = File::open(path).map_err(io_err(path))?;
    let mut records = Vec::new();
    let mut issues = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str(&line) {
            Ok(record) => records.push(record),
            Err(e) => issues.push(LineIssue {
                line: idx + 1,
                message: e.to_string(),
            }),
        }
    }
    Ok((records, issues))
}

/// Writes records as one JSON object per line.
pub fn write_jsonl<T: Serialize>(path: &Path, records: &[T]) -> Result<(), ManifestError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(io_err(path))?;
    }
    let mut out = BufWriter::new(File::create(path).map_err(io_err(path))?);
    for record in records {
        let line = serde_json::to_string(record).map_err(|e| ManifestError::Format {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        writeln!(out, "{line}").map_err(io_err(path))?;
    }
    out.flush().map_err(io_err(path))?;
    Ok(())
}

/// Serializes a value as pretty JSON to `path`.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), ManifestError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(io_err(path))?;
    }
    let text = serde_json::to_string_pretty(value).map_err(|e| ManifestError::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    fs::write(path, text + "\n").map_err(io_err(path))
}

/// Loads and validates a vocabulary file.
pub fn load_vocab(path: &Path) -> Result<Vocab, ManifestError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let vocab: Vocab = serde_json::from_str(&text).map_err(|e| ManifestError::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    vocab.validate()?;
    Ok(vocab)
}

impl From<&Triplet> for RawAnnotation {
    fn from(t: &Triplet) -> Self {
        RawAnnotation {
            image: t.image.clone(),
            expression: t.expression.clone(),
            mask: RleMask::from(&t.mask),
            strategy: Some(t.strategy),
            categories: t.categories.iter().cloned().collect(),
            attributes: t.attributes.iter().cloned().collect(),
        }
    }
}

/// One detection or ground-truth box inside a record.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoxRecord {
    pub category: String,
    pub bbox: BBox,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub score: Option<f64>,
}

/// Per-class mask of a semantic segmentation result.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassMaskRecord {
    pub category: String,
    pub mask: RleMask,
}

/// One JSON-lines record keyed by image. Task conversion fills the output
/// fields; evaluation accepts the same schema on both the prediction and
/// ground-truth side, as well as plain triplet records (`expression` +
/// `mask`), and scores whichever metric families both sides provide.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ImageRecord {
    pub image: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expression: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mask: Option<RleMask>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub semseg: Option<Vec<ClassMaskRecord>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boxes: Option<Vec<BoxRecord>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scene: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counts: Option<BTreeMap<String, u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub caption: Option<String>,
}

/// Reads an 8-bit single-channel mask image; any nonzero pixel is
/// foreground.
pub fn read_mask_image(path: &Path) -> Result<BinaryMask, ManifestError> {
    let img = image::open(path)
        .map_err(|e| ManifestError::Format {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?
        .into_luma8();
    let (width, height) = img.dimensions();
    Ok(BinaryMask::new(
        width,
        height,
        img.into_raw()
            .into_iter()
            .map(|v| u8::from(v != 0))
            .collect(),
    )?)
}

/// Writes a mask as an 8-bit single-channel image with 0/255 values; the
/// format follows the file extension (`.png` or `.pgm`).
pub fn write_mask_image(path: &Path, mask: &BinaryMask) -> Result<(), ManifestError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(io_err(path))?;
    }
    let img = image::GrayImage::from_raw(
        mask.width(),
        mask.height(),
        mask.bits().iter().map(|&b| b * 255).collect(),
    )
    .expect("buffer length matches dimensions");
    img.save(path).map_err(|e| ManifestError::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Reads one probability map. Grayscale images decode as `value / 255`;
/// `.json` files hold an RLE mask read as a hard 0/1 map.
pub fn read_prob_map(path: &Path, label: &str) -> Result<ProbMap, ManifestError> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .unwrap_or_default()
        .to_ascii_lowercase();
    if ext == "json" {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        let rle: RleMask = serde_json::from_str(&text).map_err(|e| ManifestError::Format {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        let mask = rle.decode()?;
        let values = mask.bits().iter().map(|&b| f32::from(b)).collect();
        return Ok(ProbMap::new(mask.width(), mask.height(), values, label)?);
    }
    let img = image::open(path)
        .map_err(|e| ManifestError::Format {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?
        .into_luma8();
    let (width, height) = img.dimensions();
    let values = img
        .into_raw()
        .into_iter()
        .map(|v| f32::from(v) / 255.0)
        .collect();
    Ok(ProbMap::new(width, height, values, label)?)
}

/// Writes a probability map as an 8-bit grayscale image
/// (`round(value * 255)`); format follows the extension.
pub fn write_prob_map(path: &Path, map: &ProbMap) -> Result<(), ManifestError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(io_err(path))?;
    }
    let img = image::GrayImage::from_raw(
        map.width(),
        map.height(),
        map.values()
            .iter()
            .map(|&v| (v * 255.0).round() as u8)
            .collect(),
    )
    .expect("buffer length matches dimensions");
    img.save(path).map_err(|e| ManifestError::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Loads every per-class map of one image directory, sorted by category
/// (the file stem). Supported extensions: `pgm`, `png`, `json`.
pub fn load_prob_map_dir(dir: &Path) -> Result<Vec<ProbMap>, ManifestError> {
    let mut files: Vec<(String, PathBuf)> = Vec::new();
    for entry in fs::read_dir(dir).map_err(io_err(dir))? {
        let entry = entry.map_err(io_err(dir))?;
        let path = entry.path();
        if !path.is_file() {
            continue;
        }
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .unwrap_or_default()
            .to_ascii_lowercase();
        if !matches!(ext.as_str(), "pgm" | "png" | "json") {
            continue;
        }
        let Some(stem) = path.file_stem().and_then(|s| s.to_str()) else {
            continue;
        };
        files.push((stem.to_string(), path));
    }
    files.sort();
    for pair in files.windows(2) {
        if pair[0].0 == pair[1].0 {
            return Err(ManifestError::Format {
                path: dir.to_path_buf(),
                message: format!("duplicate category {:?}", pair[0].0),
            });
        }
    }
    files
        .into_iter()
        .map(|(stem, path)| read_prob_map(&path, &stem))
        .collect()
}
