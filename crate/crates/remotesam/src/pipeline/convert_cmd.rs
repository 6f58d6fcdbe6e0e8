//! The `convert` pipeline: probability-map directories in, task-output
//! manifest out.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use super::{worker_pool, ImageFailure, PipelineError};
use crate::convert::{
    detect_objects, generate_caption, multilabel_classify, scene_classify, semantic_segmentation,
    ConversionConfig,
};
use crate::manifest::{
    load_prob_map_dir, write_json, write_jsonl, BoxRecord, ClassMaskRecord, ImageRecord,
};
use crate::mask::RleMask;

#[derive(Debug, Clone)]
pub struct ConvertJob {
    /// Directory holding one `<image_id>/` subdirectory per image, each
    /// with `<category>.{pgm,png,json}` probability maps.
    pub input: PathBuf,
    /// Output directory; receives `predictions.jsonl` and `summary.json`.
    pub output: PathBuf,
    pub conversion: ConversionConfig,
    pub workers: usize,
}

#[derive(Debug, Serialize)]
pub struct ConvertSummary {
    pub images: usize,
    pub succeeded: usize,
    pub failures: Vec<ImageFailure>,
    pub warnings: Vec<String>,
}

/// Runs every task conversion over each image directory and writes one
/// JSON-lines record per image. Per-image failures are reported in the
/// summary and never abort the batch; the command fails only when no image
/// succeeds at all.
pub fn cmd_convert(job: &ConvertJob) -> Result<ConvertSummary, PipelineError> {
    job.conversion
        .validate()
        .map_err(|e| PipelineError::Usage(e.to_string()))?;
    let mut dirs: Vec<(String, PathBuf)> = Vec::new();
    let entries = fs::read_dir(&job.input)
        .map_err(|e| PipelineError::Usage(format!("cannot read {}: {e}", job.input.display())))?;
    for entry in entries {
        let entry =
            entry.map_err(|e| PipelineError::Usage(format!("cannot read input dir: {e}")))?;
        if entry.path().is_dir() {
            if let Some(name) = entry.file_name().to_str() {
                dirs.push((name.to_string(), entry.path()));
            }
        }
    }
    dirs.sort();

    let mut summary = ConvertSummary {
        images: dirs.len(),
        succeeded: 0,
        failures: Vec::new(),
        warnings: Vec::new(),
    };
    if dirs.is_empty() {
        summary.warnings.push(format!(
            "no image directories under {}",
            job.input.display()
        ));
    }

    let pool = worker_pool(job.workers)?;
    let results: Vec<(String, Result<ImageRecord, String>)> = pool.install(|| {
        dirs.par_iter()
            .map(|(image, dir)| (image.clone(), process_image(image, dir, &job.conversion)))
            .collect()
    });

    let mut records = Vec::new();
    for (image, result) in results {
        match result {
            Ok(record) => {
                records.push(record);
                summary.succeeded += 1;
            }
            Err(message) => summary.failures.push(ImageFailure { image, message }),
        }
    }

    write_jsonl(&job.output.join("predictions.jsonl"), &records)
        .map_err(|e| PipelineError::Data(e.to_string()))?;
    write_json(&job.output.join("summary.json"), &summary)
        .map_err(|e| PipelineError::Data(e.to_string()))?;

    if summary.images > 0 && summary.succeeded == 0 {
        return Err(PipelineError::Data(format!(
            "all {} image(s) failed to convert",
            summary.images
        )));
    }
    Ok(summary)
}

fn process_image(
    image: &str,
    dir: &Path,
    config: &ConversionConfig,
) -> Result<ImageRecord, String> {
    let maps = load_prob_map_dir(dir).map_err(|e| e.to_string())?;
    if maps.is_empty() {
        return Err("no probability maps found".to_string());
    }
    let (width, height) = (maps[0].width(), maps[0].height());

    let semseg = semantic_segmentation(&maps, config).map_err(|e| e.to_string())?;
    let detections = detect_objects(&maps, config).map_err(|e| e.to_string())?;
    let labels = multilabel_classify(&maps, config);
    let scene = scene_classify(&maps, config).map_err(|e| e.to_string())?;

    let counts: BTreeMap<String, usize> = maps
        .iter()
        .map(|m| {
            let n = detections.iter().filter(|d| d.category == m.label).count();
            (m.label.clone(), n)
        })
        .collect();
    let caption = generate_caption(&labels, &counts, &detections, width, height);

    let semseg_records: Vec<ClassMaskRecord> = semseg
        .categories()
        .iter()
        .map(|category| ClassMaskRecord {
            category: category.clone(),
            mask: RleMask::from(
                &semseg
                    .class_mask(category)
                    .expect("category comes from the map itself"),
            ),
        })
        .collect();

    Ok(ImageRecord {
        image: image.to_string(),
        expression: None,
        mask: None,
        semseg: Some(semseg_records),
        boxes: Some(
            detections
                .iter()
                .map(|d| BoxRecord {
                    category: d.category.clone(),
                    bbox: d.bbox,
                    score: Some(d.score),
                })
                .collect(),
        ),
        labels: Some(labels.into_iter().collect()),
        scene: Some(scene),
        counts: Some(counts.into_iter().map(|(k, v)| (k, v as u64)).collect()),
        caption: Some(caption),
    })
}
