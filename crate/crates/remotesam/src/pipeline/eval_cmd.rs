//! The `eval` pipeline: aligns prediction and ground-truth manifests by
//! image (and expression, for triplet-style records) and scores every
//! metric family both sides provide.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use serde::Serialize;

use crate::convert::{mask_to_bbox, Detection};
use crate::eval::{
    counting_accuracy, detection_ap50, grounding_metrics, multilabel_accuracy, seg_metrics,
    CountingRule, EvalReport, GtBox, MultilabelRule, PrRule,
};
use crate::manifest::{read_jsonl, write_json, ImageRecord, LineIssue};
use crate::mask::{BBox, BinaryMask};

use super::PipelineError;

#[derive(Debug, Clone)]
pub struct EvalJob {
    pub pred: PathBuf,
    pub gt: PathBuf,
    /// Output directory; receives `report.json` and `report.txt`.
    pub output: PathBuf,
    pub pr_rule: PrRule,
}

#[derive(Debug, Serialize)]
pub struct EvalSummary {
    pub matched: usize,
    pub unmatched_pred: Vec<String>,
    pub unmatched_gt: Vec<String>,
    pub pred_issues: Vec<LineIssue>,
    pub gt_issues: Vec<LineIssue>,
    pub warnings: Vec<String>,
    pub report: EvalReport,
}

/// Sample key: records with expressions align per (image, expression),
/// plain per-image records align by image alone.
fn record_key(record: &ImageRecord) -> String {
    match &record.expression {
        Some(expr) => format!("{}\u{1f}{}", record.image, expr),
        None => record.image.clone(),
    }
}

fn index_records(
    records: Vec<ImageRecord>,
    warnings: &mut Vec<String>,
    side: &str,
) -> BTreeMap<String, ImageRecord> {
    let mut map = BTreeMap::new();
    for record in records {
        let key = record_key(&record);
        if let std::collections::btree_map::Entry::Vacant(slot) = map.entry(key.clone()) {
            slot.insert(record);
        } else {
            warnings.push(format!(
                "{side}: duplicate record for {key:?}, keeping the first"
            ));
        }
    }
    map
}

fn decoded_mask(record: &ImageRecord, warnings: &mut Vec<String>, key: &str) -> Option<BinaryMask> {
    match &record.mask {
        Some(rle) => match rle.decode() {
            Ok(mask) => Some(mask),
            Err(e) => {
                warnings.push(format!("{key}: undecodable mask ({e})"));
                None
            }
        },
        None => None,
    }
}

/// Evaluates predictions against ground truth and writes the report as
/// JSON plus a plain-text metric table. Unmatched records are listed and
/// excluded; the command fails when no key overlaps.
pub fn cmd_eval(job: &EvalJob) -> Result<EvalSummary, PipelineError> {
    let (pred_records, pred_issues) =
        read_jsonl::<ImageRecord>(&job.pred).map_err(|e| PipelineError::Usage(e.to_string()))?;
    let (gt_records, gt_issues) =
        read_jsonl::<ImageRecord>(&job.gt).map_err(|e| PipelineError::Usage(e.to_string()))?;

    let mut warnings = Vec::new();
    let preds = index_records(pred_records, &mut warnings, "pred");
    let gts = index_records(gt_records, &mut warnings, "gt");

    let matched: Vec<&String> = gts.keys().filter(|k| preds.contains_key(*k)).collect();
    let unmatched_pred: Vec<String> = preds
        .keys()
        .filter(|k| !gts.contains_key(*k))
        .cloned()
        .collect();
    let unmatched_gt: Vec<String> = gts
        .keys()
        .filter(|k| !preds.contains_key(*k))
        .cloned()
        .collect();
    if matched.is_empty() {
        return Err(PipelineError::Data(
            "no overlapping record keys between prediction and ground truth".to_string(),
        ));
    }

    let mut seg_pairs: Vec<(BinaryMask, BinaryMask)> = Vec::new();
    let mut grounding_pairs: Vec<(Option<BBox>, BBox)> = Vec::new();
    let mut det_preds: BTreeMap<String, Vec<Detection>> = BTreeMap::new();
    let mut det_gts: BTreeMap<String, Vec<GtBox>> = BTreeMap::new();
    let mut label_pairs: Vec<(BTreeSet<String>, BTreeSet<String>)> = Vec::new();
    let mut universe: BTreeSet<String> = BTreeSet::new();
    let mut count_pairs: Vec<(u64, u64)> = Vec::new();

    for key in &matched {
        let pred = &preds[*key];
        let gt = &gts[*key];

        // mask-bearing records: segmentation plus single-box grounding
        // derived from the mask extents
        if let Some(gt_mask) = decoded_mask(gt, &mut warnings, key) {
            if let Some(pred_mask) = decoded_mask(pred, &mut warnings, key) {
                if pred_mask.same_dims(&gt_mask) {
                    if let Some(gt_box) = mask_to_bbox(&gt_mask) {
                        grounding_pairs.push((mask_to_bbox(&pred_mask), gt_box));
                    }
                    seg_pairs.push((pred_mask, gt_mask));
                } else {
                    warnings.push(format!("{key}: mask dimensions differ, pair skipped"));
                }
            }
        }

        if let (Some(pred_boxes), Some(gt_boxes)) = (&pred.boxes, &gt.boxes) {
            det_preds.insert(
                (*key).clone(),
                pred_boxes
                    .iter()
                    .map(|b| Detection {
                        bbox: b.bbox,
                        category: b.category.clone(),
                        score: b.score.unwrap_or(1.0),
                    })
                    .collect(),
            );
            det_gts.insert(
                (*key).clone(),
                gt_boxes
                    .iter()
                    .map(|b| GtBox {
                        category: b.category.clone(),
                        bbox: b.bbox,
                    })
                    .collect(),
            );
        }

        if let (Some(pred_labels), Some(gt_labels)) = (&pred.labels, &gt.labels) {
            let p: BTreeSet<String> = pred_labels.iter().cloned().collect();
            let g: BTreeSet<String> = gt_labels.iter().cloned().collect();
            universe.extend(p.iter().cloned());
            universe.extend(g.iter().cloned());
            label_pairs.push((p, g));
        }

        if let (Some(pred_counts), Some(gt_counts)) = (&pred.counts, &gt.counts) {
            for (category, gt_count) in gt_counts {
                let pred_count = pred_counts.get(category).copied().unwrap_or(0);
                count_pairs.push((pred_count, *gt_count));
            }
        }
    }

    let seg_refs: Vec<(&BinaryMask, &BinaryMask)> = seg_pairs.iter().map(|(p, g)| (p, g)).collect();
    let report = EvalReport {
        samples: matched.len(),
        segmentation: seg_metrics(&seg_refs, job.pr_rule).ok(),
        grounding: grounding_metrics(&grounding_pairs).ok(),
        detection_ap50: detection_ap50(&det_preds, &det_gts),
        multilabel_accuracy: multilabel_accuracy(&label_pairs, &universe, MultilabelRule::PerClass),
        multilabel_exact_match: multilabel_accuracy(
            &label_pairs,
            &universe,
            MultilabelRule::ExactMatch,
        ),
        counting_accuracy: counting_accuracy(&count_pairs, CountingRule::Exact),
        counting_accuracy_tolerant: counting_accuracy(&count_pairs, CountingRule::WithinTenPercent),
    };

    let summary = EvalSummary {
        matched: matched.len(),
        unmatched_pred,
        unmatched_gt,
        pred_issues,
        gt_issues,
        warnings,
        report,
    };
    write_json(&job.output.join("report.json"), &summary)
        .map_err(|e| PipelineError::Data(e.to_string()))?;
    std::fs::create_dir_all(&job.output)
        .and_then(|()| std::fs::write(job.output.join("report.txt"), summary.report.text_table()))
        .map_err(|e| PipelineError::Data(e.to_string()))?;
    Ok(summary)
}
