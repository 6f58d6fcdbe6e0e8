//! Average precision at IoU 0.5 for box detections.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::bbox_iou;
use crate::convert::Detection;
use crate::mask::BBox;

/// One ground-truth box with its category.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GtBox {
    pub category: String,
    pub bbox: BBox,
}

/// AP50 over per-image detections, averaged across the categories present
/// in the ground truth; `None` when the ground truth holds no boxes.
///
/// Per category, predictions are ranked by descending score (image id and
/// rank break exact ties, so the result is deterministic) and greedily
/// matched to the not-yet-matched same-image ground-truth box of highest
/// IoU above 0.5. The precision/recall curve is integrated with all-point
/// interpolation. Only the score ordering matters: rescaling all scores
/// with any strictly increasing map leaves the result unchanged.
pub fn detection_ap50(
    preds: &BTreeMap<String, Vec<Detection>>,
    gts: &BTreeMap<String, Vec<GtBox>>,
) -> Option<f64> {
    let categories: BTreeSet<&str> = gts
        .values()
        .flatten()
        .map(|g| g.category.as_str())
        .collect();
    if categories.is_empty() {
        return None;
    }
    let mut ap_sum = 0.0;
    for category in &categories {
        ap_sum += category_ap50(preds, gts, category);
    }
    Some(ap_sum / categories.len() as f64)
}

fn category_ap50(
    preds: &BTreeMap<String, Vec<Detection>>,
    gts: &BTreeMap<String, Vec<GtBox>>,
    category: &str,
) -> f64 {
    let mut gt_count = 0usize;
    let mut gt_boxes: BTreeMap<&str, Vec<&BBox>> = BTreeMap::new();
    for (image, boxes) in gts {
        let picked: Vec<&BBox> = boxes
            .iter()
            .filter(|g| g.category == category)
            .map(|g| &g.bbox)
            .collect();
        gt_count += picked.len();
        if !picked.is_empty() {
            gt_boxes.insert(image, picked);
        }
    }
    if gt_count == 0 {
        return 0.0;
    }

    // (score, image, rank within image) for a deterministic total order
    let mut ranked: Vec<(f64, &str, usize)> = Vec::new();
    for (image, dets) in preds {
        for (rank, det) in dets.iter().enumerate() {
            if det.category == category {
                ranked.push((det.score, image, rank));
            }
        }
    }
    ranked.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(b.1)).then(a.2.cmp(&b.2)));

    let mut matched: BTreeMap<&str, Vec<bool>> = gt_boxes
        .iter()
        .map(|(image, boxes)| (*image, vec![false; boxes.len()]))
        .collect();
    let mut tp_flags = Vec::with_capacity(ranked.len());
    for (_, image, rank) in &ranked {
        let det = &preds[*image][*rank];
        let mut best: Option<(usize, f64)> = None;
        if let Some(boxes) = gt_boxes.get(image) {
            let taken = &matched[image];
            for (i, gt) in boxes.iter().enumerate() {
                if taken[i] {
                    continue;
                }
                let iou = bbox_iou(&det.bbox, gt);
                if iou > 0.5 && best.is_none_or(|(_, b)| iou > b) {
                    best = Some((i, iou));
                }
            }
        }
        match best {
            Some((i, _)) => {
                matched.get_mut(image).expect("image has gt boxes")[i] = true;
                tp_flags.push(true);
            }
            None => tp_flags.push(false),
        }
    }

    average_precision(&tp_flags, gt_count)
}

/// Area under the precision envelope for a ranked TP/FP sequence.
fn average_precision(tp_flags: &[bool], gt_count: usize) -> f64 {
    let n = tp_flags.len();
    if n == 0 {
        return 0.0;
    }
    let mut precision = Vec::with_capacity(n);
    let mut recall = Vec::with_capacity(n);
    let mut tp = 0usize;
    for (i, &is_tp) in tp_flags.iter().enumerate() {
        if is_tp {
            tp += 1;
        }
        precision.push(tp as f64 / (i + 1) as f64);
        recall.push(tp as f64 / gt_count as f64);
    }
    // precision envelope: max precision at any recall >= r
    for i in (0..n - 1).rev() {
        if precision[i + 1] > precision[i] {
            precision[i] = precision[i + 1];
        }
    }
    let mut ap = 0.0;
    let mut prev_recall = 0.0;
    for i in 0..n {
        ap += (recall[i] - prev_recall) * precision[i];
        prev_recall = recall[i];
    }
    ap
}
