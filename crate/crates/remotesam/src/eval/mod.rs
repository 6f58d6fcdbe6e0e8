//! Metric harness: segmentation overlap metrics, grounding and detection
//! precision, and the classification/counting accuracy variants.
//!
//! Accumulation is associative and order-independent: permuting samples or
//! merging partial results never changes a metric.

mod ap;

pub use ap::{detection_ap50, GtBox};

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mask::{mask_overlap, BBox, BinaryMask, MaskError};

/// IoU thresholds reported as Pr@tau.
pub const PR_THRESHOLDS: [f64; 5] = [0.5, 0.6, 0.7, 0.8, 0.9];

#[derive(Debug, Error)]
pub enum EvalError {
    #[error(transparent)]
    Mask(#[from] MaskError),
    #[error("no samples to evaluate")]
    NoSamples,
}

/// Whether Pr@tau counts a pair with IoU exactly tau as a hit.
///
/// The conventional reading is strict (`IoU > tau`), which is the default
/// everywhere in this crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PrRule {
    #[default]
    Strict,
    Inclusive,
}

impl PrRule {
    fn hit(self, iou: f64, tau: f64) -> bool {
        match self {
            PrRule::Strict => iou > tau,
            PrRule::Inclusive => iou >= tau,
        }
    }
}

/// Mask-overlap metrics over a set of prediction/ground-truth pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SegMetrics {
    /// Dataset-level summed intersection over summed union.
    pub o_iou: f64,
    /// Mean of per-pair IoU.
    pub m_iou: f64,
    /// Fraction of pairs whose IoU beats each threshold, in
    /// `PR_THRESHOLDS` order.
    pub precision_at: Vec<f64>,
    pub samples: usize,
}

/// Computes oIoU, mIoU and Pr@tau over mask pairs.
///
/// A pair where both masks are empty counts as IoU 1.0, so correct
/// null-mask predictions score perfectly. An all-empty dataset likewise
/// reports oIoU 1.0.
pub fn seg_metrics(
    pairs: &[(&BinaryMask, &BinaryMask)],
    rule: PrRule,
) -> Result<SegMetrics, EvalError> {
    if pairs.is_empty() {
        return Err(EvalError::NoSamples);
    }
    let mut inter_sum = 0u64;
    let mut union_sum = 0u64;
    let mut iou_sum = 0.0f64;
    let mut hits = [0usize; PR_THRESHOLDS.len()];
    for (pred, gt) in pairs {
        let (inter, union) = mask_overlap(pred, gt)?;
        inter_sum += inter;
        union_sum += union;
        let iou = if union == 0 {
            1.0
        } else {
            inter as f64 / union as f64
        };
        iou_sum += iou;
        for (h, &tau) in hits.iter_mut().zip(&PR_THRESHOLDS) {
            if rule.hit(iou, tau) {
                *h += 1;
            }
        }
    }
    let n = pairs.len();
    Ok(SegMetrics {
        o_iou: if union_sum == 0 {
            1.0
        } else {
            inter_sum as f64 / union_sum as f64
        },
        m_iou: iou_sum / n as f64,
        precision_at: hits.iter().map(|&h| h as f64 / n as f64).collect(),
        samples: n,
    })
}

/// Inclusive-pixel IoU of two boxes.
pub fn bbox_iou(a: &BBox, b: &BBox) -> f64 {
    let ix0 = a.x_min.max(b.x_min);
    let ix1 = a.x_max.min(b.x_max);
    let iy0 = a.y_min.max(b.y_min);
    let iy1 = a.y_max.min(b.y_max);
    let inter = if ix0 <= ix1 && iy0 <= iy1 {
        u64::from(ix1 - ix0 + 1) * u64::from(iy1 - iy0 + 1)
    } else {
        0
    };
    let union = a.area() + b.area() - inter;
    inter as f64 / union as f64
}

/// Grounding metrics: one predicted box per expression.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroundingMetrics {
    /// Fraction of pairs with box IoU above 0.5.
    pub ap50: f64,
    /// Mean box IoU.
    pub m_iou: f64,
    pub samples: usize,
}

/// Scores one predicted box against one ground-truth box per sample.
/// A missing prediction contributes IoU 0 to both metrics.
pub fn grounding_metrics(pairs: &[(Option<BBox>, BBox)]) -> Result<GroundingMetrics, EvalError> {
    if pairs.is_empty() {
        return Err(EvalError::NoSamples);
    }
    let mut iou_sum = 0.0;
    let mut hits = 0usize;
    for (pred, gt) in pairs {
        let iou = pred.map_or(0.0, |p| bbox_iou(&p, gt));
        iou_sum += iou;
        if iou > 0.5 {
            hits += 1;
        }
    }
    Ok(GroundingMetrics {
        ap50: hits as f64 / pairs.len() as f64,
        m_iou: iou_sum / pairs.len() as f64,
        samples: pairs.len(),
    })
}

/// How a multi-label prediction is scored against the ground truth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MultilabelRule {
    /// Per-class binary agreement averaged over the category universe.
    #[default]
    PerClass,
    /// 1 when the predicted set equals the ground truth exactly, else 0.
    ExactMatch,
}

/// Mean per-sample label-set accuracy; `None` on empty input.
pub fn multilabel_accuracy(
    pairs: &[(BTreeSet<String>, BTreeSet<String>)],
    universe: &BTreeSet<String>,
    rule: MultilabelRule,
) -> Option<f64> {
    if pairs.is_empty() {
        return None;
    }
    let total: f64 = pairs
        .iter()
        .map(|(pred, gt)| match rule {
            MultilabelRule::PerClass => {
                if universe.is_empty() {
                    // vacuous agreement
                    1.0
                } else {
                    let correct = universe
                        .iter()
                        .filter(|c| pred.contains(*c) == gt.contains(*c))
                        .count();
                    correct as f64 / universe.len() as f64
                }
            }
            MultilabelRule::ExactMatch => f64::from(u8::from(pred == gt)),
        })
        .sum();
    Some(total / pairs.len() as f64)
}

/// How a predicted count is scored against the ground truth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CountingRule {
    #[default]
    Exact,
    /// Correct when `|pred - gt| <= ceil(0.1 * gt)`.
    WithinTenPercent,
}

/// Fraction of correct counts under the chosen rule; `None` on empty input.
pub fn counting_accuracy(pairs: &[(u64, u64)], rule: CountingRule) -> Option<f64> {
    if pairs.is_empty() {
        return None;
    }
    let hits = pairs
        .iter()
        .filter(|(pred, gt)| match rule {
            CountingRule::Exact => pred == gt,
            CountingRule::WithinTenPercent => pred.abs_diff(*gt) <= gt.div_ceil(10),
        })
        .count();
    Some(hits as f64 / pairs.len() as f64)
}

/// Aggregated metric values for one evaluation run. Families missing from
/// the input manifests stay `None`.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct EvalReport {
    pub samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub segmentation: Option<SegMetrics>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grounding: Option<GroundingMetrics>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detection_ap50: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub multilabel_accuracy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub multilabel_exact_match: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counting_accuracy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counting_accuracy_tolerant: Option<f64>,
}

impl EvalReport {
    /// Plain-text table with one column per metric, values in percent.
    pub fn text_table(&self) -> String {
        let mut header: Vec<String> = Vec::new();
        let mut values: Vec<String> = Vec::new();
        let mut push = |h: &str, v: f64| {
            header.push(format!("{h:>10}"));
            values.push(format!("{:>10.2}", v * 100.0));
        };
        if let Some(seg) = &self.segmentation {
            for (tau, p) in PR_THRESHOLDS.iter().zip(&seg.precision_at) {
                push(&format!("Pr@{tau}"), *p);
            }
            push("oIoU (%)", seg.o_iou);
            push("mIoU (%)", seg.m_iou);
        }
        if let Some(g) = &self.grounding {
            push("AP50 (%)", g.ap50);
            push("gIoU (%)", g.m_iou);
        }
        if let Some(ap) = self.detection_ap50 {
            push("detAP50", ap);
        }
        if let Some(acc) = self.multilabel_accuracy {
            push("mlAcc", acc);
        }
        if let Some(acc) = self.multilabel_exact_match {
            push("mlExact", acc);
        }
        if let Some(acc) = self.counting_accuracy {
            push("cntAcc", acc);
        }
        if let Some(acc) = self.counting_accuracy_tolerant {
            push("cntAcc10", acc);
        }
        format!(
            "{}\n{}\nsamples: {}\n",
            header.join(" "),
            values.join(" "),
            self.samples
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn mask_with_area(width: u32, height: u32, area: u32) -> BinaryMask {
        BinaryMask::from_fn(width, height, |x, y| y * width + x < area).unwrap()
    }

    #[test]
    fn seg_identical_pairs_score_one_everywhere() {
        let m = mask_with_area(10, 10, 37);
        let pairs = vec![(&m, &m); 8];
        let r = seg_metrics(&pairs, PrRule::Strict).unwrap();
        assert_eq!(r.o_iou, 1.0);
        assert_eq!(r.m_iou, 1.0);
        assert!(r.precision_at.iter().all(|&p| p == 1.0));
    }

    #[test]
    fn seg_two_pair_hand_computation() {
        // pair 1: IoU 11/20 = 0.55, pair 2: IoU 19/20 = 0.95
        let a_pred = mask_with_area(20, 1, 11);
        let a_gt = mask_with_area(20, 1, 20);
        let b_pred = mask_with_area(20, 1, 19);
        let b_gt = mask_with_area(20, 1, 20);
        let pairs = vec![(&a_pred, &a_gt), (&b_pred, &b_gt)];
        let r = seg_metrics(&pairs, PrRule::Strict).unwrap();
        assert!((r.m_iou - 0.75).abs() < 1e-12);
        assert_eq!(r.precision_at[0], 1.0); // Pr@0.5
        assert_eq!(r.precision_at[4], 0.5); // Pr@0.9
    }

    #[test]
    fn seg_oiou_matches_pixel_tally_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let masks: Vec<(BinaryMask, BinaryMask)> = (0..40)
            .map(|_| {
                let w = rng.gen_range(1..16);
                let h = rng.gen_range(1..16);
                let p = BinaryMask::from_fn(w, h, |_, _| rng.gen_bool(0.4)).unwrap();
                let g = BinaryMask::from_fn(w, h, |_, _| rng.gen_bool(0.4)).unwrap();
                (p, g)
            })
            .collect();
        let pairs: Vec<(&BinaryMask, &BinaryMask)> = masks.iter().map(|(p, g)| (p, g)).collect();
        let r = seg_metrics(&pairs, PrRule::Strict).unwrap();
        // single-pass scalar tally over every pixel of every pair
        let mut inter = 0u64;
        let mut union = 0u64;
        for (p, g) in &masks {
            for (a, b) in p.bits().iter().zip(g.bits()) {
                inter += u64::from(a & b);
                union += u64::from(a | b);
            }
        }
        assert!((r.o_iou - inter as f64 / union as f64).abs() < 1e-12);
    }

    #[test]
    fn seg_precision_is_monotone_in_tau() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..50 {
            let masks: Vec<(BinaryMask, BinaryMask)> = (0..10)
                .map(|_| {
                    let p = BinaryMask::from_fn(8, 8, |_, _| rng.gen_bool(0.5)).unwrap();
                    let g = BinaryMask::from_fn(8, 8, |_, _| rng.gen_bool(0.5)).unwrap();
                    (p, g)
                })
                .collect();
            let pairs: Vec<(&BinaryMask, &BinaryMask)> =
                masks.iter().map(|(p, g)| (p, g)).collect();
            for rule in [PrRule::Strict, PrRule::Inclusive] {
                let r = seg_metrics(&pairs, rule).unwrap();
                for w in r.precision_at.windows(2) {
                    assert!(w[0] >= w[1], "Pr@tau increased with tau");
                }
            }
        }
    }

    #[test]
    fn seg_pr_rule_differs_exactly_at_threshold() {
        // IoU exactly 0.5
        let pred = mask_with_area(4, 1, 2);
        let gt = mask_with_area(4, 1, 4);
        let pairs = vec![(&pred, &gt)];
        let strict = seg_metrics(&pairs, PrRule::Strict).unwrap();
        let incl = seg_metrics(&pairs, PrRule::Inclusive).unwrap();
        assert_eq!(strict.precision_at[0], 0.0);
        assert_eq!(incl.precision_at[0], 1.0);
    }

    #[test]
    fn seg_permutation_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let masks: Vec<(BinaryMask, BinaryMask)> = (0..12)
            .map(|_| {
                let p = BinaryMask::from_fn(6, 6, |_, _| rng.gen_bool(0.5)).unwrap();
                let g = BinaryMask::from_fn(6, 6, |_, _| rng.gen_bool(0.5)).unwrap();
                (p, g)
            })
            .collect();
        let fwd: Vec<(&BinaryMask, &BinaryMask)> = masks.iter().map(|(p, g)| (p, g)).collect();
        let mut rev = fwd.clone();
        rev.reverse();
        let a = seg_metrics(&fwd, PrRule::Strict).unwrap();
        let b = seg_metrics(&rev, PrRule::Strict).unwrap();
        assert_eq!(a.o_iou, b.o_iou);
        assert_eq!(a.m_iou, b.m_iou);
        assert_eq!(a.precision_at, b.precision_at);
    }

    #[test]
    fn seg_all_empty_dataset_scores_one() {
        let m = BinaryMask::zeros(5, 5).unwrap();
        let pairs = vec![(&m, &m); 3];
        let r = seg_metrics(&pairs, PrRule::Strict).unwrap();
        assert_eq!(r.o_iou, 1.0);
        assert_eq!(r.m_iou, 1.0);
    }

    #[test]
    fn seg_empty_input_errors() {
        assert!(matches!(
            seg_metrics(&[], PrRule::Strict),
            Err(EvalError::NoSamples)
        ));
    }

    #[test]
    fn bbox_iou_identical_and_disjoint() {
        let a = BBox::new(2, 3, 7, 9);
        assert_eq!(bbox_iou(&a, &a), 1.0);
        let b = BBox::new(20, 20, 25, 25);
        assert_eq!(bbox_iou(&a, &b), 0.0);
    }

    #[test]
    fn bbox_iou_inclusive_area_arithmetic() {
        // (0,0,9,9) vs (5,0,14,9): inter 5x10=50, union 100+100-50=150
        let a = BBox::new(0, 0, 9, 9);
        let b = BBox::new(5, 0, 14, 9);
        assert!((bbox_iou(&a, &b) - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn grounding_hand_computation() {
        let gt = BBox::new(0, 0, 9, 9);
        let hit = BBox::new(0, 0, 9, 5); // IoU 0.6
        let miss = BBox::new(0, 0, 9, 2); // IoU 0.3
        let pairs = vec![(Some(hit), gt), (Some(miss), gt)];
        let r = grounding_metrics(&pairs).unwrap();
        assert!((r.ap50 - 0.5).abs() < 1e-12);
        assert!((r.m_iou - 0.45).abs() < 1e-12);
    }

    #[test]
    fn grounding_missing_prediction_counts_zero() {
        let gt = BBox::new(0, 0, 9, 9);
        let r = grounding_metrics(&[(None, gt), (Some(gt), gt)]).unwrap();
        assert_eq!(r.ap50, 0.5);
        assert_eq!(r.m_iou, 0.5);
    }

    #[test]
    fn multilabel_hand_count() {
        let universe: BTreeSet<String> =
            ["a", "b", "c", "d"].iter().map(|s| s.to_string()).collect();
        let s =
            |items: &[&str]| -> BTreeSet<String> { items.iter().map(|s| s.to_string()).collect() };
        // sample 1 perfect, sample 2 has one wrong decision: (4/4 + 3/4)/2
        let pairs = vec![
            (s(&["a", "b"]), s(&["a", "b"])),
            (s(&["a", "c"]), s(&["a"])),
        ];
        let acc = multilabel_accuracy(&pairs, &universe, MultilabelRule::PerClass).unwrap();
        assert!((acc - 0.875).abs() < 1e-12);
        let exact = multilabel_accuracy(&pairs, &universe, MultilabelRule::ExactMatch).unwrap();
        assert!((exact - 0.5).abs() < 1e-12);
    }

    #[test]
    fn multilabel_empty_sets_agree() {
        let universe: BTreeSet<String> = ["a", "b"].iter().map(|s| s.to_string()).collect();
        let pairs = vec![(BTreeSet::new(), BTreeSet::new())];
        assert_eq!(
            multilabel_accuracy(&pairs, &universe, MultilabelRule::PerClass),
            Some(1.0)
        );
        assert_eq!(
            multilabel_accuracy(&[], &universe, MultilabelRule::PerClass),
            None
        );
    }

    #[test]
    fn counting_exact_and_tolerant() {
        assert_eq!(
            counting_accuracy(&[(3, 3), (5, 4)], CountingRule::Exact),
            Some(0.5)
        );
        assert_eq!(counting_accuracy(&[], CountingRule::Exact), None);
        // ceil(0.1 * 4) = 1, so 5 vs 4 passes the tolerant rule
        assert_eq!(
            counting_accuracy(&[(3, 3), (5, 4)], CountingRule::WithinTenPercent),
            Some(1.0)
        );
        // ceil(0.1 * 20) = 2: 23 vs 20 fails, 22 vs 20 passes
        assert_eq!(
            counting_accuracy(&[(23, 20), (22, 20)], CountingRule::WithinTenPercent),
            Some(0.5)
        );
    }

    #[test]
    fn oiou_equals_miou_on_equal_union_equal_iou_pairs() {
        // both pairs have union 8 and IoU 0.5
        let p1 = mask_with_area(8, 1, 4);
        let g1 = mask_with_area(8, 1, 8);
        let pairs = vec![(&p1, &g1), (&p1, &g1)];
        let r = seg_metrics(&pairs, PrRule::Strict).unwrap();
        assert!((r.o_iou - r.m_iou).abs() < 1e-12);
    }

    #[test]
    fn report_table_lists_present_families() {
        let report = EvalReport {
            samples: 3,
            segmentation: Some(SegMetrics {
                o_iou: 0.8004,
                m_iou: 0.7175,
                precision_at: vec![0.8446, 0.7845, 0.6625, 0.4932, 0.2962],
                samples: 3,
            }),
            ..EvalReport::default()
        };
        let table = report.text_table();
        assert!(table.contains("Pr@0.5"));
        assert!(table.contains("oIoU"));
        assert!(table.contains("80.04"));
        assert!(table.contains("71.75"));
        assert!(!table.contains("cntAcc"));
    }
}
