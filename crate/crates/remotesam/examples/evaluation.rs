//! Runs the metric harness on synthetic predictions: segmentation overlap
//! metrics, grounding, detection AP50 and the accuracy variants.
//!
//! ```bash
//! cargo run -p remotesam --example evaluation
//! ```

use std::collections::{BTreeMap, BTreeSet};

use remotesam::convert::Detection;
use remotesam::eval::{
    bbox_iou, counting_accuracy, detection_ap50, grounding_metrics, multilabel_accuracy,
    seg_metrics, CountingRule, EvalReport, GtBox, MultilabelRule, PrRule,
};
use remotesam::mask::{BBox, BinaryMask};

fn main() -> anyhow::Result<()> {
    // segmentation: predictions drift a little more for each sample
    let mut pairs = Vec::new();
    for i in 0..6u32 {
        let gt = BinaryMask::from_fn(40, 40, |x, y| (8..28).contains(&x) && (8..28).contains(&y))?;
        let pred = BinaryMask::from_fn(40, 40, |x, y| {
            x >= 8 + i && x < 28 + i && (8..28).contains(&y)
        })?;
        pairs.push((pred, gt));
    }
    let refs: Vec<(&BinaryMask, &BinaryMask)> = pairs.iter().map(|(p, g)| (p, g)).collect();
    let seg = seg_metrics(&refs, PrRule::Strict)?;

    // grounding: one box per expression
    let grounding = grounding_metrics(&[
        (Some(BBox::new(10, 10, 30, 30)), BBox::new(10, 10, 30, 30)),
        (Some(BBox::new(12, 10, 32, 30)), BBox::new(10, 10, 30, 30)),
        (None, BBox::new(50, 50, 60, 60)),
    ])?;
    println!(
        "bbox IoU of the shifted pair: {:.4}",
        bbox_iou(&BBox::new(12, 10, 32, 30), &BBox::new(10, 10, 30, 30))
    );

    // detection: one duplicate and one miss
    let gt_box = |x: u32| BBox::new(x, 0, x + 9, 9);
    let preds = BTreeMap::from([(
        "img".to_string(),
        vec![
            Detection {
                bbox: gt_box(0),
                category: "ship".into(),
                score: 0.95,
            },
            Detection {
                bbox: gt_box(0),
                category: "ship".into(),
                score: 0.90,
            },
            Detection {
                bbox: gt_box(30),
                category: "ship".into(),
                score: 0.85,
            },
        ],
    )]);
    let gts = BTreeMap::from([(
        "img".to_string(),
        vec![
            GtBox {
                category: "ship".into(),
                bbox: gt_box(0),
            },
            GtBox {
                category: "ship".into(),
                bbox: gt_box(30),
            },
            GtBox {
                category: "ship".into(),
                bbox: gt_box(60),
            },
        ],
    )]);

    // classification and counting
    let set =
        |items: &[&str]| -> BTreeSet<String> { items.iter().map(|s| s.to_string()).collect() };
    let universe = set(&["airplane", "ship", "vehicle", "harbor"]);
    let label_pairs = vec![
        (set(&["airplane", "ship"]), set(&["airplane", "ship"])),
        (set(&["airplane", "harbor"]), set(&["airplane"])),
    ];
    let count_pairs = vec![(3, 3), (5, 4), (12, 12)];

    let report = EvalReport {
        samples: 6,
        segmentation: Some(seg),
        grounding: Some(grounding),
        detection_ap50: detection_ap50(&preds, &gts),
        multilabel_accuracy: multilabel_accuracy(&label_pairs, &universe, MultilabelRule::PerClass),
        multilabel_exact_match: multilabel_accuracy(
            &label_pairs,
            &universe,
            MultilabelRule::ExactMatch,
        ),
        counting_accuracy: counting_accuracy(&count_pairs, CountingRule::Exact),
        counting_accuracy_tolerant: counting_accuracy(&count_pairs, CountingRule::WithinTenPercent),
    };
    println!("\n{}", report.text_table());
    println!("as JSON:\n{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}
