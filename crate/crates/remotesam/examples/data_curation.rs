//! Builds a small triplet dataset in memory: ingests instance
//! annotations, derives one-to-many unions and one-to-zero nulls, filters
//! pseudo-labelled candidates with the offline keyword scorer, and prints
//! coverage statistics.
//!
//! ```bash
//! cargo run -p remotesam --example data_curation
//! ```

use std::collections::BTreeSet;

use remotesam::engine::{
    coverage_stats, default_attribute_tags, filter_pseudo_labels, make_one_to_many,
    make_one_to_zero, FilterConfig, KeywordScorer, Strategy, Triplet, Vocab, VocabNode,
};
use remotesam::mask::BinaryMask;

fn instance(x: u32, y: u32) -> BinaryMask {
    BinaryMask::from_fn(32, 32, |px, py| {
        px >= x && px < x + 4 && py >= y && py < y + 3
    })
    .unwrap()
}

fn main() -> anyhow::Result<()> {
    // one-to-many: unions of per-category instances
    let instances = vec![
        ("airplane".to_string(), instance(2, 2)),
        ("airplane".to_string(), instance(20, 4)),
        ("storage tank".to_string(), instance(10, 20)),
    ];
    let mut triplets = make_one_to_many("strip-042.png", &instances)?;
    for t in &triplets {
        println!(
            "one-to-many   {:?} mask {} px: {:?}",
            t.expression,
            t.mask.area(),
            t.categories
        );
    }

    // one-to-zero: null masks for absent categories, seeded sampling
    let vocab = Vocab {
        attribute_tags: default_attribute_tags(),
        tree: vec![VocabNode {
            id: "objects".into(),
            name: Some("Objects".into()),
            children: vec![VocabNode {
                id: "common".into(),
                name: None,
                children: ["airplane", "ship", "storage tank", "bridge", "harbor"]
                    .iter()
                    .map(|id| VocabNode {
                        id: id.to_string(),
                        name: None,
                        children: vec![],
                    })
                    .collect(),
            }],
        }],
    };
    let present: BTreeSet<String> = ["airplane".to_string(), "storage tank".to_string()].into();
    let nulls = make_one_to_zero("strip-042.png", 32, 32, &present, &vocab, 2, 7)?;
    for t in &nulls {
        println!("one-to-zero   {:?} (all-zero mask)", t.expression);
    }
    triplets.extend(nulls);

    // pseudo-labelled candidates: one clean, one with a planted mismatch
    let candidates = vec![
        Triplet {
            image: "strip-042.png".into(),
            expression: "a white airplane parked on the apron".into(),
            mask: instance(2, 2),
            strategy: Strategy::VlmAttribute,
            categories: BTreeSet::from(["airplane".to_string()]),
            attributes: BTreeSet::from(["color".to_string()]),
        },
        Triplet {
            image: "strip-042.png".into(),
            expression: "a long bridge crossing the river".into(), // wrong!
            mask: instance(10, 20),
            strategy: Strategy::VlmAttribute,
            categories: BTreeSet::from(["storage tank".to_string()]),
            attributes: BTreeSet::from(["spatial-relation".to_string()]),
        },
    ];
    let outcome = filter_pseudo_labels(candidates, &KeywordScorer, &FilterConfig::default());
    println!(
        "filter        accepted {} / rejected {} in {} iteration(s)",
        outcome.accepted.len(),
        outcome.rejected.len(),
        outcome.iterations
    );
    triplets.extend(outcome.accepted);

    let report = coverage_stats(&triplets, &vocab);
    println!("\n{}", report.text_table());
    Ok(())
}
