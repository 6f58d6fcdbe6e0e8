//! Triplet data engine: generates image-text-mask records under the
//! one-to-one / one-to-many / one-to-zero strategies, filters pseudo-labels
//! with a pluggable similarity scorer, and reports semantic-coverage
//! statistics against a hierarchical vocabulary.

mod filter;
mod scorer;

pub use filter::{filter_pseudo_labels, FilterOutcome, RejectReason, RejectedTriplet};
pub use scorer::{HttpScorer, KeywordScorer, ScoreContext, ScorerError, SimilarityScorer};

use std::collections::{BTreeMap, BTreeSet};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::convert::mask_to_bbox;
use crate::mask::{BBox, BinaryMask, MaskError, RleMask};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Mask(#[from] MaskError),
    #[error("requested {requested} absent categories but only {available} are absent")]
    InsufficientAbsentCategories { requested: usize, available: usize },
    #[error("cannot crop a region from an empty mask")]
    EmptyMask,
    #[error("invalid vocabulary: {0}")]
    Vocab(String),
}

/// How a triplet was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Existing referring annotation, one expression for one instance.
    OneToOne,
    /// Template expression for the union of a category's instances.
    OneToMany,
    /// Null mask for a category absent from the image.
    OneToZero,
    /// Pseudo-labelled record with a model-written expression; the only
    /// strategy whose masks go through similarity filtering.
    VlmAttribute,
}

impl Strategy {
    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::OneToOne => "one-to-one",
            Strategy::OneToMany => "one-to-many",
            Strategy::OneToZero => "one-to-zero",
            Strategy::VlmAttribute => "vlm-attribute",
        }
    }
}

/// One dataset record: an image reference, a referring expression and the
/// mask the expression selects (possibly all-zero).
#[derive(Debug, Clone, PartialEq)]
pub struct Triplet {
    pub image: String,
    pub expression: String,
    pub mask: BinaryMask,
    pub strategy: Strategy,
    pub categories: BTreeSet<String>,
    pub attributes: BTreeSet<String>,
}

/// The fixed expression used by one-to-many and one-to-zero records.
pub fn template_expression(category: &str) -> String {
    format!("{category} in the image.")
}

/// One line of a triplet manifest before validation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawAnnotation {
    pub image: String,
    pub expression: String,
    pub mask: RleMask,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategy: Option<Strategy>,
    #[serde(default)]
    pub categories: Vec<String>,
    #[serde(default)]
    pub attributes: Vec<String>,
}

/// A record that failed ingestion, with its position in the input.
#[derive(Debug, Clone, Serialize)]
pub struct IngestIssue {
    pub index: usize,
    pub image: String,
    pub message: String,
}

#[derive(Debug, Default)]
pub struct IngestReport {
    pub triplets: Vec<Triplet>,
    pub issues: Vec<IngestIssue>,
}

/// Normalizes existing referring annotations into triplets.
///
/// Records default to the one-to-one strategy unless they carry an explicit
/// tag; masks are decoded from RLE, which re-encodes them canonically on
/// the way out. Malformed records are reported per record and never abort
/// the run.
pub fn ingest_one_to_one(records: impl IntoIterator<Item = RawAnnotation>) -> IngestReport {
    let mut report = IngestReport::default();
    for (index, record) in records.into_iter().enumerate() {
        match record.mask.decode() {
            Ok(mask) => report.triplets.push(Triplet {
                image: record.image,
                expression: record.expression,
                mask,
                strategy: record.strategy.unwrap_or(Strategy::OneToOne),
                categories: record.categories.into_iter().collect(),
                attributes: record.attributes.into_iter().collect(),
            }),
            Err(err) => report.issues.push(IngestIssue {
                index,
                image: record.image,
                message: err.to_string(),
            }),
        }
    }
    report
}

/// Builds one triplet per category from per-instance masks: the mask is
/// the pixelwise union of that category's instances and the expression
/// follows the fixed template. Output is ordered by category.
pub fn make_one_to_many(
    image: &str,
    instance_masks: &[(String, BinaryMask)],
) -> Result<Vec<Triplet>, EngineError> {
    let mut unions: BTreeMap<&str, BinaryMask> = BTreeMap::new();
    for (category, mask) in instance_masks {
        match unions.get_mut(category.as_str()) {
            Some(union) => union.union_with(mask)?,
            None => {
                unions.insert(category, mask.clone());
            }
        }
    }
    Ok(unions
        .into_iter()
        .map(|(category, mask)| Triplet {
            image: image.to_string(),
            expression: template_expression(category),
            mask,
            strategy: Strategy::OneToMany,
            categories: BTreeSet::from([category.to_string()]),
            attributes: BTreeSet::new(),
        })
        .collect())
}

/// Samples `k` categories absent from the image and pairs each with an
/// all-zero mask of the image's size. Sampling is uniform without
/// replacement and reproducible under `seed`.
pub fn make_one_to_zero(
    image: &str,
    width: u32,
    height: u32,
    present: &BTreeSet<String>,
    vocab: &Vocab,
    k: usize,
    seed: u64,
) -> Result<Vec<Triplet>, EngineError> {
    let absent: Vec<&str> = vocab
        .leaves()
        .into_iter()
        .filter(|leaf| !present.contains(*leaf))
        .collect();
    if k > absent.len() {
        return Err(EngineError::InsufficientAbsentCategories {
            requested: k,
            available: absent.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked: Vec<&str> = rand::seq::index::sample(&mut rng, absent.len(), k)
        .into_iter()
        .map(|i| absent[i])
        .collect();
    picked.sort_unstable();
    picked
        .into_iter()
        .map(|category| {
            Ok(Triplet {
                image: image.to_string(),
                expression: template_expression(category),
                mask: BinaryMask::zeros(width, height)?,
                strategy: Strategy::OneToZero,
                categories: BTreeSet::from([category.to_string()]),
                attributes: BTreeSet::new(),
            })
        })
        .collect()
}

/// Padded, clamped bounding box around a mask's foreground: the image
/// region handed to the similarity scorer.
pub fn crop_mask_region(
    image_dims: (u32, u32),
    mask: &BinaryMask,
    padding: u32,
) -> Result<BBox, EngineError> {
    let bbox = mask_to_bbox(mask).ok_or(EngineError::EmptyMask)?;
    Ok(bbox.expand_clamped(padding, image_dims.0, image_dims.1))
}

/// Tuning for the pseudo-label filter.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FilterConfig {
    /// Candidates scoring below this are dropped.
    pub similarity_threshold: f64,
    /// Upper bound on score-and-drop rounds.
    pub max_iterations: usize,
    /// Padding around the mask extent when cropping the scored region.
    pub crop_padding: u32,
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self {
            similarity_threshold: 0.5,
            max_iterations: 3,
            crop_padding: 8,
        }
    }
}

/// A category tree with exactly three levels, plus the attribute-tag
/// taxonomy used for coverage reporting.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Vocab {
    #[serde(default = "default_attribute_tags")]
    pub attribute_tags: Vec<String>,
    pub tree: Vec<VocabNode>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VocabNode {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<VocabNode>,
}

/// The default 16-kind attribute taxonomy. The exact tag list is
/// deployment-specific; override it in the vocabulary file if needed.
pub fn default_attribute_tags() -> Vec<String> {
    [
        "color",
        "state",
        "spatial-relation",
        "size",
        "shape",
        "quantity",
        "material",
        "orientation",
        "motion",
        "texture",
        "proximity",
        "density",
        "visibility",
        "function",
        "condition",
        "context",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect()
}

impl Vocab {
    /// Checks the three-level shape: every leaf sits at depth 3 and leaf
    /// ids are unique.
    pub fn validate(&self) -> Result<(), EngineError> {
        fn walk(
            node: &VocabNode,
            depth: usize,
            leaves: &mut BTreeSet<String>,
        ) -> Result<(), EngineError> {
            if node.children.is_empty() {
                if depth != 3 {
                    return Err(EngineError::Vocab(format!(
                        "leaf {:?} at depth {depth}, expected 3",
                        node.id
                    )));
                }
                if !leaves.insert(node.id.clone()) {
                    return Err(EngineError::Vocab(format!(
                        "duplicate leaf id {:?}",
                        node.id
                    )));
                }
            } else {
                if depth >= 3 {
                    return Err(EngineError::Vocab(format!(
                        "node {:?} at depth {depth} has children below level 3",
                        node.id
                    )));
                }
                for child in &node.children {
                    walk(child, depth + 1, leaves)?;
                }
            }
            Ok(())
        }
        let mut leaves = BTreeSet::new();
        for node in &self.tree {
            walk(node, 1, &mut leaves)?;
        }
        Ok(())
    }

    /// Leaf category ids, sorted.
    pub fn leaves(&self) -> Vec<&str> {
        fn collect<'a>(node: &'a VocabNode, out: &mut Vec<&'a str>) {
            if node.children.is_empty() {
                out.push(&node.id);
            } else {
                for child in &node.children {
                    collect(child, out);
                }
            }
        }
        let mut out = Vec::new();
        for node in &self.tree {
            collect(node, &mut out);
        }
        out.sort_unstable();
        out
    }

    pub fn contains_leaf(&self, id: &str) -> bool {
        self.leaves().binary_search(&id).is_ok()
    }
}

/// Dataset coverage statistics against a vocabulary.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoverageReport {
    pub samples: usize,
    /// Distinct in-vocabulary categories.
    pub classes: usize,
    /// Distinct attribute tags observed.
    pub attributes: usize,
    /// Total attribute tags divided by sample count.
    pub attrs_per_sample: f64,
    /// Distinct categories not found among the vocabulary leaves.
    pub out_of_vocab_classes: usize,
    pub per_strategy: BTreeMap<String, usize>,
}

impl CoverageReport {
    /// Text table mirroring the usual dataset-comparison columns.
    pub fn text_table(&self) -> String {
        format!(
            "{:>10} {:>7} {:>7} {:>14} {:>13}\n{:>10} {:>7} {:>7} {:>14.2} {:>13}\n",
            "# Samples",
            "# Cls",
            "# Attr",
            "# Attr/Sample",
            "# OutOfVocab",
            self.samples,
            self.classes,
            self.attributes,
            self.attrs_per_sample,
            self.out_of_vocab_classes,
        )
    }
}

/// Counts samples, category and attribute coverage, and the mean number of
/// attribute tags per sample.
pub fn coverage_stats(triplets: &[Triplet], vocab: &Vocab) -> CoverageReport {
    let leaves: BTreeSet<&str> = vocab.leaves().into_iter().collect();
    let mut in_vocab = BTreeSet::new();
    let mut out_of_vocab = BTreeSet::new();
    let mut attrs = BTreeSet::new();
    let mut tag_total = 0usize;
    let mut per_strategy: BTreeMap<String, usize> = BTreeMap::new();
    for triplet in triplets {
        for category in &triplet.categories {
            if leaves.contains(category.as_str()) {
                in_vocab.insert(category.as_str());
            } else {
                out_of_vocab.insert(category.as_str());
            }
        }
        attrs.extend(triplet.attributes.iter().map(|a| a.as_str()));
        tag_total += triplet.attributes.len();
        *per_strategy
            .entry(triplet.strategy.as_str().to_string())
            .or_default() += 1;
    }
    CoverageReport {
        samples: triplets.len(),
        classes: in_vocab.len(),
        attributes: attrs.len(),
        attrs_per_sample: if triplets.is_empty() {
            0.0
        } else {
            tag_total as f64 / triplets.len() as f64
        },
        out_of_vocab_classes: out_of_vocab.len(),
        per_strategy,
    }
}

/// Stable per-image seed derivation (FNV-1a over the base seed and key).
pub fn derive_seed(base: u64, key: &str) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64 ^ base;
    for byte in key.as_bytes() {
        hash ^= u64::from(*byte);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mask::rle_encode;
    use rand::{Rng, SeedableRng};

    fn mask_from(bits: &[(u32, u32)], w: u32, h: u32) -> BinaryMask {
        let mut m = BinaryMask::zeros(w, h).unwrap();
        for &(x, y) in bits {
            m.set(x, y, true);
        }
        m
    }

    /// Three-level vocabulary with the given leaves under one branch.
    fn vocab_of(leaves: &[&str]) -> Vocab {
        Vocab {
            attribute_tags: default_attribute_tags(),
            tree: vec![VocabNode {
                id: "root-domain".into(),
                name: None,
                children: vec![VocabNode {
                    id: "group".into(),
                    name: None,
                    children: leaves
                        .iter()
                        .map(|l| VocabNode {
                            id: l.to_string(),
                            name: None,
                            children: vec![],
                        })
                        .collect(),
                }],
            }],
        }
    }

    #[test]
    fn one_to_many_unions_instances_of_one_category() {
        let inst = vec![
            ("car".to_string(), mask_from(&[(0, 0)], 4, 4)),
            ("car".to_string(), mask_from(&[(1, 1)], 4, 4)),
            ("car".to_string(), mask_from(&[(2, 2)], 4, 4)),
        ];
        let triplets = make_one_to_many("img.png", &inst).unwrap();
        assert_eq!(triplets.len(), 1);
        let t = &triplets[0];
        assert_eq!(t.expression, "car in the image.");
        assert_eq!(t.mask.area(), 3);
        assert_eq!(t.strategy, Strategy::OneToMany);
    }

    #[test]
    fn one_to_many_groups_by_category() {
        let inst = vec![
            ("car".to_string(), mask_from(&[(0, 0)], 4, 4)),
            ("ship".to_string(), mask_from(&[(3, 3)], 4, 4)),
            ("car".to_string(), mask_from(&[(1, 0)], 4, 4)),
        ];
        let triplets = make_one_to_many("img.png", &inst).unwrap();
        assert_eq!(triplets.len(), 2);
        assert_eq!(triplets[0].categories.iter().next().unwrap(), "car");
        assert_eq!(triplets[0].mask.area(), 2);
        assert_eq!(triplets[1].categories.iter().next().unwrap(), "ship");
    }

    #[test]
    fn one_to_many_matches_pixelwise_or_oracle() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        for _ in 0..50 {
            let n = rng.gen_range(1..6);
            let inst: Vec<(String, BinaryMask)> = (0..n)
                .map(|_| {
                    let m = BinaryMask::from_fn(8, 6, |_, _| rng.gen_bool(0.3)).unwrap();
                    ("cat".to_string(), m)
                })
                .collect();
            let triplets = make_one_to_many("i", &inst).unwrap();
            let union = &triplets[0].mask;
            for y in 0..6 {
                for x in 0..8 {
                    let or = inst.iter().any(|(_, m)| m.get(x, y));
                    assert_eq!(union.get(x, y), or);
                }
            }
        }
    }

    #[test]
    fn one_to_many_rejects_mismatched_dims() {
        let inst = vec![
            ("car".to_string(), mask_from(&[(0, 0)], 4, 4)),
            ("car".to_string(), mask_from(&[(0, 0)], 5, 4)),
        ];
        assert!(make_one_to_many("img", &inst).is_err());
    }

    #[test]
    fn one_to_zero_all_absent_and_null() {
        let vocab = vocab_of(&["a", "b", "c", "d"]);
        let present: BTreeSet<String> = ["a".to_string()].into();
        let triplets = make_one_to_zero("img", 6, 4, &present, &vocab, 2, 42).unwrap();
        assert_eq!(triplets.len(), 2);
        for t in &triplets {
            assert!(t.mask.is_empty());
            assert_eq!(t.mask.width(), 6);
            assert_eq!(t.strategy, Strategy::OneToZero);
            let cat = t.categories.iter().next().unwrap();
            assert!(!present.contains(cat));
            assert!(vocab.contains_leaf(cat));
        }
    }

    #[test]
    fn one_to_zero_forced_choice_and_zero_k() {
        let vocab = vocab_of(&["a", "b"]);
        let present: BTreeSet<String> = ["a".to_string()].into();
        let triplets = make_one_to_zero("img", 4, 4, &present, &vocab, 1, 7).unwrap();
        assert_eq!(triplets.len(), 1);
        assert!(triplets[0].categories.contains("b"));
        assert!(make_one_to_zero("img", 4, 4, &present, &vocab, 0, 7)
            .unwrap()
            .is_empty());
        assert!(matches!(
            make_one_to_zero("img", 4, 4, &present, &vocab, 2, 7),
            Err(EngineError::InsufficientAbsentCategories {
                requested: 2,
                available: 1
            })
        ));
    }

    #[test]
    fn one_to_zero_is_reproducible_under_seed() {
        let vocab = vocab_of(&["a", "b", "c", "d", "e", "f", "g", "h"]);
        let present: BTreeSet<String> = ["a".to_string(), "b".to_string()].into();
        let first = make_one_to_zero("img", 4, 4, &present, &vocab, 3, 99).unwrap();
        let second = make_one_to_zero("img", 4, 4, &present, &vocab, 3, 99).unwrap();
        assert_eq!(first, second);
        let other_seed = make_one_to_zero("img", 4, 4, &present, &vocab, 3, 100).unwrap();
        // different seeds are allowed to agree, but the categories must
        // still be valid; just check determinism of each
        assert_eq!(
            other_seed,
            make_one_to_zero("img", 4, 4, &present, &vocab, 3, 100).unwrap()
        );
    }

    #[test]
    fn ingest_tolerates_malformed_records() {
        let good = RawAnnotation {
            image: "a.png".into(),
            expression: "the car".into(),
            mask: RleMask {
                width: 2,
                height: 2,
                rle: vec![1, 3],
            },
            strategy: None,
            categories: vec!["car".into()],
            attributes: vec![],
        };
        let bad = RawAnnotation {
            image: "b.png".into(),
            expression: "the ship".into(),
            mask: RleMask {
                width: 2,
                height: 2,
                rle: vec![1, 1], // sums to 2, not 4
            },
            strategy: None,
            categories: vec![],
            attributes: vec![],
        };
        let report = ingest_one_to_one([good, bad]);
        assert_eq!(report.triplets.len(), 1);
        assert_eq!(report.issues.len(), 1);
        assert_eq!(report.issues[0].index, 1);
        assert_eq!(report.triplets[0].strategy, Strategy::OneToOne);
        assert!(ingest_one_to_one([]).triplets.is_empty());
    }

    #[test]
    fn ingest_round_trips_masks() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(32);
        let mask = BinaryMask::from_fn(9, 7, |_, _| rng.gen_bool(0.4)).unwrap();
        let record = RawAnnotation {
            image: "a.png".into(),
            expression: "x".into(),
            mask: RleMask::from(&mask),
            strategy: Some(Strategy::VlmAttribute),
            categories: vec![],
            attributes: vec![],
        };
        let report = ingest_one_to_one([record]);
        assert_eq!(report.triplets[0].mask, mask);
        assert_eq!(report.triplets[0].strategy, Strategy::VlmAttribute);
        assert_eq!(rle_encode(&report.triplets[0].mask), rle_encode(&mask));
    }

    #[test]
    fn crop_region_pads_and_clamps() {
        let m = mask_from(&[(5, 5)], 20, 20);
        assert_eq!(
            crop_mask_region((20, 20), &m, 2).unwrap(),
            BBox::new(3, 3, 7, 7)
        );
        let corner = mask_from(&[(0, 0)], 20, 20);
        assert_eq!(
            crop_mask_region((20, 20), &corner, 4).unwrap(),
            BBox::new(0, 0, 4, 4)
        );
        let empty = BinaryMask::zeros(20, 20).unwrap();
        assert!(matches!(
            crop_mask_region((20, 20), &empty, 4),
            Err(EngineError::EmptyMask)
        ));
    }

    #[test]
    fn crop_region_matches_extent_oracle() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(33);
        for _ in 0..100 {
            let mask = BinaryMask::from_fn(16, 12, |_, _| rng.gen_bool(0.1)).unwrap();
            if mask.is_empty() {
                continue;
            }
            let pad = rng.gen_range(0..6);
            let got = crop_mask_region((16, 12), &mask, pad).unwrap();
            let xs: Vec<u32> = mask.foreground().map(|(x, _)| x).collect();
            let ys: Vec<u32> = mask.foreground().map(|(_, y)| y).collect();
            let x0 = xs.iter().min().unwrap().saturating_sub(pad);
            let x1 = (xs.iter().max().unwrap() + pad).min(15);
            let y0 = ys.iter().min().unwrap().saturating_sub(pad);
            let y1 = (ys.iter().max().unwrap() + pad).min(11);
            assert_eq!(got, BBox::new(x0, y0, x1, y1));
        }
    }

    #[test]
    fn vocab_validation_enforces_three_levels() {
        let good = vocab_of(&["a", "b"]);
        assert!(good.validate().is_ok());
        let shallow = Vocab {
            attribute_tags: vec![],
            tree: vec![VocabNode {
                id: "leaf-at-top".into(),
                name: None,
                children: vec![],
            }],
        };
        assert!(shallow.validate().is_err());
        let mut dup = vocab_of(&["a", "a"]);
        assert!(dup.validate().is_err());
        dup.tree[0].children[0].children.pop();
        assert!(dup.validate().is_ok());
    }

    #[test]
    fn coverage_empty_set_is_all_zeros() {
        let report = coverage_stats(&[], &vocab_of(&["a"]));
        assert_eq!(report.samples, 0);
        assert_eq!(report.classes, 0);
        assert_eq!(report.attributes, 0);
        assert_eq!(report.attrs_per_sample, 0.0);
    }

    #[test]
    fn coverage_hand_counted_attrs_per_sample() {
        let vocab = vocab_of(&["car", "ship"]);
        let t = |cat: &str, attrs: &[&str]| Triplet {
            image: "i".into(),
            expression: template_expression(cat),
            mask: mask_from(&[(0, 0)], 2, 2),
            strategy: Strategy::OneToMany,
            categories: BTreeSet::from([cat.to_string()]),
            attributes: attrs.iter().map(|s| s.to_string()).collect(),
        };
        let triplets = vec![t("car", &["color"]), t("ship", &["color", "state"])];
        let report = coverage_stats(&triplets, &vocab);
        assert_eq!(report.samples, 2);
        assert_eq!(report.classes, 2);
        assert_eq!(report.attributes, 2);
        assert!((report.attrs_per_sample - 1.5).abs() < 1e-12);
        assert_eq!(report.out_of_vocab_classes, 0);
    }

    #[test]
    fn coverage_buckets_out_of_vocab_categories() {
        let vocab = vocab_of(&["car"]);
        let t = Triplet {
            image: "i".into(),
            expression: "x".into(),
            mask: mask_from(&[(0, 0)], 2, 2),
            strategy: Strategy::OneToOne,
            categories: BTreeSet::from(["car".to_string(), "unknown-thing".to_string()]),
            attributes: BTreeSet::new(),
        };
        let report = coverage_stats(&[t], &vocab);
        assert_eq!(report.classes, 1);
        assert_eq!(report.out_of_vocab_classes, 1);
    }

    #[test]
    fn table_has_the_expected_columns() {
        let report = coverage_stats(&[], &vocab_of(&["a"]));
        let table = report.text_table();
        for column in ["# Samples", "# Cls", "# Attr", "# Attr/Sample"] {
            assert!(table.contains(column), "missing {column}: {table}");
        }
    }

    #[test]
    fn derive_seed_is_stable_and_key_sensitive() {
        assert_eq!(derive_seed(1, "img-a"), derive_seed(1, "img-a"));
        assert_ne!(derive_seed(1, "img-a"), derive_seed(1, "img-b"));
        assert_ne!(derive_seed(1, "img-a"), derive_seed(2, "img-a"));
    }
}
