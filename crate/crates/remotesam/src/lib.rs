//! Task unification around referring-expression masks.
//!
//! The crate turns per-class probability maps emitted by any mask oracle
//! into the outputs of eight vision-centric tasks (referring and semantic
//! segmentation, grounding, detection, multi-label and scene
//! classification, counting, rule-based captioning), curates
//! image-text-mask triplet datasets, and scores predictions with the usual
//! segmentation, grounding, detection and classification metrics.
//!
//! Start with the runnable examples (`cargo run --example task_conversion`)
//! or the `pipeline` module, which backs the `remotesam` batch binary.

pub mod cli;
pub mod convert;
pub mod engine;
pub mod eval;
pub mod manifest;
pub mod mask;
pub mod pipeline;

pub use convert::{
    aggregate_confidence, count_objects, detect_objects, generate_caption, mask_to_bbox,
    multilabel_classify, scene_classify, semantic_segmentation, ClassificationStrategy,
    ConversionConfig, ConvertError, Detection, SemSegMap,
};
pub use mask::{
    binarize, connected_components, mask_iou, rle_decode, rle_encode, BBox, BinaryMask,
    Connectivity, InstanceMask, MaskError, ProbMap, RleMask,
};
