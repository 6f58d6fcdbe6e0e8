//! The `curate` pipeline: ingest source annotations, generate one-to-many
//! and one-to-zero triplets, then filter pseudo-labelled candidates with
//! the configured similarity scorer.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::time::Duration;

use serde::Serialize;

use super::{worker_pool, PipelineError};
use crate::engine::{
    derive_seed, filter_pseudo_labels, ingest_one_to_one, make_one_to_many, make_one_to_zero,
    FilterConfig, HttpScorer, KeywordScorer, RawAnnotation, RejectReason, SimilarityScorer,
    Strategy, Triplet, Vocab,
};
use crate::manifest::{load_vocab, read_jsonl, write_json, write_jsonl};

/// Which similarity scorer backs the filter stage.
#[derive(Debug, Clone)]
pub enum ScorerChoice {
    /// No scorer configured; fails when filterable candidates exist.
    None,
    /// Offline keyword-matching stub.
    Stub,
    /// Remote scoring service.
    Http {
        url: String,
        timeout: Duration,
        retries: u32,
    },
}

#[derive(Debug, Clone)]
pub struct CurateJob {
    /// Source triplet manifest; records may carry explicit strategy tags.
    pub input: PathBuf,
    /// Vocabulary file, required when `one_to_zero > 0`.
    pub vocab: Option<PathBuf>,
    /// Output directory; receives `accepted.jsonl`, `rejected.jsonl` and
    /// `summary.json`.
    pub output: PathBuf,
    /// Generate per-category union triplets from single-category records.
    pub generate_one_to_many: bool,
    /// Null triplets to sample per image.
    pub one_to_zero: usize,
    pub seed: u64,
    pub scorer: ScorerChoice,
    pub filter: FilterConfig,
    pub workers: usize,
}

#[derive(Debug, Serialize)]
pub struct CurateSummary {
    pub ingested: usize,
    pub malformed_lines: usize,
    pub malformed_records: usize,
    pub generated_one_to_many: usize,
    pub generated_one_to_zero: usize,
    pub filtered_candidates: usize,
    pub filter_iterations: usize,
    pub accepted: usize,
    pub rejected: usize,
    pub accepted_per_strategy: BTreeMap<String, usize>,
}

#[derive(Serialize)]
struct RejectedRecord {
    #[serde(flatten)]
    record: RawAnnotation,
    note: String,
}

fn sort_records(records: &mut [RawAnnotation]) {
    records.sort_by(|a, b| {
        (&a.image, a.strategy, &a.expression).cmp(&(&b.image, b.strategy, &b.expression))
    });
}

/// Runs ingest, generation and filtering, and writes the accepted and
/// rejected manifests plus a per-strategy summary. Only pseudo-labelled
/// (`vlm-attribute`) candidates go through the scorer; one-to-one,
/// one-to-many and one-to-zero records are sound by construction and pass
/// straight through.
pub fn cmd_curate(job: &CurateJob) -> Result<CurateSummary, PipelineError> {
    if job.filter.max_iterations == 0 {
        return Err(PipelineError::Usage("max iterations must be >= 1".into()));
    }
    let (records, line_issues) =
        read_jsonl::<RawAnnotation>(&job.input).map_err(|e| PipelineError::Usage(e.to_string()))?;
    let vocab: Option<Vocab> = match &job.vocab {
        Some(path) => Some(load_vocab(path).map_err(|e| PipelineError::Data(e.to_string()))?),
        None => None,
    };
    if job.one_to_zero > 0 && vocab.is_none() {
        return Err(PipelineError::Usage(
            "one-to-zero generation requires a vocabulary file".into(),
        ));
    }

    let ingest = ingest_one_to_one(records);
    let mut summary = CurateSummary {
        ingested: ingest.triplets.len(),
        malformed_lines: line_issues.len(),
        malformed_records: ingest.issues.len(),
        generated_one_to_many: 0,
        generated_one_to_zero: 0,
        filtered_candidates: 0,
        filter_iterations: 0,
        accepted: 0,
        rejected: 0,
        accepted_per_strategy: BTreeMap::new(),
    };

    let mut triplets = ingest.triplets;

    // group per image for the generation stages
    let mut images: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (i, t) in triplets.iter().enumerate() {
        images.entry(t.image.clone()).or_default().push(i);
    }
    let existing_expressions: BTreeSet<(String, String)> = triplets
        .iter()
        .map(|t| (t.image.clone(), t.expression.clone()))
        .collect();

    let mut generated: Vec<Triplet> = Vec::new();
    for (image, indices) in &images {
        if job.generate_one_to_many {
            let instances: Vec<(String, crate::mask::BinaryMask)> = indices
                .iter()
                .map(|&i| &triplets[i])
                .filter(|t| t.strategy == Strategy::OneToOne && t.categories.len() == 1)
                .map(|t| {
                    (
                        t.categories.iter().next().expect("len checked").clone(),
                        t.mask.clone(),
                    )
                })
                .collect();
            if !instances.is_empty() {
                let unions = make_one_to_many(image, &instances)
                    .map_err(|e| PipelineError::Data(format!("{image}: {e}")))?;
                for union in unions {
                    if !existing_expressions.contains(&(image.clone(), union.expression.clone())) {
                        summary.generated_one_to_many += 1;
                        generated.push(union);
                    }
                }
            }
        }
        if job.one_to_zero > 0 {
            let vocab = vocab.as_ref().expect("checked above");
            let present: BTreeSet<String> = indices
                .iter()
                .flat_map(|&i| triplets[i].categories.iter().cloned())
                .collect();
            let dims = {
                let first = &triplets[indices[0]].mask;
                (first.width(), first.height())
            };
            let nulls = make_one_to_zero(
                image,
                dims.0,
                dims.1,
                &present,
                vocab,
                job.one_to_zero,
                derive_seed(job.seed, image),
            )
            .map_err(|e| PipelineError::Data(format!("{image}: {e}")))?;
            summary.generated_one_to_zero += nulls.len();
            generated.extend(nulls);
        }
    }
    triplets.extend(generated);

    // only pseudo-labelled candidates are scored
    let (filterable, pass_through): (Vec<Triplet>, Vec<Triplet>) = triplets
        .into_iter()
        .partition(|t| t.strategy == Strategy::VlmAttribute);
    summary.filtered_candidates = filterable.len();

    let mut accepted = pass_through;
    let mut rejected_records: Vec<RejectedRecord> = Vec::new();
    if !filterable.is_empty() {
        let scorer: Box<dyn SimilarityScorer> = match &job.scorer {
            ScorerChoice::None => {
                return Err(PipelineError::External(
                    "pseudo-labelled candidates present but no scorer configured \
                     (pass a scorer URL or enable the stub)"
                        .into(),
                ))
            }
            ScorerChoice::Stub => Box::new(KeywordScorer),
            ScorerChoice::Http {
                url,
                timeout,
                retries,
            } => Box::new(
                HttpScorer::new(url.clone(), *timeout, *retries)
                    .map_err(|e| PipelineError::External(e.to_string()))?,
            ),
        };
        let pool = worker_pool(job.workers)?;
        let outcome =
            pool.install(|| filter_pseudo_labels(filterable, scorer.as_ref(), &job.filter));
        summary.filter_iterations = outcome.iterations;

        // a filter run where every candidate failed at the transport level
        // means the service itself is down
        let all_failures = !outcome.rejected.is_empty()
            && outcome.accepted.is_empty()
            && outcome
                .rejected
                .iter()
                .all(|r| matches!(r.reason, RejectReason::ScorerFailure { .. }));
        if all_failures {
            return Err(PipelineError::External(format!(
                "scorer failed on every candidate: {}",
                match &outcome.rejected[0].reason {
                    RejectReason::ScorerFailure { message } => message.as_str(),
                    RejectReason::LowScore { .. } => unreachable!("all failures checked"),
                }
            )));
        }
        accepted.extend(outcome.accepted);
        for r in outcome.rejected {
            let note = match &r.reason {
                RejectReason::LowScore { score } => {
                    format!("low similarity {score:.4} (iteration {})", r.iteration)
                }
                RejectReason::ScorerFailure { message } => {
                    format!("scorer failure: {message} (iteration {})", r.iteration)
                }
            };
            rejected_records.push(RejectedRecord {
                record: RawAnnotation::from(&r.triplet),
                note,
            });
        }
    }

    let mut accepted_records: Vec<RawAnnotation> =
        accepted.iter().map(RawAnnotation::from).collect();
    sort_records(&mut accepted_records);
    rejected_records.sort_by(|a, b| {
        (&a.record.image, a.record.strategy, &a.record.expression).cmp(&(
            &b.record.image,
            b.record.strategy,
            &b.record.expression,
        ))
    });

    summary.accepted = accepted_records.len();
    summary.rejected = rejected_records.len();
    for record in &accepted_records {
        let strategy = record.strategy.unwrap_or(Strategy::OneToOne);
        *summary
            .accepted_per_strategy
            .entry(strategy.as_str().to_string())
            .or_default() += 1;
    }

    write_jsonl(&job.output.join("accepted.jsonl"), &accepted_records)
        .map_err(|e| PipelineError::Data(e.to_string()))?;
    write_jsonl(&job.output.join("rejected.jsonl"), &rejected_records)
        .map_err(|e| PipelineError::Data(e.to_string()))?;
    write_json(&job.output.join("summary.json"), &summary)
        .map_err(|e| PipelineError::Data(e.to_string()))?;
    Ok(summary)
}
