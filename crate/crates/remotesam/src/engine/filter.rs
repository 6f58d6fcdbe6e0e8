//! Iterative pseudo-label filtering against a similarity scorer.

use rayon::prelude::*;
use serde::Serialize;

use super::scorer::{ScoreContext, SimilarityScorer};
use super::{crop_mask_region, FilterConfig, Triplet};

/// Why a candidate was dropped.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RejectReason {
    /// Scored below the similarity threshold.
    LowScore { score: f64 },
    /// The scorer failed on this candidate; the run continues.
    ScorerFailure { message: String },
}

#[derive(Debug, Clone)]
pub struct RejectedTriplet {
    pub triplet: Triplet,
    pub reason: RejectReason,
    /// Iteration (1-based) in which the candidate was dropped.
    pub iteration: usize,
}

#[derive(Debug)]
pub struct FilterOutcome {
    pub accepted: Vec<Triplet>,
    pub rejected: Vec<RejectedTriplet>,
    /// Rounds actually run, including the final round that dropped nothing.
    pub iterations: usize,
}

/// Repeatedly scores the remaining candidates and drops those below the
/// threshold, stopping early once a round drops nothing.
///
/// Accepted and rejected partition the input; a scorer failure routes the
/// candidate to the rejected side with the error message instead of
/// aborting the batch. Scoring runs in parallel but decisions are taken at
/// a deterministic barrier per round, so the outcome does not depend on
/// scheduling.
pub fn filter_pseudo_labels(
    candidates: Vec<Triplet>,
    scorer: &dyn SimilarityScorer,
    config: &FilterConfig,
) -> FilterOutcome {
    let mut remaining = candidates;
    let mut rejected = Vec::new();
    let mut iterations = 0;
    for round in 1..=config.max_iterations.max(1) {
        iterations = round;
        let scores: Vec<Result<f64, String>> = remaining
            .par_iter()
            .map(|triplet| {
                let region = crop_mask_region(
                    (triplet.mask.width(), triplet.mask.height()),
                    &triplet.mask,
                    config.crop_padding,
                )
                .ok();
                scorer
                    .score(&ScoreContext { triplet, region })
                    .map_err(|e| e.to_string())
            })
            .collect();
        let mut kept = Vec::with_capacity(remaining.len());
        let mut dropped = 0usize;
        for (triplet, score) in remaining.into_iter().zip(scores) {
            match score {
                Ok(s) if s >= config.similarity_threshold => kept.push(triplet),
                Ok(s) => {
                    dropped += 1;
                    rejected.push(RejectedTriplet {
                        triplet,
                        reason: RejectReason::LowScore { score: s },
                        iteration: round,
                    });
                }
                Err(message) => {
                    dropped += 1;
                    rejected.push(RejectedTriplet {
                        triplet,
                        reason: RejectReason::ScorerFailure { message },
                        iteration: round,
                    });
                }
            }
        }
        remaining = kept;
        if dropped == 0 {
            break;
        }
    }
    FilterOutcome {
        accepted: remaining,
        rejected,
        iterations,
    }
}
