//! The `stats` pipeline: coverage statistics for a triplet manifest
//! against a vocabulary.

use std::path::PathBuf;

use serde::Serialize;

use super::PipelineError;
use crate::engine::{coverage_stats, ingest_one_to_one, CoverageReport, RawAnnotation};
use crate::manifest::{load_vocab, read_jsonl, write_json};

#[derive(Debug, Clone)]
pub struct StatsJob {
    pub input: PathBuf,
    pub vocab: PathBuf,
    /// Output directory; receives `coverage.json` and `coverage.txt`.
    pub output: PathBuf,
}

#[derive(Debug, Serialize)]
pub struct StatsSummary {
    pub malformed_lines: usize,
    pub malformed_records: usize,
    pub report: CoverageReport,
}

/// Reads the manifest (malformed lines reported, run continues) and writes
/// the coverage report as JSON plus a text table.
pub fn cmd_stats(job: &StatsJob) -> Result<StatsSummary, PipelineError> {
    let (records, line_issues) =
        read_jsonl::<RawAnnotation>(&job.input).map_err(|e| PipelineError::Usage(e.to_string()))?;
    let vocab = load_vocab(&job.vocab).map_err(|e| PipelineError::Data(e.to_string()))?;
    let ingest = ingest_one_to_one(records);
    let report = coverage_stats(&ingest.triplets, &vocab);
    let summary = StatsSummary {
        malformed_lines: line_issues.len(),
        malformed_records: ingest.issues.len(),
        report,
    };
    write_json(&job.output.join("coverage.json"), &summary)
        .map_err(|e| PipelineError::Data(e.to_string()))?;
    std::fs::create_dir_all(&job.output)
        .and_then(|()| std::fs::write(job.output.join("coverage.txt"), summary.report.text_table()))
        .map_err(|e| PipelineError::Data(e.to_string()))?;
    Ok(summary)
}
