//! Batch pipelines behind the `remotesam` binary: convert probability-map
//! directories into task outputs, evaluate prediction manifests, curate
//! triplet datasets and report coverage statistics.
//!
//! Every command is deterministic given its inputs, configuration and
//! seed; per-image work runs on a bounded worker pool and results merge in
//! image order, so parallel runs produce byte-identical outputs.

mod convert_cmd;
mod curate_cmd;
mod eval_cmd;
mod stats_cmd;

pub use convert_cmd::{cmd_convert, ConvertJob, ConvertSummary};
pub use curate_cmd::{cmd_curate, CurateJob, CurateSummary, ScorerChoice};
pub use eval_cmd::{cmd_eval, EvalJob, EvalSummary};
pub use stats_cmd::{cmd_stats, StatsJob, StatsSummary};

use serde::Serialize;
use thiserror::Error;

/// Pipeline failure, mapped onto the process exit codes:
/// 1 usage/config, 2 data, 3 external service.
#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    External(String),
}

impl PipelineError {
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Usage(_) => 1,
            PipelineError::Data(_) => 2,
            PipelineError::External(_) => 3,
        }
    }
}

/// One image that could not be processed; batch runs keep going.
#[derive(Debug, Clone, Serialize)]
pub struct ImageFailure {
    pub image: String,
    pub message: String,
}

pub(crate) fn worker_pool(workers: usize) -> Result<rayon::ThreadPool, PipelineError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| PipelineError::Usage(format!("cannot build worker pool: {e}")))
}
