//! Command-line surface over the batch pipelines.
//!
//! Configuration precedence: explicit flags beat the optional JSON config
//! file, which beats the built-in defaults. The scorer endpoint falls back
//! to the `REMOTE_SAM_SCORER_URL` environment variable when no flag names
//! one.

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Duration;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use crate::convert::{ClassificationStrategy, ConversionConfig};
use crate::engine::FilterConfig;
use crate::eval::PrRule;
use crate::pipeline::{
    cmd_convert, cmd_curate, cmd_eval, cmd_stats, ConvertJob, CurateJob, EvalJob, PipelineError,
    ScorerChoice, StatsJob,
};

pub const SCORER_URL_ENV: &str = "REMOTE_SAM_SCORER_URL";

#[derive(Parser, Debug)]
#[command(
    name = "remotesam",
    version,
    about = "Mask-centric task conversion, dataset curation and evaluation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Convert per-class probability maps into task outputs
    Convert(ConvertArgs),
    /// Score a prediction manifest against a ground-truth manifest
    Eval(EvalArgs),
    /// Ingest, generate and filter a triplet dataset
    Curate(CurateArgs),
    /// Report coverage statistics for a triplet manifest
    Stats(StatsArgs),
}

fn parse_strategy(s: &str) -> Result<ClassificationStrategy, String> {
    match s {
        "prob-level" => Ok(ClassificationStrategy::ProbLevel),
        "mask-level" => Ok(ClassificationStrategy::MaskLevel),
        other => Err(format!(
            "unknown strategy {other:?}, expected prob-level or mask-level"
        )),
    }
}

fn parse_pr_rule(s: &str) -> Result<PrRule, String> {
    match s {
        "strict" => Ok(PrRule::Strict),
        "inclusive" => Ok(PrRule::Inclusive),
        other => Err(format!(
            "unknown Pr@tau rule {other:?}, expected strict or inclusive"
        )),
    }
}

#[derive(Args, Debug)]
pub struct ConvertArgs {
    /// Directory of `<image_id>/<category>.{pgm,png,json}` probability maps
    #[arg(long)]
    pub input: PathBuf,
    /// Output directory for predictions.jsonl and summary.json
    #[arg(long)]
    pub output: PathBuf,
    /// JSON config file; explicit flags override it
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Class gate and binarization threshold
    #[arg(long)]
    pub tau_seg: Option<f32>,
    /// Multi-label confidence threshold
    #[arg(long)]
    pub tau_cls: Option<f64>,
    /// Mean/max pooling balance for multi-label confidence
    #[arg(long = "lambda")]
    pub lambda_multilabel: Option<f64>,
    /// Mean/max pooling balance for scene classification
    #[arg(long)]
    pub lambda_scene: Option<f64>,
    /// Multi-label strategy: prob-level or mask-level
    #[arg(long, value_parser = parse_strategy)]
    pub strategy: Option<ClassificationStrategy>,
    /// Area threshold for the mask-level strategy
    #[arg(long)]
    pub area_threshold: Option<u64>,
    /// Split touching objects at probability peaks
    #[arg(long, overrides_with = "no_refine")]
    pub refine: bool,
    /// Disable the marker-based split
    #[arg(long)]
    pub no_refine: bool,
    /// Suppression radius between refinement markers (pixels)
    #[arg(long)]
    pub marker_radius: Option<u32>,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    /// Prediction manifest (JSON lines)
    #[arg(long)]
    pub pred: PathBuf,
    /// Ground-truth manifest (JSON lines)
    #[arg(long)]
    pub gt: PathBuf,
    /// Output directory for report.json and report.txt
    #[arg(long)]
    pub output: PathBuf,
    /// Pr@tau comparison: strict (IoU > tau) or inclusive (IoU >= tau)
    #[arg(long, value_parser = parse_pr_rule, default_value = "strict")]
    pub pr_rule: PrRule,
}

#[derive(Args, Debug)]
pub struct CurateArgs {
    /// Source triplet manifest (JSON lines)
    #[arg(long)]
    pub input: PathBuf,
    /// Output directory for accepted.jsonl, rejected.jsonl, summary.json
    #[arg(long)]
    pub output: PathBuf,
    /// Vocabulary file (required for one-to-zero generation)
    #[arg(long)]
    pub vocab: Option<PathBuf>,
    /// JSON config file; explicit flags override it
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Skip generating per-category union triplets
    #[arg(long)]
    pub no_one_to_many: bool,
    /// Null triplets to sample per image
    #[arg(long, default_value_t = 0)]
    pub one_to_zero: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Remote scorer endpoint (falls back to REMOTE_SAM_SCORER_URL)
    #[arg(long, conflicts_with = "scorer_stub")]
    pub scorer_url: Option<String>,
    /// Use the offline keyword-matching scorer
    #[arg(long)]
    pub scorer_stub: bool,
    /// Per-request scorer timeout in seconds
    #[arg(long, default_value_t = 10)]
    pub scorer_timeout: u64,
    /// Retries per scoring request
    #[arg(long, default_value_t = 2)]
    pub scorer_retries: u32,
    /// Similarity threshold below which candidates are dropped
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Upper bound on filter rounds
    #[arg(long)]
    pub max_iterations: Option<usize>,
    /// Padding around the mask extent for the scored crop
    #[arg(long)]
    pub crop_padding: Option<u32>,
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Args, Debug)]
pub struct StatsArgs {
    /// Triplet manifest (JSON lines)
    #[arg(long)]
    pub input: PathBuf,
    /// Vocabulary file
    #[arg(long)]
    pub vocab: PathBuf,
    /// Output directory for coverage.json and coverage.txt
    #[arg(long)]
    pub output: PathBuf,
}

/// Optional JSON config file; any field may be omitted.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub tau_seg: Option<f32>,
    pub tau_cls: Option<f64>,
    pub lambda_multilabel: Option<f64>,
    pub lambda_scene: Option<f64>,
    pub classification_strategy: Option<ClassificationStrategy>,
    pub area_threshold_masklevel: Option<u64>,
    pub refine: Option<bool>,
    pub marker_radius: Option<u32>,
    pub similarity_threshold: Option<f64>,
    pub max_iterations: Option<usize>,
    pub crop_padding: Option<u32>,
    pub workers: Option<usize>,
    pub seed: Option<u64>,
    pub scorer_url: Option<String>,
}

fn load_file_config(path: Option<&PathBuf>) -> Result<FileConfig, PipelineError> {
    match path {
        None => Ok(FileConfig::default()),
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                PipelineError::Usage(format!("cannot read config {}: {e}", path.display()))
            })?;
            serde_json::from_str(&text).map_err(|e| {
                PipelineError::Usage(format!("invalid config {}: {e}", path.display()))
            })
        }
    }
}

fn resolve_conversion(args: &ConvertArgs, file: &FileConfig) -> ConversionConfig {
    let mut cfg = ConversionConfig::default();
    macro_rules! fill {
        ($field:ident, $file:expr, $flag:expr) => {
            if let Some(v) = $file {
                cfg.$field = v;
            }
            if let Some(v) = $flag {
                cfg.$field = v;
            }
        };
    }
    fill!(tau_seg, file.tau_seg, args.tau_seg);
    fill!(tau_cls, file.tau_cls, args.tau_cls);
    fill!(
        lambda_multilabel,
        file.lambda_multilabel,
        args.lambda_multilabel
    );
    fill!(lambda_scene, file.lambda_scene, args.lambda_scene);
    fill!(
        classification_strategy,
        file.classification_strategy,
        args.strategy
    );
    fill!(
        area_threshold_masklevel,
        file.area_threshold_masklevel,
        args.area_threshold
    );
    fill!(marker_radius, file.marker_radius, args.marker_radius);
    if let Some(v) = file.refine {
        cfg.refine = v;
    }
    if args.no_refine {
        cfg.refine = false;
    } else if args.refine {
        cfg.refine = true;
    }
    cfg
}

fn resolve_filter(args: &CurateArgs, file: &FileConfig) -> FilterConfig {
    let mut cfg = FilterConfig::default();
    if let Some(v) = file.similarity_threshold {
        cfg.similarity_threshold = v;
    }
    if let Some(v) = file.max_iterations {
        cfg.max_iterations = v;
    }
    if let Some(v) = file.crop_padding {
        cfg.crop_padding = v;
    }
    if let Some(v) = args.threshold {
        cfg.similarity_threshold = v;
    }
    if let Some(v) = args.max_iterations {
        cfg.max_iterations = v;
    }
    if let Some(v) = args.crop_padding {
        cfg.crop_padding = v;
    }
    cfg
}

fn resolve_scorer(args: &CurateArgs, file: &FileConfig) -> ScorerChoice {
    if args.scorer_stub {
        return ScorerChoice::Stub;
    }
    let url = args
        .scorer_url
        .clone()
        .or_else(|| file.scorer_url.clone())
        .or_else(|| std::env::var(SCORER_URL_ENV).ok());
    match url {
        Some(url) => ScorerChoice::Http {
            url,
            timeout: Duration::from_secs(args.scorer_timeout),
            retries: args.scorer_retries,
        },
        None => ScorerChoice::None,
    }
}

fn dispatch(cli: Cli) -> Result<String, PipelineError> {
    match cli.command {
        Command::Convert(args) => {
            let file = load_file_config(args.config.as_ref())?;
            let job = ConvertJob {
                input: args.input.clone(),
                output: args.output.clone(),
                conversion: resolve_conversion(&args, &file),
                workers: args.workers.or(file.workers).unwrap_or(1),
            };
            let summary = cmd_convert(&job)?;
            let mut line = format!(
                "converted {}/{} image(s) -> {}",
                summary.succeeded,
                summary.images,
                job.output.join("predictions.jsonl").display()
            );
            for warning in &summary.warnings {
                line.push_str(&format!("\nwarning: {warning}"));
            }
            if !summary.failures.is_empty() {
                line.push_str(&format!(
                    "\n{} image(s) failed; see summary.json",
                    summary.failures.len()
                ));
            }
            Ok(line)
        }
        Command::Eval(args) => {
            let job = EvalJob {
                pred: args.pred,
                gt: args.gt,
                output: args.output,
                pr_rule: args.pr_rule,
            };
            let summary = cmd_eval(&job)?;
            let unmatched = summary.unmatched_pred.len() + summary.unmatched_gt.len();
            let mut line = format!(
                "evaluated {} matched sample(s) ({} unmatched) -> {}",
                summary.matched,
                unmatched,
                job.output.join("report.json").display()
            );
            line.push('\n');
            line.push_str(&summary.report.text_table());
            Ok(line)
        }
        Command::Curate(args) => {
            let file = load_file_config(args.config.as_ref())?;
            let job = CurateJob {
                input: args.input.clone(),
                vocab: args.vocab.clone(),
                output: args.output.clone(),
                generate_one_to_many: !args.no_one_to_many,
                one_to_zero: args.one_to_zero,
                seed: args.seed.or(file.seed).unwrap_or(0),
                scorer: resolve_scorer(&args, &file),
                filter: resolve_filter(&args, &file),
                workers: args.workers.or(file.workers).unwrap_or(1),
            };
            let summary = cmd_curate(&job)?;
            Ok(format!(
                "curated {} accepted / {} rejected triplet(s) -> {}",
                summary.accepted,
                summary.rejected,
                job.output.display()
            ))
        }
        Command::Stats(args) => {
            let job = StatsJob {
                input: args.input,
                vocab: args.vocab,
                output: args.output,
            };
            let summary = cmd_stats(&job)?;
            Ok(format!(
                "coverage over {} sample(s) -> {}\n{}",
                summary.report.samples,
                job.output.join("coverage.json").display(),
                summary.report.text_table()
            ))
        }
    }
}

/// Parses arguments, runs the selected pipeline and returns the process
/// exit code (0 success, 1 usage/config, 2 data, 3 external service).
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(message) => {
            println!("{message}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn convert_args(extra: &[&str]) -> ConvertArgs {
        let mut argv = vec!["remotesam", "convert", "--input", "in", "--output", "out"];
        argv.extend_from_slice(extra);
        match Cli::try_parse_from(argv).unwrap().command {
            Command::Convert(args) => args,
            _ => unreachable!(),
        }
    }

    #[test]
    fn defaults_survive_when_nothing_is_set() {
        let cfg = resolve_conversion(&convert_args(&[]), &FileConfig::default());
        assert_eq!(cfg.tau_cls, 0.5);
        assert_eq!(cfg.lambda_multilabel, 0.5);
        assert_eq!(cfg.lambda_scene, 1.0);
        assert!(cfg.refine);
    }

    #[test]
    fn flags_override_config_file() {
        let file: FileConfig =
            serde_json::from_str(r#"{"tau_cls": 0.9, "lambda_multilabel": 0.25, "refine": false}"#)
                .unwrap();
        let args = convert_args(&["--tau-cls", "0.7", "--refine"]);
        let cfg = resolve_conversion(&args, &file);
        assert_eq!(cfg.tau_cls, 0.7); // flag wins
        assert_eq!(cfg.lambda_multilabel, 0.25); // file wins over default
        assert!(cfg.refine); // flag wins over file
    }

    #[test]
    fn no_refine_flag_disables_refinement() {
        let cfg = resolve_conversion(&convert_args(&["--no-refine"]), &FileConfig::default());
        assert!(!cfg.refine);
    }

    #[test]
    fn config_file_rejects_unknown_fields() {
        let err = serde_json::from_str::<FileConfig>(r#"{"tau_clss": 0.9}"#);
        assert!(err.is_err());
    }

    #[test]
    fn stub_flag_beats_url() {
        let argv = vec![
            "remotesam",
            "curate",
            "--input",
            "a",
            "--output",
            "b",
            "--scorer-stub",
        ];
        let args = match Cli::try_parse_from(argv).unwrap().command {
            Command::Curate(args) => args,
            _ => unreachable!(),
        };
        let file: FileConfig =
            serde_json::from_str(r#"{"scorer_url": "http://example/score"}"#).unwrap();
        assert!(matches!(resolve_scorer(&args, &file), ScorerChoice::Stub));
    }

    #[test]
    fn url_and_stub_flags_conflict() {
        let argv = vec![
            "remotesam",
            "curate",
            "--input",
            "a",
            "--output",
            "b",
            "--scorer-stub",
            "--scorer-url",
            "http://x/score",
        ];
        assert!(Cli::try_parse_from(argv).is_err());
    }
}
