//! The full batch flow in a temporary directory: write per-class
//! probability maps to disk, convert them into a prediction manifest, and
//! score that manifest against itself with the eval pipeline. The same
//! flow is available from the shell via the `remotesam` binary.
//!
//! ```bash
//! cargo run -p remotesam --example batch_pipeline
//! ```

use remotesam::convert::ConversionConfig;
use remotesam::manifest::write_prob_map;
use remotesam::mask::ProbMap;
use remotesam::pipeline::{cmd_convert, cmd_eval, ConvertJob, EvalJob};

fn main() -> anyhow::Result<()> {
    let root = tempfile::TempDir::new()?;
    let maps_dir = root.path().join("maps");

    // three images, two classes, disk-shaped probability peaks
    for (image, layout) in [
        (
            "patch-000",
            vec![("airplane", (22u32, 22u32)), ("ship", (60, 58))],
        ),
        ("patch-001", vec![("airplane", (40, 48))]),
        (
            "patch-002",
            vec![("ship", (30, 30)), ("airplane", (64, 20))],
        ),
    ] {
        for (category, (cx, cy)) in layout {
            let map = ProbMap::from_fn(88, 88, category, |x, y| {
                let d2 =
                    (f64::from(x) - f64::from(cx)).powi(2) + (f64::from(y) - f64::from(cy)).powi(2);
                (1.0 - 0.5 * d2 / 100.0).max(0.0) as f32
            })?;
            write_prob_map(&maps_dir.join(image).join(format!("{category}.pgm")), &map)?;
        }
    }

    let convert = ConvertJob {
        input: maps_dir,
        output: root.path().join("predictions"),
        conversion: ConversionConfig::default(),
        workers: 2,
    };
    let summary = cmd_convert(&convert)?;
    println!(
        "convert: {}/{} images -> {}",
        summary.succeeded,
        summary.images,
        convert.output.join("predictions.jsonl").display()
    );
    for line in std::fs::read_to_string(convert.output.join("predictions.jsonl"))?.lines() {
        let record: serde_json::Value = serde_json::from_str(line)?;
        println!(
            "  {}: labels {} counts {} caption {}",
            record["image"], record["labels"], record["counts"], record["caption"]
        );
    }

    // self-evaluation: a prediction manifest scored against itself
    let manifest = convert.output.join("predictions.jsonl");
    let eval = EvalJob {
        pred: manifest.clone(),
        gt: manifest,
        output: root.path().join("report"),
        pr_rule: Default::default(),
    };
    let summary = cmd_eval(&eval)?;
    println!("\neval over {} matched samples:", summary.matched);
    println!("{}", summary.report.text_table());
    Ok(())
}
