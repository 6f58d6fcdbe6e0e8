//! Shows why box extraction needs the marker-based split: two touching
//! objects merge into one component, producing a single box unless
//! refinement separates them at their probability peaks.
//!
//! ```bash
//! cargo run -p remotesam --example touching_objects
//! ```

use remotesam::convert::{detect_objects, ConversionConfig};
use remotesam::mask::ProbMap;

fn main() -> anyhow::Result<()> {
    // two ships whose hulls overlap at the waterline
    let centers = [(30.0f64, 20.0f64), (52.0, 20.0)];
    let map = ProbMap::from_fn(84, 40, "ship", |x, y| {
        centers
            .iter()
            .map(|&(cx, cy)| {
                let d2 = (f64::from(x) - cx).powi(2) + (f64::from(y) - cy).powi(2);
                (1.0 - 0.5 * d2 / 144.0).max(0.0) as f32
            })
            .fold(0.0f32, f32::max)
    })?;

    let merged = detect_objects(
        std::slice::from_ref(&map),
        &ConversionConfig {
            refine: false,
            ..ConversionConfig::default()
        },
    )?;
    println!("without refinement: {} detection(s)", merged.len());
    for d in &merged {
        println!("  {:?} score {:.3}", d.bbox, d.score);
    }

    let split = detect_objects(std::slice::from_ref(&map), &ConversionConfig::default())?;
    println!("with refinement:    {} detection(s)", split.len());
    for d in &split {
        println!("  {:?} score {:.3}", d.bbox, d.score);
    }
    Ok(())
}
