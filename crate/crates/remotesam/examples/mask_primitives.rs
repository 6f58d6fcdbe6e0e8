//! Tour of the mask layer: thresholding, run-length coding, connected
//! components and IoU.
//!
//! ```bash
//! cargo run -p remotesam --example mask_primitives
//! ```

use remotesam::mask::{
    binarize, connected_components, mask_iou, rle_decode, rle_encode, BinaryMask, Connectivity,
    ProbMap, RleMask,
};

fn render(mask: &BinaryMask) -> String {
    let mut out = String::new();
    for y in 0..mask.height() {
        for x in 0..mask.width() {
            out.push(if mask.get(x, y) { '#' } else { '.' });
        }
        out.push('\n');
    }
    out
}

fn main() -> anyhow::Result<()> {
    let map = ProbMap::from_fn(20, 8, "demo", |x, y| {
        let left = ((x as i32 - 4).pow(2) + (y as i32 - 4).pow(2)) as f32;
        let right = ((x as i32 - 14).pow(2) + (y as i32 - 3).pow(2)) as f32;
        (1.0 - left / 12.0).max(1.0 - right / 8.0).max(0.0)
    })?;
    let mask = binarize(&map, 0.5);
    println!("binarized at 0.5:\n{}", render(&mask));

    let runs = rle_encode(&mask);
    println!("rle runs ({} total): {runs:?}", runs.len());
    let back = rle_decode(&runs, mask.width(), mask.height())?;
    println!("round trip identical: {}", back == mask);

    // the same RLE as it appears inside JSON manifests
    println!(
        "manifest form: {}",
        serde_json::to_string(&RleMask::from(&mask))?
    );

    let components = connected_components(&mask, Connectivity::Eight);
    println!("components: {}", components.len());
    for c in &components {
        println!("  component {} covers {} px", c.component_id, c.pixel_count);
    }

    let iou = mask_iou(&components[0].mask, &mask)?;
    println!("IoU of first component vs whole mask: {iou:.4}");
    Ok(())
}
