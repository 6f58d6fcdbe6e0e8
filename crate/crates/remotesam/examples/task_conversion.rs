//! Converts one synthetic scene's probability maps into all task outputs:
//! semantic segmentation, detections, grounding boxes, multi-label and
//! scene classification, counts and a caption.
//!
//! ```bash
//! cargo run -p remotesam --example task_conversion
//! ```

use std::collections::BTreeMap;

use remotesam::convert::{
    count_objects, detect_objects, generate_caption, mask_to_bbox, multilabel_classify,
    scene_classify, semantic_segmentation, ConversionConfig,
};
use remotesam::mask::{binarize, ProbMap};

/// Radial blob peaking at 1.0 in the center and crossing 0.5 at radius r.
fn blob(map: &mut [f32], w: u32, cx: u32, cy: u32, r: u32) {
    for (i, v) in map.iter_mut().enumerate() {
        let x = (i as u32) % w;
        let y = (i as u32) / w;
        let dx = f64::from(x) - f64::from(cx);
        let dy = f64::from(y) - f64::from(cy);
        let p = (1.0 - 0.5 * (dx * dx + dy * dy) / f64::from(r * r)).max(0.0) as f32;
        *v = v.max(p);
    }
}

fn main() -> anyhow::Result<()> {
    let (w, h) = (96u32, 96u32);
    let mut airplane = vec![0.0f32; (w * h) as usize];
    blob(&mut airplane, w, 24, 20, 9);
    blob(&mut airplane, w, 70, 26, 8);
    let mut ship = vec![0.0f32; (w * h) as usize];
    blob(&mut ship, w, 48, 70, 11);

    let maps = vec![
        ProbMap::new(w, h, airplane, "airplane")?,
        ProbMap::new(w, h, ship, "ship")?,
    ];
    let config = ConversionConfig::default();

    // referring segmentation is the identity task: threshold the map
    let airplane_mask = binarize(&maps[0], config.tau_seg);
    println!(
        "referring mask   airplane: {} px, grounding box {:?}",
        airplane_mask.area(),
        mask_to_bbox(&airplane_mask)
    );

    let semseg = semantic_segmentation(&maps, &config)?;
    let mut per_class: BTreeMap<&str, usize> = BTreeMap::new();
    for y in 0..h {
        for x in 0..w {
            if let Some(category) = semseg.category_at(x, y) {
                *per_class.entry(category).or_default() += 1;
            }
        }
    }
    println!("semantic seg     {per_class:?}");

    let detections = detect_objects(&maps, &config)?;
    for d in &detections {
        println!(
            "detection        {}: {:?} score {:.3}",
            d.category, d.bbox, d.score
        );
    }

    let labels = multilabel_classify(&maps, &config);
    println!("multi-label      {labels:?}");
    println!("scene class      {}", scene_classify(&maps, &config)?);

    let counts: BTreeMap<String, usize> = maps
        .iter()
        .map(|m| (m.label.clone(), count_objects(&detections, &m.label)))
        .collect();
    println!("counts           {counts:?}");

    let caption = generate_caption(&labels, &counts, &detections, w, h);
    println!("caption          {caption}");
    Ok(())
}
