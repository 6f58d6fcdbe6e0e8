//! Rule-based image captioning from labels, counts and boxes.
//!
//! The caption is a fixed template over a 3x3 grid of image positions, so
//! identical inputs always produce byte-identical text.

use std::collections::{BTreeMap, BTreeSet};

use super::Detection;

const GRID_NAMES: [[&str; 3]; 3] = [
    ["top left", "top center", "top right"],
    ["middle left", "center", "middle right"],
    ["bottom left", "bottom center", "bottom right"],
];

fn grid_cell(cx: f64, cy: f64, width: u32, height: u32) -> (usize, usize) {
    let col = ((cx * 3.0 / f64::from(width)) as usize).min(2);
    let row = ((cy * 3.0 / f64::from(height)) as usize).min(2);
    (row, col)
}

fn join_names(names: &[&str]) -> String {
    match names {
        [] => String::new(),
        [only] => (*only).to_string(),
        [head @ .., last] => format!("{} and {}", head.join(", "), last),
    }
}

fn plural(category: &str) -> String {
    if category.ends_with('s') {
        category.to_string()
    } else {
        format!("{category}s")
    }
}

/// Builds a deterministic caption: one sentence per category, stating the
/// count and the coarse grid positions of its boxes. Categories are ordered
/// by descending count, then by name; an empty label set yields a fixed
/// no-object sentence.
pub fn generate_caption(
    labels: &BTreeSet<String>,
    counts: &BTreeMap<String, usize>,
    boxes: &[Detection],
    width: u32,
    height: u32,
) -> String {
    if labels.is_empty() {
        return "No salient objects detected.".to_string();
    }

    let mut ordered: Vec<(&str, usize)> = labels
        .iter()
        .map(|l| (l.as_str(), counts.get(l).copied().unwrap_or(0)))
        .collect();
    ordered.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));

    let mut sentences = Vec::with_capacity(ordered.len());
    for (category, count) in ordered {
        let cells: BTreeSet<(usize, usize)> = boxes
            .iter()
            .filter(|d| d.category == category)
            .map(|d| {
                let (cx, cy) = d.bbox.center();
                grid_cell(cx, cy, width, height)
            })
            .collect();
        let names: Vec<&str> = cells.iter().map(|&(r, c)| GRID_NAMES[r][c]).collect();
        let place = if names.is_empty() {
            "in the image".to_string()
        } else {
            format!("in the {}", join_names(&names))
        };
        let sentence = if count == 1 {
            format!("There is 1 {category} {place}.")
        } else {
            format!("There are {count} {} {place}.", plural(category))
        };
        sentences.push(sentence);
    }
    sentences.join(" ")
}
