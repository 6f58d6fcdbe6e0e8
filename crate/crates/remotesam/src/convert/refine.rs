//! Marker-based splitting of merged adjacent objects.
//!
//! Box extraction alone merges touching objects into one component. This
//! pass finds the probability peaks inside a component and, when there is
//! more than one, partitions the component's pixels by nearest peak, so
//! each object keeps its own box. It is a deterministic stand-in for a
//! learned contour model and can be switched off entirely.

use crate::mask::{BinaryMask, ProbMap};

#[inline]
fn dist2(ax: u32, ay: u32, bx: u32, by: u32) -> u64 {
    let dx = i64::from(ax) - i64::from(bx);
    let dy = i64::from(ay) - i64::from(by);
    (dx * dx + dy * dy) as u64
}

/// Splits one connected component by its probability peaks.
///
/// A pixel is a peak when no 8-neighbour has a higher value; ties inside a
/// flat plateau resolve to the plateau pixel that comes first in row-major
/// scan order, so binary plateaus produce a single peak and stay whole.
/// Peaks are then thinned so no two survive within `radius` pixels
/// (strongest kept first), and each component pixel joins its nearest
/// surviving peak. Components with a single peak are returned unchanged.
pub fn split_by_markers(
    component: &BinaryMask,
    map: &ProbMap,
    threshold: f32,
    radius: u32,
) -> Vec<BinaryMask> {
    debug_assert!(component.width() == map.width() && component.height() == map.height());
    let (w, h) = (map.width(), map.height());

    // candidate peaks, strongest first, scan order breaking value ties
    let mut candidates: Vec<(f32, u32, u32)> = Vec::new();
    'pixels: for (x, y) in component.foreground() {
        let p = map.get(x, y);
        if p < threshold {
            continue;
        }
        let y0 = y.saturating_sub(1);
        let y1 = (y + 1).min(h - 1);
        let x0 = x.saturating_sub(1);
        let x1 = (x + 1).min(w - 1);
        for ny in y0..=y1 {
            for nx in x0..=x1 {
                if nx == x && ny == y {
                    continue;
                }
                let q = map.get(nx, ny);
                if q > p || (q == p && (ny, nx) < (y, x)) {
                    continue 'pixels;
                }
            }
        }
        candidates.push((p, y, x));
    }
    candidates.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

    let r2 = u64::from(radius) * u64::from(radius);
    let mut markers: Vec<(u32, u32)> = Vec::new();
    for &(_, y, x) in &candidates {
        if markers.iter().all(|&(mx, my)| dist2(x, y, mx, my) > r2) {
            markers.push((x, y));
        }
    }

    if markers.len() <= 1 {
        return vec![component.clone()];
    }

    let mut parts: Vec<BinaryMask> = markers
        .iter()
        .map(|_| BinaryMask::zeros(w, h).expect("component dims are valid"))
        .collect();
    for (x, y) in component.foreground() {
        let mut best = 0usize;
        let mut best_d = u64::MAX;
        for (i, &(mx, my)) in markers.iter().enumerate() {
            let d = dist2(x, y, mx, my);
            // ties go to the earlier (stronger) marker
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        parts[best].set(x, y, true);
    }
    parts.retain(|m| !m.is_empty());
    parts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mask::{binarize, connected_components, mask_overlap, Connectivity};

    /// Two radial peaks whose feet overlap into one component.
    fn twin_peak_map() -> ProbMap {
        let centers = [(8.0f64, 10.0f64), (21.0, 10.0)];
        ProbMap::from_fn(30, 20, "c", |x, y| {
            centers
                .iter()
                .map(|&(cx, cy)| {
                    let d = ((f64::from(x) - cx).powi(2) + (f64::from(y) - cy).powi(2)).sqrt();
                    (0.95 - 0.05 * d).max(0.0) as f32
                })
                .fold(0.0f32, f32::max)
        })
        .unwrap()
    }

    #[test]
    fn merged_component_splits_at_two_peaks() {
        let map = twin_peak_map();
        let mask = binarize(&map, 0.5);
        let comps = connected_components(&mask, Connectivity::Eight);
        assert_eq!(comps.len(), 1, "feet must overlap into one component");
        let parts = split_by_markers(&comps[0].mask, &map, 0.5, 5);
        assert_eq!(parts.len(), 2);
        // the partition covers the component exactly and is disjoint
        let mut union = BinaryMask::zeros(30, 20).unwrap();
        for p in &parts {
            let (inter, _) = mask_overlap(&union, p).unwrap();
            assert_eq!(inter, 0);
            union.union_with(p).unwrap();
        }
        assert_eq!(union, comps[0].mask);
        // each part holds one of the peak centers
        assert!(parts[0].get(8, 10) ^ parts[1].get(8, 10));
        assert!(parts[0].get(21, 10) ^ parts[1].get(21, 10));
    }

    #[test]
    fn single_peak_component_is_unchanged() {
        let map = ProbMap::from_fn(16, 16, "c", |x, y| {
            let d = ((f64::from(x) - 8.0).powi(2) + (f64::from(y) - 8.0).powi(2)).sqrt();
            (0.9 - 0.08 * d).max(0.0) as f32
        })
        .unwrap();
        let mask = binarize(&map, 0.5);
        let comps = connected_components(&mask, Connectivity::Eight);
        assert_eq!(comps.len(), 1);
        let parts = split_by_markers(&comps[0].mask, &map, 0.5, 5);
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0], comps[0].mask);
    }

    #[test]
    fn flat_plateau_yields_one_marker() {
        // a binary plateau carries no sub-object evidence, so it must not
        // be shredded into radius-sized tiles
        let map = ProbMap::from_fn(40, 12, "c", |x, y| {
            if (2..38).contains(&x) && (2..10).contains(&y) {
                1.0
            } else {
                0.0
            }
        })
        .unwrap();
        let mask = binarize(&map, 0.5);
        let comps = connected_components(&mask, Connectivity::Eight);
        let parts = split_by_markers(&comps[0].mask, &map, 0.5, 5);
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0], comps[0].mask);
    }

    #[test]
    fn close_peaks_within_radius_are_suppressed() {
        let centers = [(6.0f64, 6.0f64), (9.0, 6.0)]; // 3 px apart
        let map = ProbMap::from_fn(16, 12, "c", |x, y| {
            centers
                .iter()
                .map(|&(cx, cy)| {
                    let d = ((f64::from(x) - cx).powi(2) + (f64::from(y) - cy).powi(2)).sqrt();
                    (0.9 - 0.06 * d).max(0.0) as f32
                })
                .fold(0.0f32, f32::max)
        })
        .unwrap();
        let mask = binarize(&map, 0.5);
        let comps = connected_components(&mask, Connectivity::Eight);
        assert_eq!(comps.len(), 1);
        // radius 5 swallows the second peak; radius 2 keeps both
        assert_eq!(split_by_markers(&comps[0].mask, &map, 0.5, 5).len(), 1);
        assert_eq!(split_by_markers(&comps[0].mask, &map, 0.5, 2).len(), 2);
    }
}
