//! Connected-component labelling for binary masks.

use super::BinaryMask;

/// Which neighbours of a pixel count as connected to it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connectivity {
    /// N, S, E, W neighbours.
    Four,
    /// All eight neighbours, diagonals included.
    Eight,
}

impl Default for Connectivity {
    /// Eight-way: diagonally touching objects (vehicle queues, ship rows)
    /// stay one instance unless explicitly split later.
    fn default() -> Self {
        Connectivity::Eight
    }
}

/// One maximal connected region of a mask's foreground.
#[derive(Debug, Clone)]
pub struct InstanceMask {
    /// Ordinal of the component in the deterministic output order.
    pub component_id: usize,
    /// Mask with only this component's pixels set; same dims as the source.
    pub mask: BinaryMask,
    pub pixel_count: u64,
}

/// Splits the foreground into maximal connected regions.
///
/// Components are ordered by their topmost row, then leftmost column
/// (first-encounter order in the row-major scan breaks the rare remaining
/// ties). The returned masks are pairwise disjoint and their union is
/// bit-identical to the input foreground.
pub fn connected_components(mask: &BinaryMask, connectivity: Connectivity) -> Vec<InstanceMask> {
    let (w, h) = (mask.width() as usize, mask.height() as usize);
    let mut labels = vec![0u32; w * h];
    let mut next = 0u32;
    // (min_row, min_col, first_seen) per component, indexed by label - 1
    let mut keys: Vec<(u32, u32, u32)> = Vec::new();
    let mut stack = Vec::new();

    for start in 0..w * h {
        if mask.bits()[start] == 0 || labels[start] != 0 {
            continue;
        }
        next += 1;
        let label = next;
        let mut min_row = u32::MAX;
        let mut min_col = u32::MAX;
        stack.push(start);
        labels[start] = label;
        while let Some(idx) = stack.pop() {
            let (x, y) = (idx % w, idx / w);
            min_row = min_row.min(y as u32);
            min_col = min_col.min(x as u32);
            let x0 = x.saturating_sub(1);
            let x1 = (x + 1).min(w - 1);
            let y0 = y.saturating_sub(1);
            let y1 = (y + 1).min(h - 1);
            for ny in y0..=y1 {
                for nx in x0..=x1 {
                    if connectivity == Connectivity::Four && nx != x && ny != y {
                        continue;
                    }
                    let nidx = ny * w + nx;
                    if mask.bits()[nidx] != 0 && labels[nidx] == 0 {
                        labels[nidx] = label;
                        stack.push(nidx);
                    }
                }
            }
        }
        keys.push((min_row, min_col, label - 1));
    }

    let mut order: Vec<usize> = (0..keys.len()).collect();
    order.sort_by_key(|&i| keys[i]);
    // old label -> position in sorted order
    let mut rank = vec![0usize; keys.len()];
    for (pos, &i) in order.iter().enumerate() {
        rank[i] = pos;
    }

    let mut out: Vec<InstanceMask> = order
        .iter()
        .enumerate()
        .map(|(pos, _)| InstanceMask {
            component_id: pos,
            mask: BinaryMask::zeros(mask.width(), mask.height()).expect("source mask is non-empty"),
            pixel_count: 0,
        })
        .collect();
    for (idx, &label) in labels.iter().enumerate() {
        if label == 0 {
            continue;
        }
        let inst = &mut out[rank[label as usize - 1]];
        inst.mask.set((idx % w) as u32, (idx / w) as u32, true);
        inst.pixel_count += 1;
    }
    out
}
