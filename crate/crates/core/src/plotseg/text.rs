//! Text-candidate grouping: characters of one string sit next to each other
//! on a shared baseline with roughly even spacing.

use serde::{Deserialize, Serialize};

use super::{BBox, ConnectedComponent};

/// Default relative tolerance on gap evenness within a chain.
pub const DEFAULT_GAP_TOLERANCE: f64 = 0.5;

/// A chain of >= 2 components read as one text string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TextBox {
    pub bbox: BBox,
    pub member_components: Vec<u32>,
    pub mean_gap: f64,
}

fn vertical_overlap(a: &BBox, b: &BBox) -> usize {
    let top = a.top.max(b.top);
    let bottom = a.bottom.min(b.bottom);
    bottom.saturating_sub(top) + usize::from(bottom >= top)
}

fn gap_between(left: &BBox, right: &BBox) -> isize {
    right.left as isize - left.right as isize - 1
}

/// Greedy left-to-right chaining of components into text candidates.
///
/// A component joins the chain when its vertical overlap with the previous
/// member is at least half the shorter height and the horizontal gap is
/// non-negative and at most the median component width. A finished chain
/// becomes a [`TextBox`] when it has >= 2 members and every gap lies within
/// `gap_tolerance` (relative) of the chain's mean gap. Emitted boxes are
/// pairwise non-overlapping; a chain whose box would overlap an earlier one
/// is dropped.
pub fn group_text_candidates(
    components: &[ConnectedComponent],
    gap_tolerance: f64,
) -> Vec<TextBox> {
    if components.len() < 2 {
        return Vec::new();
    }

    let mut widths: Vec<usize> = components.iter().map(|c| c.bbox.width()).collect();
    widths.sort_unstable();
    let median_width = widths[widths.len() / 2] as isize;

    let mut order: Vec<usize> = (0..components.len()).collect();
    order.sort_by_key(|&i| (components[i].bbox.left, components[i].bbox.top));

    let mut used = vec![false; components.len()];
    let mut boxes: Vec<TextBox> = Vec::new();

    for &start in &order {
        if used[start] {
            continue;
        }
        let mut chain = vec![start];
        used[start] = true;
        loop {
            let last = &components[*chain.last().unwrap()].bbox;
            let next = order.iter().copied().find(|&j| {
                if used[j] {
                    return false;
                }
                let b = &components[j].bbox;
                if b.left <= last.right {
                    return false;
                }
                let overlap = vertical_overlap(last, b);
                let min_height = last.height().min(b.height());
                let gap = gap_between(last, b);
                2 * overlap >= min_height && gap >= 0 && gap <= median_width
            });
            match next {
                Some(j) => {
                    used[j] = true;
                    chain.push(j);
                }
                None => break,
            }
        }

        if chain.len() < 2 {
            continue;
        }
        let gaps: Vec<f64> = chain
            .windows(2)
            .map(|pair| gap_between(&components[pair[0]].bbox, &components[pair[1]].bbox) as f64)
            .collect();
        let mean_gap = gaps.iter().sum::<f64>() / gaps.len() as f64;
        let even = gaps
            .iter()
            .all(|&g| (g - mean_gap).abs() <= gap_tolerance * mean_gap.max(f64::EPSILON));
        if !even {
            continue;
        }

        let bbox = chain
            .iter()
            .map(|&i| components[i].bbox)
            .reduce(|a, b| a.union(&b))
            .unwrap();
        if boxes.iter().any(|existing| existing.bbox.intersects(&bbox)) {
            continue;
        }
        boxes.push(TextBox {
            bbox,
            member_components: chain.iter().map(|&i| components[i].label).collect(),
            mean_gap,
        });
    }

    boxes
}
