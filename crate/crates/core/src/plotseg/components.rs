//! 8-connectivity connected-component labeling.

use serde::{Deserialize, Serialize};

use crate::raster::BinaryImage;

use super::BBox;

/// One maximal set of 8-connected foreground pixels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConnectedComponent {
    pub label: u32,
    pub bbox: BBox,
    pub pixel_count: usize,
    /// Arithmetic mean of member pixel coordinates, `(row, col)`.
    pub centroid: (f64, f64),
    /// Component mask cropped to `bbox`.
    pub mask: BinaryImage,
}

const NEIGHBORS: [(isize, isize); 8] = [
    (-1, -1),
    (-1, 0),
    (-1, 1),
    (0, -1),
    (0, 1),
    (1, -1),
    (1, 0),
    (1, 1),
];

/// Labels all foreground components by flood fill. Components are sorted by
/// `(bbox.top, bbox.left)` and labeled 1.. in that order.
pub fn connected_components(img: &BinaryImage) -> Vec<ConnectedComponent> {
    let (h, w) = (img.height(), img.width());
    let mut seen = vec![false; h * w];
    let mut comps: Vec<ConnectedComponent> = Vec::new();
    let mut stack: Vec<(usize, usize)> = Vec::new();

    for start_r in 0..h {
        for start_c in 0..w {
            if img.get(start_r, start_c) == 0 || seen[start_r * w + start_c] {
                continue;
            }
            stack.push((start_r, start_c));
            seen[start_r * w + start_c] = true;
            let mut pixels: Vec<(usize, usize)> = Vec::new();
            while let Some((r, c)) = stack.pop() {
                pixels.push((r, c));
                for (dr, dc) in NEIGHBORS {
                    let (nr, nc) = (r as isize + dr, c as isize + dc);
                    if nr < 0 || nc < 0 || nr >= h as isize || nc >= w as isize {
                        continue;
                    }
                    let (nr, nc) = (nr as usize, nc as usize);
                    if img.get(nr, nc) == 1 && !seen[nr * w + nc] {
                        seen[nr * w + nc] = true;
                        stack.push((nr, nc));
                    }
                }
            }

            let bbox = BBox {
                top: pixels.iter().map(|p| p.0).min().unwrap(),
                left: pixels.iter().map(|p| p.1).min().unwrap(),
                bottom: pixels.iter().map(|p| p.0).max().unwrap(),
                right: pixels.iter().map(|p| p.1).max().unwrap(),
            };
            let n = pixels.len();
            let centroid = (
                pixels.iter().map(|p| p.0 as f64).sum::<f64>() / n as f64,
                pixels.iter().map(|p| p.1 as f64).sum::<f64>() / n as f64,
            );
            let mut mask = BinaryImage::zeros(bbox.width(), bbox.height());
            for &(r, c) in &pixels {
                mask.set(r - bbox.top, c - bbox.left, 1);
            }
            comps.push(ConnectedComponent {
                label: 0,
                bbox,
                pixel_count: n,
                centroid,
                mask,
            });
        }
    }

    comps.sort_by_key(|c| (c.bbox.top, c.bbox.left));
    for (i, c) in comps.iter_mut().enumerate() {
        c.label = i as u32 + 1;
    }
    comps
}
