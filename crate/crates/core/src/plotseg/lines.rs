//! Line removal that leaves data-point markers behind.

use crate::features::LineSegment;
use crate::raster::BinaryImage;

use super::connected_components;

/// Components with a bounding-box area at or below this stay protected from
/// line erasure.
pub const DEFAULT_MARKER_MAX_AREA: usize = 400;

/// [`remove_lines_with`] using [`DEFAULT_MARKER_MAX_AREA`].
pub fn remove_lines(
    region: &BinaryImage,
    lines: &[LineSegment],
    thickness: f64,
) -> BinaryImage {
    remove_lines_with(region, lines, thickness, DEFAULT_MARKER_MAX_AREA)
}

/// Erases foreground within `thickness` of any listed line, except where the
/// ink belongs to a marker.
///
/// Marker protection: after the provisional erase, every surviving component
/// whose bounding box is at most `marker_max_area` counts as a marker, and
/// erased pixels 8-connected to it (within a short reach of the band width)
/// are restored. A marker sitting on a line keeps its body; bare line runs
/// stay erased. Never adds foreground: the output is a subset of the input.
pub fn remove_lines_with(
    region: &BinaryImage,
    lines: &[LineSegment],
    thickness: f64,
    marker_max_area: usize,
) -> BinaryImage {
    if lines.is_empty() {
        return region.clone();
    }
    let (h, w) = (region.height(), region.width());

    let mut banded = vec![false; h * w];
    for (r, c) in region.foreground() {
        if lines.iter().any(|l| l.distance_to(r, c) <= thickness) {
            banded[r * w + c] = true;
        }
    }

    let mut out = region.clone();
    for (idx, &in_band) in banded.iter().enumerate() {
        if in_band {
            out.set(idx / w, idx % w, 0);
        }
    }

    // Reclaim band pixels attached to small (marker) components. The flood is
    // depth-limited so a marker pulls back its own body where the band cut
    // through it without re-growing the whole line.
    let max_depth = 2 * thickness.ceil() as usize + 1;
    let mut frontier: Vec<(usize, usize)> = Vec::new();
    for comp in connected_components(&out) {
        if comp.bbox.area() > marker_max_area {
            continue;
        }
        for (r, c) in comp.mask.foreground() {
            frontier.push((comp.bbox.top + r, comp.bbox.left + c));
        }
    }
    for _ in 0..max_depth {
        let mut next: Vec<(usize, usize)> = Vec::new();
        for &(r, c) in &frontier {
            for dr in -1isize..=1 {
                for dc in -1isize..=1 {
                    let (nr, nc) = (r as isize + dr, c as isize + dc);
                    if nr < 0 || nc < 0 || nr >= h as isize || nc >= w as isize {
                        continue;
                    }
                    let (nr, nc) = (nr as usize, nc as usize);
                    if banded[nr * w + nc] {
                        banded[nr * w + nc] = false;
                        out.set(nr, nc, 1);
                        next.push((nr, nc));
                    }
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }

    out
}
