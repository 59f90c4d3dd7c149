//! Structural decomposition of a classified 2-D plot: coordinate-axes
//! detection, region segmentation, connected components, text-candidate
//! grouping, line removal and marker-template matching.
//!
//! Region model: the plotting region sits above the horizontal (x) axis and
//! right of the vertical (y) axis; the x-axis region is everything strictly
//! below the x axis; the y-axis region is everything strictly left of the y
//! axis and not below the x axis. A 2-pixel guard band around each axis keeps
//! axis ink out of the plotting region.

mod components;
mod lines;
mod templates;
mod text;

pub use components::{connected_components, ConnectedComponent};
pub use lines::{remove_lines, remove_lines_with, DEFAULT_MARKER_MAX_AREA};
pub use templates::{
    builtin_library, classify_component, shape_template, BuiltinShape, ShapeMatch, ShapeTemplate,
    TemplateLibrary, DEFAULT_MATCH_THRESHOLD,
};
pub use text::{group_text_candidates, TextBox, DEFAULT_GAP_TOLERANCE};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::{hough_lines, HoughParams, LineSegment};
use crate::raster::BinaryImage;

/// Pixels of guard band excluded around each axis when forming regions.
pub const AXIS_GUARD_BAND: usize = 2;

/// Maximum deviation of an axis line from horizontal/vertical, degrees.
pub const AXIS_ORIENTATION_TOLERANCE_DEG: f64 = 10.0;

#[derive(Debug, Error)]
pub enum PlotsegError {
    #[error("axes not found: {detail}")]
    AxesNotFound { detail: String },
    #[error("degenerate region: {which} has zero area")]
    DegenerateRegion { which: &'static str },
    #[error("duplicate shape id '{0}' in template library")]
    DuplicateShapeId(String),
    #[error("template mask must contain at least one foreground pixel")]
    EmptyTemplate,
    #[error("cannot load template {path}: {detail}")]
    TemplateLoad { path: std::path::PathBuf, detail: String },
}

/// Inclusive pixel bounding box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BBox {
    pub top: usize,
    pub left: usize,
    pub bottom: usize,
    pub right: usize,
}

impl BBox {
    pub fn width(&self) -> usize {
        self.right - self.left + 1
    }

    pub fn height(&self) -> usize {
        self.bottom - self.top + 1
    }

    pub fn area(&self) -> usize {
        self.width() * self.height()
    }

    pub fn contains(&self, row: usize, col: usize) -> bool {
        (self.top..=self.bottom).contains(&row) && (self.left..=self.right).contains(&col)
    }

    pub fn intersects(&self, other: &BBox) -> bool {
        self.left <= other.right
            && other.left <= self.right
            && self.top <= other.bottom
            && other.top <= self.bottom
    }

    /// Smallest box covering both.
    pub fn union(&self, other: &BBox) -> BBox {
        BBox {
            top: self.top.min(other.top),
            left: self.left.min(other.left),
            bottom: self.bottom.max(other.bottom),
            right: self.right.max(other.right),
        }
    }
}

/// The three regions of a segmented plot plus the axis lines they derive from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotRegions {
    pub x_axis_region: BBox,
    pub y_axis_region: BBox,
    pub plotting_region: BBox,
    pub x_axis_line: LineSegment,
    pub y_axis_line: LineSegment,
}

fn orientation_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).abs() % 180.0;
    d.min(180.0 - d)
}

/// Finds the x (horizontal) and y (vertical) axis lines: the strongest Hough
/// line within 10 degrees of each orientation. Their mutual angle must fall in
/// [80, 100] degrees.
pub fn detect_axes(img: &BinaryImage) -> Result<(LineSegment, LineSegment), PlotsegError> {
    detect_axes_with(img, &HoughParams::default())
}

pub fn detect_axes_with(
    img: &BinaryImage,
    params: &HoughParams,
) -> Result<(LineSegment, LineSegment), PlotsegError> {
    let lines = hough_lines(img, params);
    // Lines arrive strongest-first, so the first hit per family is the best.
    let x_axis = lines
        .iter()
        .find(|l| orientation_distance(l.orientation_deg, 0.0) <= AXIS_ORIENTATION_TOLERANCE_DEG)
        .cloned()
        .ok_or_else(|| PlotsegError::AxesNotFound {
            detail: "no near-horizontal line".into(),
        })?;
    let y_axis = lines
        .iter()
        .find(|l| orientation_distance(l.orientation_deg, 90.0) <= AXIS_ORIENTATION_TOLERANCE_DEG)
        .cloned()
        .ok_or_else(|| PlotsegError::AxesNotFound {
            detail: "no near-vertical line".into(),
        })?;
    let mutual = orientation_distance(x_axis.orientation_deg, y_axis.orientation_deg);
    if !(80.0..=100.0).contains(&mutual) {
        return Err(PlotsegError::AxesNotFound {
            detail: format!("axis mutual angle {mutual:.1} outside [80, 100]"),
        });
    }
    Ok((x_axis, y_axis))
}

/// Splits the image into plotting, x-axis and y-axis regions around the
/// detected axes. See the module docs for the layout; all three boxes are
/// pairwise disjoint and clipped to the image.
pub fn segment_regions(
    img: &BinaryImage,
    axes: &(LineSegment, LineSegment),
) -> Result<PlotRegions, PlotsegError> {
    let (x_axis, y_axis) = axes;
    let (h, w) = (img.height(), img.width());
    let axis_row = x_axis
        .row_at((w as f64 - 1.0) / 2.0)
        .ok_or_else(|| PlotsegError::AxesNotFound {
            detail: "x axis is vertical".into(),
        })?
        .round();
    let axis_col = y_axis
        .col_at((h as f64 - 1.0) / 2.0)
        .ok_or_else(|| PlotsegError::AxesNotFound {
            detail: "y axis is horizontal".into(),
        })?
        .round();
    if axis_row < 0.0 || axis_row >= h as f64 || axis_col < 0.0 || axis_col >= w as f64 {
        return Err(PlotsegError::AxesNotFound {
            detail: format!("axis intersection ({axis_row}, {axis_col}) outside image"),
        });
    }
    let (axis_row, axis_col) = (axis_row as usize, axis_col as usize);

    if axis_row < AXIS_GUARD_BAND + 1 {
        return Err(PlotsegError::DegenerateRegion {
            which: "plotting_region",
        });
    }
    let plot_bottom = axis_row - AXIS_GUARD_BAND - 1;
    let plot_left = axis_col + AXIS_GUARD_BAND + 1;
    if plot_left > w - 1 {
        return Err(PlotsegError::DegenerateRegion {
            which: "plotting_region",
        });
    }
    if axis_row + 1 > h - 1 {
        return Err(PlotsegError::DegenerateRegion {
            which: "x_axis_region",
        });
    }
    if axis_col == 0 {
        return Err(PlotsegError::DegenerateRegion {
            which: "y_axis_region",
        });
    }

    Ok(PlotRegions {
        plotting_region: BBox {
            top: 0,
            left: plot_left,
            bottom: plot_bottom,
            right: w - 1,
        },
        x_axis_region: BBox {
            top: axis_row + 1,
            left: 0,
            bottom: h - 1,
            right: w - 1,
        },
        y_axis_region: BBox {
            top: 0,
            left: 0,
            bottom: axis_row,
            right: axis_col - 1,
        },
        x_axis_line: x_axis.clone(),
        y_axis_line: y_axis.clone(),
    })
}
