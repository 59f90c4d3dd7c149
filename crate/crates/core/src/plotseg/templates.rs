//! Marker shape templates and pixel-overlap template matching.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::raster::{binarize, BinaryImage};

use super::{ConnectedComponent, PlotsegError};

/// Matching score below which a component stays unresolved.
pub const DEFAULT_MATCH_THRESHOLD: f64 = 0.85;

/// Candidate marker mask. `anchor` is the top-left placement reference within
/// the mask (always `(0, 0)` for the analytic shapes).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeTemplate {
    pub shape_id: String,
    pub mask: BinaryImage,
    pub anchor: (usize, usize),
}

impl ShapeTemplate {
    pub fn new(shape_id: impl Into<String>, mask: BinaryImage) -> Result<Self, PlotsegError> {
        if mask.foreground_count() == 0 {
            return Err(PlotsegError::EmptyTemplate);
        }
        Ok(Self {
            shape_id: shape_id.into(),
            mask,
            anchor: (0, 0),
        })
    }

    pub fn area(&self) -> usize {
        self.mask.foreground_count()
    }

    /// Mean of foreground pixel coordinates relative to the mask origin.
    pub fn centroid(&self) -> (f64, f64) {
        let n = self.area() as f64;
        let (mut sr, mut sc) = (0.0, 0.0);
        for (r, c) in self.mask.foreground() {
            sr += r as f64;
            sc += c as f64;
        }
        (sr / n, sc / n)
    }
}

/// The analytic marker shapes shipped with the library.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuiltinShape {
    Diamond,
    Triangle,
    Square,
    Circle,
    Cross,
}

impl BuiltinShape {
    pub const ALL: [BuiltinShape; 5] = [
        BuiltinShape::Diamond,
        BuiltinShape::Triangle,
        BuiltinShape::Square,
        BuiltinShape::Circle,
        BuiltinShape::Cross,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            BuiltinShape::Diamond => "diamond",
            BuiltinShape::Triangle => "triangle",
            BuiltinShape::Square => "square",
            BuiltinShape::Circle => "circle",
            BuiltinShape::Cross => "cross",
        }
    }
}

/// Generates a filled analytic shape mask of odd side `size` (>= 3).
pub fn shape_template(shape: BuiltinShape, size: usize) -> ShapeTemplate {
    assert!(size >= 3 && size % 2 == 1, "shape size must be odd and >= 3");
    let r = size / 2;
    let inside = |i: usize, j: usize| -> bool {
        let (di, dj) = (i as isize - r as isize, j as isize - r as isize);
        match shape {
            BuiltinShape::Diamond => di.unsigned_abs() + dj.unsigned_abs() <= r,
            BuiltinShape::Triangle => {
                // Apex at the top row, full base at the bottom row.
                let half_width = (i * r + (size - 1) / 2) / (size - 1);
                dj.unsigned_abs() <= half_width
            }
            BuiltinShape::Square => true,
            BuiltinShape::Circle => (di * di + dj * dj) as usize <= r * r,
            BuiltinShape::Cross => di.unsigned_abs() <= 1 || dj.unsigned_abs() <= 1,
        }
    };
    let mut mask = BinaryImage::zeros(size, size);
    for i in 0..size {
        for j in 0..size {
            if inside(i, j) {
                mask.set(i, j, 1);
            }
        }
    }
    ShapeTemplate::new(shape.id(), mask).expect("analytic shapes are non-empty")
}

/// A set of templates with unique shape ids.
#[derive(Debug, Clone, Default)]
pub struct TemplateLibrary {
    templates: Vec<ShapeTemplate>,
}

impl TemplateLibrary {
    pub fn new() -> Self {
        Self::default()
    }

    /// All five builtin shapes at side 11.
    pub fn builtin() -> Self {
        builtin_library()
    }

    pub fn push(&mut self, template: ShapeTemplate) -> Result<(), PlotsegError> {
        if self.templates.iter().any(|t| t.shape_id == template.shape_id) {
            return Err(PlotsegError::DuplicateShapeId(template.shape_id));
        }
        self.templates.push(template);
        Ok(())
    }

    /// Loads every `<shape_id>.pgm` in a directory. File stems become shape
    /// ids; masks are binarized with the dark-ink convention.
    pub fn from_dir(dir: impl AsRef<Path>) -> Result<Self, PlotsegError> {
        let dir = dir.as_ref();
        let mut entries: Vec<_> = std::fs::read_dir(dir)
            .map_err(|e| PlotsegError::TemplateLoad {
                path: dir.to_path_buf(),
                detail: e.to_string(),
            })?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|ext| ext == "pgm"))
            .collect();
        entries.sort();
        let mut lib = Self::new();
        for path in entries {
            let gray = crate::raster::load_image(&path).map_err(|e| PlotsegError::TemplateLoad {
                path: path.clone(),
                detail: e.to_string(),
            })?;
            let mask = binarize(&gray, None);
            let stem = path
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or("template")
                .to_string();
            let template =
                ShapeTemplate::new(stem, mask).map_err(|_| PlotsegError::TemplateLoad {
                    path: path.clone(),
                    detail: "template has no foreground ink".into(),
                })?;
            lib.push(template)?;
        }
        Ok(lib)
    }

    pub fn get(&self, shape_id: &str) -> Option<&ShapeTemplate> {
        self.templates.iter().find(|t| t.shape_id == shape_id)
    }

    pub fn iter(&self) -> impl Iterator<Item = &ShapeTemplate> {
        self.templates.iter()
    }

    pub fn len(&self) -> usize {
        self.templates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.templates.is_empty()
    }

    /// Largest template height/width, pixels.
    pub fn max_extent(&self) -> (usize, usize) {
        let h = self.templates.iter().map(|t| t.mask.height()).max().unwrap_or(0);
        let w = self.templates.iter().map(|t| t.mask.width()).max().unwrap_or(0);
        (h, w)
    }
}

/// The default template set: diamond, triangle, square, circle and cross at
/// side 11 (areas between roughly 57 and 121 pixels).
pub fn builtin_library() -> TemplateLibrary {
    let mut lib = TemplateLibrary::new();
    for shape in BuiltinShape::ALL {
        lib.push(shape_template(shape, 11)).expect("builtin ids are unique");
    }
    lib
}

/// Outcome of matching one component against a template library.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ShapeMatch {
    /// Best template scored at or above the threshold.
    Shape { shape_id: String, score: f64 },
    /// No template reached the threshold; candidate for annealing.
    Unresolved { best_score: f64 },
}

impl ShapeMatch {
    pub fn shape_id(&self) -> Option<&str> {
        match self {
            ShapeMatch::Shape { shape_id, .. } => Some(shape_id),
            ShapeMatch::Unresolved { .. } => None,
        }
    }
}

/// Pixel-overlap F1 of two masks aligned at bbox top-left plus `(di, dj)`.
fn overlap_f1(a: &BinaryImage, b: &BinaryImage, di: isize, dj: isize) -> f64 {
    let mut inter = 0usize;
    for (r, c) in a.foreground() {
        let (br, bc) = (r as isize - di, c as isize - dj);
        if br >= 0 && bc >= 0 && (br as usize) < b.height() && (bc as usize) < b.width() {
            inter += b.get(br as usize, bc as usize) as usize;
        }
    }
    let na = a.foreground_count();
    let nb = b.foreground_count();
    2.0 * inter as f64 / (na + nb) as f64
}

/// Scores a component against every template by maximal pixel-overlap F1
/// `2|A n B| / (|A| + |B|)` over integer alignment offsets within +-2 px of
/// bbox top-left alignment. Returns the best shape id when the score reaches
/// `match_threshold`, otherwise `Unresolved`.
pub fn classify_component(
    component: &ConnectedComponent,
    templates: &TemplateLibrary,
    match_threshold: f64,
) -> ShapeMatch {
    assert!(!templates.is_empty(), "template library must be non-empty");
    let mut best_score = f64::NEG_INFINITY;
    let mut best_id: &str = "";
    for template in templates.iter() {
        for di in -2isize..=2 {
            for dj in -2isize..=2 {
                let f1 = overlap_f1(&component.mask, &template.mask, di, dj);
                if f1 > best_score {
                    best_score = f1;
                    best_id = &template.shape_id;
                }
            }
        }
    }
    if best_score >= match_threshold {
        ShapeMatch::Shape {
            shape_id: best_id.to_string(),
            score: best_score,
        }
    } else {
        ShapeMatch::Unresolved {
            best_score: best_score.max(0.0),
        }
    }
}
