//! Seeded ground-truth generators: overlap images for the disambiguation
//! experiments, synthetic plots with recorded axes/markers/captions, and
//! negative images plus captions for the classifier corpus.
//!
//! Every generator is deterministic in its seed, and batch builders derive
//! one seed per item so parallel generation cannot change results.

mod eval;

pub use eval::{eval_disambiguation, RecallTable, ShapeRecall};

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::anneal::{render, AnnealError, Placement};
use crate::derive_seed;
use crate::features::{compute_features, FeatureParams, FeatureVector};
use crate::plotseg::TemplateLibrary;
use crate::raster::{BinaryImage, GrayImage};

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("spec infeasible after {attempts} attempts: {detail}")]
    InfeasibleSpec { attempts: usize, detail: String },
    #[error("spec invalid: {0}")]
    BadSpec(String),
    #[error("unknown shape id '{0}'")]
    UnknownShape(String),
    #[error(transparent)]
    Anneal(#[from] AnnealError),
    #[error("feature extraction failed: {0}")]
    Feature(#[from] crate::features::FeatureError),
}

const MAX_ATTEMPTS: usize = 10_000;

/// Same-shape truth placements closer than this (Euclidean, pixels) are
/// rejected; they are indistinguishable at the matching tolerance.
const SAME_SHAPE_MIN_DIST: f64 = 4.0;

/// Every placement keeps at least this fraction of its pixels uncovered by
/// the other shapes, so each data point stays recoverable from the OR image.
const MIN_VISIBLE_FRACTION: f64 = 0.4;

/// Specification of one random overlapping-points image.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OverlapSpec {
    /// Canvas (height, width) in pixels.
    pub canvas: (usize, usize),
    pub shape_counts: BTreeMap<String, usize>,
    /// Minimum number of placement pairs whose masks intersect.
    pub min_overlap_pairs: usize,
    pub seed: u64,
}

impl Default for OverlapSpec {
    fn default() -> Self {
        Self {
            canvas: (90, 90),
            shape_counts: BTreeMap::new(),
            min_overlap_pairs: 0,
            seed: 42,
        }
    }
}

impl OverlapSpec {
    pub fn with_counts(counts: &[(&str, usize)]) -> Self {
        Self {
            shape_counts: counts
                .iter()
                .map(|(id, n)| (id.to_string(), *n))
                .collect(),
            ..Self::default()
        }
    }

    fn total_shapes(&self) -> usize {
        self.shape_counts.values().sum()
    }
}

struct Stamped<'a> {
    shape_id: &'a str,
    offset: (usize, usize),
    mask: &'a BinaryImage,
}

impl Stamped<'_> {
    fn covers(&self, row: usize, col: usize) -> bool {
        let (i, j) = self.offset;
        row >= i
            && col >= j
            && row - i < self.mask.height()
            && col - j < self.mask.width()
            && self.mask.get(row - i, col - j) == 1
    }

    fn overlaps(&self, other: &Stamped) -> bool {
        self.mask.foreground().any(|(r, c)| {
            other.covers(self.offset.0 + r, self.offset.1 + c)
        })
    }

    fn visible_fraction(&self, others: &[Stamped], own_index: usize) -> f64 {
        let mut visible = 0usize;
        let mut total = 0usize;
        for (r, c) in self.mask.foreground() {
            total += 1;
            let (gr, gc) = (self.offset.0 + r, self.offset.1 + c);
            let covered = others
                .iter()
                .enumerate()
                .any(|(k, o)| k != own_index && o.covers(gr, gc));
            if !covered {
                visible += 1;
            }
        }
        visible as f64 / total as f64
    }
}

/// Generates a random image of (possibly overlapping) marker shapes and the
/// exact truth placements that produced it.
///
/// Placements are sampled uniformly in bounds and the whole layout is
/// re-sampled until it has at least `min_overlap_pairs` intersecting pairs,
/// no two same-shape placements within 4 px, and every shape at least 40%
/// visible.
pub fn gen_overlap_image(
    spec: &OverlapSpec,
    templates: &TemplateLibrary,
) -> Result<(BinaryImage, Vec<Placement>), SynthError> {
    let (h, w) = spec.canvas;
    if spec.total_shapes() == 0 {
        return Err(SynthError::BadSpec("no shapes requested".into()));
    }
    let max_pairs = spec.total_shapes() * (spec.total_shapes() - 1) / 2;
    if spec.min_overlap_pairs > max_pairs {
        return Err(SynthError::BadSpec(format!(
            "{} overlap pairs requested but only {} pairs exist",
            spec.min_overlap_pairs, max_pairs
        )));
    }
    for shape_id in spec.shape_counts.keys() {
        let tpl = templates
            .get(shape_id)
            .ok_or_else(|| SynthError::UnknownShape(shape_id.clone()))?;
        if tpl.mask.height() > h || tpl.mask.width() > w {
            return Err(SynthError::BadSpec(format!(
                "template '{shape_id}' does not fit the {h}x{w} canvas"
            )));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    for _ in 0..MAX_ATTEMPTS {
        let mut placements: Vec<Placement> = Vec::with_capacity(spec.total_shapes());
        for (shape_id, &count) in &spec.shape_counts {
            let tpl = templates.get(shape_id).unwrap();
            let (bi, bj) = (h - tpl.mask.height(), w - tpl.mask.width());
            for _ in 0..count {
                placements.push(Placement::new(
                    shape_id.clone(),
                    rng.random_range(0..=bi),
                    rng.random_range(0..=bj),
                ));
            }
        }

        let stamped: Vec<Stamped> = placements
            .iter()
            .map(|p| Stamped {
                shape_id: &p.shape_id,
                offset: p.offset,
                mask: &templates.get(&p.shape_id).unwrap().mask,
            })
            .collect();

        let same_shape_ok = stamped.iter().enumerate().all(|(i, a)| {
            stamped.iter().skip(i + 1).all(|b| {
                a.shape_id != b.shape_id || {
                    let d = ((a.offset.0 as f64 - b.offset.0 as f64).powi(2)
                        + (a.offset.1 as f64 - b.offset.1 as f64).powi(2))
                    .sqrt();
                    d > SAME_SHAPE_MIN_DIST
                }
            })
        });
        if !same_shape_ok {
            continue;
        }

        let overlap_pairs = stamped
            .iter()
            .enumerate()
            .map(|(i, a)| stamped.iter().skip(i + 1).filter(|b| a.overlaps(b)).count())
            .sum::<usize>();
        if overlap_pairs < spec.min_overlap_pairs {
            continue;
        }

        let visible_ok = stamped
            .iter()
            .enumerate()
            .all(|(i, s)| s.visible_fraction(&stamped, i) >= MIN_VISIBLE_FRACTION);
        if !visible_ok {
            continue;
        }

        let image = render(&placements, templates, h, w)?;
        return Ok((image, placements));
    }

    Err(SynthError::InfeasibleSpec {
        attempts: MAX_ATTEMPTS,
        detail: format!(
            "could not satisfy {} overlap pairs with {} shapes on {h}x{w}",
            spec.min_overlap_pairs,
            spec.total_shapes()
        ),
    })
}

/// Specification of one synthetic 2-D plot image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotSpec {
    /// Canvas (height, width) in pixels.
    pub canvas: (usize, usize),
    /// X-axis row and y-axis column.
    pub axes: (usize, usize),
    /// Marker series as (shape id, point count).
    pub series: Vec<(String, usize)>,
    /// Fraction of canvas pixels turned into speckle noise.
    pub noise: f64,
    pub caption: String,
    /// Connect consecutive markers of each series with a polyline.
    pub connect: bool,
    pub seed: u64,
}

impl Default for PlotSpec {
    fn default() -> Self {
        Self {
            canvas: (120, 120),
            axes: (100, 15),
            series: Vec::new(),
            noise: 0.0,
            caption: String::new(),
            connect: false,
            seed: 42,
        }
    }
}

/// Ground truth recorded alongside a generated plot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotTruth {
    pub axis_row: usize,
    pub axis_col: usize,
    pub placements: Vec<Placement>,
    pub caption: String,
}

fn draw_line(img: &mut GrayImage, from: (f64, f64), to: (f64, f64)) {
    let steps = (to.0 - from.0).abs().max((to.1 - from.1).abs()).ceil() as usize;
    for s in 0..=steps.max(1) {
        let t = s as f64 / steps.max(1) as f64;
        let r = (from.0 + t * (to.0 - from.0)).round() as isize;
        let c = (from.1 + t * (to.1 - from.1)).round() as isize;
        if r >= 0 && c >= 0 && (r as usize) < img.height() && (c as usize) < img.width() {
            img.set(r as usize, c as usize, 0);
        }
    }
}

/// Draws a synthetic plot: 1-px axes, template markers inside the plotting
/// region, an optional connecting polyline per series, and speckle noise.
/// Returns the image and the exact ground truth.
pub fn gen_plot_image(
    spec: &PlotSpec,
    templates: &TemplateLibrary,
) -> Result<(GrayImage, PlotTruth), SynthError> {
    let (h, w) = spec.canvas;
    let (axis_row, axis_col) = spec.axes;
    if axis_row >= h || axis_col >= w {
        return Err(SynthError::BadSpec("axes outside the canvas".into()));
    }
    // Plotting region bounds mirror the segmentation guard band.
    let guard = crate::plotseg::AXIS_GUARD_BAND;
    if axis_row < guard + 2 || axis_col + guard + 2 >= w {
        return Err(SynthError::BadSpec("plotting region degenerate".into()));
    }
    let (plot_top, plot_bottom) = (0usize, axis_row - guard - 1);
    let (plot_left, plot_right) = (axis_col + guard + 1, w - 1);

    let mut img = GrayImage::filled(w, h, 255);
    for c in axis_col..w {
        img.set(axis_row, c, 0);
    }
    for r in 0..=axis_row {
        img.set(r, axis_col, 0);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut placements: Vec<Placement> = Vec::new();
    for (shape_id, count) in &spec.series {
        let tpl = templates
            .get(shape_id)
            .ok_or_else(|| SynthError::UnknownShape(shape_id.clone()))?;
        let (th, tw) = (tpl.mask.height(), tpl.mask.width());
        if plot_bottom < plot_top + th - 1 || plot_right < plot_left + tw - 1 {
            return Err(SynthError::BadSpec(format!(
                "template '{shape_id}' does not fit the plotting region"
            )));
        }
        let mut series_points: Vec<Placement> = Vec::new();
        for _ in 0..*count {
            let i = rng.random_range(plot_top..=plot_bottom - th + 1);
            let j = rng.random_range(plot_left..=plot_right - tw + 1);
            series_points.push(Placement::new(shape_id.clone(), i, j));
        }
        if spec.connect && series_points.len() >= 2 {
            // Polylines connect markers left to right, like a line plot.
            let mut ordered = series_points.clone();
            ordered.sort_by_key(|p| p.offset.1);
            let centroid = tpl.centroid();
            for pair in ordered.windows(2) {
                let a = (
                    pair[0].offset.0 as f64 + centroid.0,
                    pair[0].offset.1 as f64 + centroid.1,
                );
                let b = (
                    pair[1].offset.0 as f64 + centroid.0,
                    pair[1].offset.1 as f64 + centroid.1,
                );
                draw_line(&mut img, a, b);
            }
        }
        for p in &series_points {
            for (r, c) in tpl.mask.foreground() {
                img.set(p.offset.0 + r, p.offset.1 + c, 0);
            }
        }
        placements.extend(series_points);
    }

    let speckles = (spec.noise * (h * w) as f64).round() as usize;
    for _ in 0..speckles {
        let r = rng.random_range(0..h);
        let c = rng.random_range(0..w);
        img.set(r, c, 0);
    }

    Ok((
        img,
        PlotTruth {
            axis_row,
            axis_col,
            placements,
            caption: spec.caption.clone(),
        },
    ))
}

/// Kinds of non-plot images for the classifier corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NegativeKind {
    /// Uniform random speckle field.
    Speckle,
    /// Smooth photo-like luminance ramp.
    Gradient,
    /// Paragraph-like rows of word blocks.
    TextBlock,
    /// Markers without coordinate axes.
    Scatter,
    /// Table-like ruled grid.
    Grid,
}

impl NegativeKind {
    pub const ALL: [NegativeKind; 5] = [
        NegativeKind::Speckle,
        NegativeKind::Gradient,
        NegativeKind::TextBlock,
        NegativeKind::Scatter,
        NegativeKind::Grid,
    ];
}

/// Generates one negative (non-plot) image.
pub fn gen_negative_image(
    kind: NegativeKind,
    canvas: (usize, usize),
    seed: u64,
    templates: &TemplateLibrary,
) -> GrayImage {
    let (h, w) = canvas;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut img = GrayImage::filled(w, h, 255);
    match kind {
        NegativeKind::Speckle => {
            let density = rng.random_range(0.02..0.10);
            for r in 0..h {
                for c in 0..w {
                    if rng.random::<f64>() < density {
                        img.set(r, c, 0);
                    }
                }
            }
        }
        NegativeKind::Gradient => {
            let angle: f64 = rng.random_range(0.0..std::f64::consts::PI);
            let (dy, dx) = (angle.sin(), angle.cos());
            let span = (h as f64 * dy.abs() + w as f64 * dx.abs()).max(1.0);
            for r in 0..h {
                for c in 0..w {
                    let proj = (r as f64 * dy + c as f64 * dx).abs() / span;
                    let wobble: f64 = rng.random_range(-8.0..8.0);
                    let v = 40.0 + 180.0 * proj + wobble;
                    img.set(r, c, v.clamp(0.0, 255.0) as u8);
                }
            }
        }
        NegativeKind::TextBlock => {
            let mut row = rng.random_range(4..10);
            while row + 8 < h {
                let mut col = rng.random_range(3..8);
                while col + 8 < w {
                    // One "word": a run of small glyph boxes.
                    let letters = rng.random_range(2..7);
                    for _ in 0..letters {
                        let gw = rng.random_range(2..5);
                        let gh = rng.random_range(4..7);
                        if col + gw + 1 >= w {
                            break;
                        }
                        for r in row..(row + gh).min(h - 1) {
                            for c in col..col + gw {
                                img.set(r, c, 0);
                            }
                        }
                        col += gw + rng.random_range(1..3);
                    }
                    col += rng.random_range(4..8);
                }
                row += rng.random_range(9..13);
            }
        }
        NegativeKind::Scatter => {
            let shapes: Vec<&str> = templates.iter().map(|t| t.shape_id.as_str()).collect();
            let count = rng.random_range(6..15);
            for _ in 0..count {
                let tpl = templates.get(shapes[rng.random_range(0..shapes.len())]).unwrap();
                let (th, tw) = (tpl.mask.height(), tpl.mask.width());
                if th >= h || tw >= w {
                    continue;
                }
                let i = rng.random_range(0..=h - th);
                let j = rng.random_range(0..=w - tw);
                for (r, c) in tpl.mask.foreground() {
                    img.set(i + r, j + c, 0);
                }
            }
        }
        NegativeKind::Grid => {
            let mut r = rng.random_range(5..15);
            while r < h {
                for c in 2..w - 2 {
                    img.set(r, c, 0);
                }
                r += rng.random_range(12..22);
            }
            let mut c = rng.random_range(5..20);
            while c < w {
                for r in 2..h - 2 {
                    img.set(r, c, 0);
                }
                c += rng.random_range(15..28);
            }
        }
    }
    img
}

const PLOT_CAPTIONS_KEYWORDED: &[&str] = &[
    "Plot of the energy distribution for the treated sample",
    "Measured distribution of particle sizes across trials",
    "Scatter plot of yield against temperature over the full range",
    "Slope of the response curve near the transition",
    "Plot of intensity versus wavelength with fitted axes",
    "Distribution of arrival times and their range",
    "Plots of conversion for both catalyst loadings",
];

const PLOT_CAPTIONS_PLAIN: &[&str] = &[
    "Measured values for the second specimen",
    "Comparison of the three methods on the benchmark data",
    "Results for configuration B under load",
    "Dependence of output on input for the reference cell",
];

const NEGATIVE_CAPTIONS_PLAIN: &[&str] = &[
    "Photograph of the experimental apparatus",
    "Electron micrograph of the etched surface",
    "Block diagram of the processing pipeline",
    "Reaction scheme for the synthesis route",
    "Summary of measured constants for all runs",
    "Map of the sampling sites in the study area",
];

const NEGATIVE_CAPTIONS_KEYWORDED: &[&str] = &[
    "Range of habitats photographed during the field survey",
    "Floor plan of the laboratory with the instrument axes marked",
];

/// One labeled corpus item: structured features plus a +-1 label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusItem {
    pub features: FeatureVector,
    pub label: i8,
}

/// Builds a labeled synthetic classifier corpus of `n_plots` positives and
/// `n_negatives` negatives with captions. Deterministic in `base_seed`; items
/// are generated in parallel from per-index derived seeds.
pub fn gen_classifier_corpus(
    n_plots: usize,
    n_negatives: usize,
    base_seed: u64,
    templates: &TemplateLibrary,
    params: &FeatureParams,
) -> Result<Vec<CorpusItem>, SynthError> {
    use rayon::prelude::*;

    let positives: Vec<CorpusItem> = (0..n_plots)
        .into_par_iter()
        .map(|idx| {
            let seed = derive_seed(base_seed, idx as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let h = rng.random_range(100..140);
            let w = rng.random_range(100..140);
            let axis_row = rng.random_range((h * 72 / 100)..(h * 9 / 10));
            let axis_col = rng.random_range((w * 8 / 100)..(w / 5));
            let shapes: Vec<String> =
                templates.iter().map(|t| t.shape_id.clone()).collect();
            let n_series = rng.random_range(1..=3);
            let series: Vec<(String, usize)> = (0..n_series)
                .map(|_| {
                    (
                        shapes[rng.random_range(0..shapes.len())].clone(),
                        rng.random_range(4..=10),
                    )
                })
                .collect();
            let caption = if rng.random::<f64>() < 0.7 {
                PLOT_CAPTIONS_KEYWORDED[rng.random_range(0..PLOT_CAPTIONS_KEYWORDED.len())]
            } else {
                PLOT_CAPTIONS_PLAIN[rng.random_range(0..PLOT_CAPTIONS_PLAIN.len())]
            };
            let spec = PlotSpec {
                canvas: (h, w),
                axes: (axis_row, axis_col),
                series,
                noise: rng.random_range(0.0..0.01),
                caption: caption.to_string(),
                connect: rng.random::<f64>() < 0.3,
                seed: derive_seed(seed, 1),
            };
            let (img, truth) = gen_plot_image(&spec, templates)?;
            let caption = (rng.random::<f64>() >= 0.15).then_some(truth.caption.as_str());
            let features = compute_features(&img, caption, params)?;
            Ok(CorpusItem { features, label: 1 })
        })
        .collect::<Result<_, SynthError>>()?;

    let negatives: Vec<CorpusItem> = (0..n_negatives)
        .into_par_iter()
        .map(|idx| {
            let seed = derive_seed(base_seed, (n_plots + idx) as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            // Mix of negative kinds weighted toward texture-style images.
            let kind = match idx % 20 {
                0..=4 => NegativeKind::Speckle,
                5..=9 => NegativeKind::Gradient,
                10..=13 => NegativeKind::TextBlock,
                14..=16 => NegativeKind::Scatter,
                _ => NegativeKind::Grid,
            };
            let h = rng.random_range(100..140);
            let w = rng.random_range(100..140);
            let img = gen_negative_image(kind, (h, w), derive_seed(seed, 1), templates);
            let caption = if rng.random::<f64>() < 0.12 {
                NEGATIVE_CAPTIONS_KEYWORDED
                    [rng.random_range(0..NEGATIVE_CAPTIONS_KEYWORDED.len())]
            } else {
                NEGATIVE_CAPTIONS_PLAIN[rng.random_range(0..NEGATIVE_CAPTIONS_PLAIN.len())]
            };
            let caption = (rng.random::<f64>() >= 0.15).then_some(caption);
            let features = compute_features(&img, caption, params)?;
            Ok(CorpusItem {
                features,
                label: -1,
            })
        })
        .collect::<Result<_, SynthError>>()?;

    let mut corpus = positives;
    corpus.extend(negatives);
    Ok(corpus)
}
