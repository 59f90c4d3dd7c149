//! Identification and data extraction for 2-D plot images.
//!
//! The pipeline classifies a raster figure as a 2-D plot or not, segments a
//! plot into axis and plotting regions, isolates marker components, and
//! resolves overlapping markers into individual data points with a
//! simulated-annealing matcher.
//!
//! Module map:
//!
//! - [`raster`] — PGM/PNG loading, grayscale containers, binarization.
//! - [`features`] — wavelet, coordinate-axes and caption features.
//! - [`svm`] — linear soft-margin classifier: train, predict, cross-validate,
//!   persist.
//! - [`plotseg`] — axes detection, region segmentation, connected components,
//!   text grouping, line removal, template matching.
//! - [`anneal`] — disambiguation of overlapping markers by simulated
//!   annealing over candidate shape placements.
//! - [`synth`] — seeded ground-truth generators and evaluation harnesses.
//! - [`extract`] — end-to-end extraction into a JSON-serializable result.

pub mod anneal;
pub mod extract;
pub mod features;
pub mod jsonfmt;
pub mod plotseg;
pub mod raster;
pub mod svm;
pub mod synth;

mod seed;
pub use seed::derive_seed;
