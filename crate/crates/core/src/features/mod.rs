//! Classifier features: image-segment wavelet statistics (IS), coordinate-axes
//! line features (CA) and caption-text keyword booleans (CT).
//!
//! The three families concatenate into a fixed-layout [`FeatureVector`]
//! `[IS(48) | CA(3) | CT(lexicon size)]`. Families can be left out for
//! ablation runs; absent families stay zero-filled and the mask records which
//! families carry real data.

mod caption;
mod hough;
mod wavelet;

pub use caption::{caption_features, default_lexicon, load_lexicon};
pub use hough::{hough_lines, HoughParams, LineSegment};
pub use wavelet::{block_wavelet_features, IS_DIM, SUBBAND_BINS};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::raster::{binarize, GrayImage};

/// Number of coordinate-axes features: two line strengths and one mutual angle.
pub const CA_DIM: usize = 3;

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("block size {0} must be an even number >= 2")]
    InvalidBlockSize(usize),
    #[error("block size {block} exceeds image dimensions {width}x{height}")]
    BlockTooLarge {
        block: usize,
        width: usize,
        height: usize,
    },
    #[error("at least one feature family must be present")]
    EmptyFeatureSet,
    #[error("{family} feature slice has {got} values, expected {expected}")]
    FamilyDimension {
        family: &'static str,
        expected: usize,
        got: usize,
    },
}

/// Which feature families carry real (non-zero-filled) data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilySet {
    pub is: bool,
    pub ca: bool,
    pub ct: bool,
}

impl FamilySet {
    pub const ALL: FamilySet = FamilySet {
        is: true,
        ca: true,
        ct: true,
    };
    pub const IS_ONLY: FamilySet = FamilySet {
        is: true,
        ca: false,
        ct: false,
    };
    pub const CA_ONLY: FamilySet = FamilySet {
        is: false,
        ca: true,
        ct: false,
    };
    pub const CT_ONLY: FamilySet = FamilySet {
        is: false,
        ca: false,
        ct: true,
    };

    pub fn is_empty(&self) -> bool {
        !(self.is || self.ca || self.ct)
    }

    fn intersect(&self, other: &FamilySet) -> FamilySet {
        FamilySet {
            is: self.is && other.is,
            ca: self.ca && other.ca,
            ct: self.ct && other.ct,
        }
    }
}

impl std::fmt::Display for FamilySet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let names: Vec<&str> = [(self.is, "IS"), (self.ca, "CA"), (self.ct, "CT")]
            .iter()
            .filter(|(on, _)| *on)
            .map(|(_, n)| *n)
            .collect();
        if names.is_empty() {
            write!(f, "none")
        } else {
            write!(f, "{}", names.join("+"))
        }
    }
}

/// Concatenated classifier input with per-family slices and presence mask.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub is_features: Vec<f64>,
    pub ca_features: Vec<f64>,
    pub ct_features: Vec<bool>,
    pub mask: FamilySet,
}

impl FeatureVector {
    pub fn dim(&self) -> usize {
        IS_DIM + CA_DIM + self.ct_features.len()
    }

    /// Fixed-layout dense form `[IS | CA | CT]`; booleans map to 0/1.
    pub fn dense(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.dim());
        out.extend_from_slice(&self.is_features);
        out.extend_from_slice(&self.ca_features);
        out.extend(self.ct_features.iter().map(|&b| f64::from(b)));
        out
    }

    /// Zeroes every family outside `keep`; used for ablation runs.
    pub fn masked(&self, keep: FamilySet) -> FeatureVector {
        FeatureVector {
            is_features: if keep.is {
                self.is_features.clone()
            } else {
                vec![0.0; IS_DIM]
            },
            ca_features: if keep.ca {
                self.ca_features.clone()
            } else {
                vec![0.0; CA_DIM]
            },
            ct_features: if keep.ct {
                self.ct_features.clone()
            } else {
                vec![false; self.ct_features.len()]
            },
            mask: self.mask.intersect(&keep),
        }
    }
}

/// Assembles per-family slices into the fixed layout, zero-filling absent
/// families. `ct_dim` fixes the CT width (the lexicon size) when CT is absent.
pub fn assemble_feature_vector(
    is: Option<Vec<f64>>,
    ca: Option<Vec<f64>>,
    ct: Option<Vec<bool>>,
    ct_dim: usize,
) -> Result<FeatureVector, FeatureError> {
    if is.is_none() && ca.is_none() && ct.is_none() {
        return Err(FeatureError::EmptyFeatureSet);
    }
    if let Some(v) = &is {
        if v.len() != IS_DIM {
            return Err(FeatureError::FamilyDimension {
                family: "IS",
                expected: IS_DIM,
                got: v.len(),
            });
        }
    }
    if let Some(v) = &ca {
        if v.len() != CA_DIM {
            return Err(FeatureError::FamilyDimension {
                family: "CA",
                expected: CA_DIM,
                got: v.len(),
            });
        }
    }
    if let Some(v) = &ct {
        if v.len() != ct_dim {
            return Err(FeatureError::FamilyDimension {
                family: "CT",
                expected: ct_dim,
                got: v.len(),
            });
        }
    }
    let mask = FamilySet {
        is: is.is_some(),
        ca: ca.is_some(),
        ct: ct.is_some(),
    };
    Ok(FeatureVector {
        is_features: is.unwrap_or_else(|| vec![0.0; IS_DIM]),
        ca_features: ca.unwrap_or_else(|| vec![0.0; CA_DIM]),
        ct_features: ct.unwrap_or_else(|| vec![false; ct_dim]),
        mask,
    })
}

/// Coordinate-axes features from detected lines (strongest first):
/// `[v1/diag, v2/diag, mutual_angle/90]`. Missing lines contribute zeros.
pub fn axes_features(lines: &[LineSegment], img_diag: f64) -> Vec<f64> {
    debug_assert!(img_diag > 0.0);
    let v1 = lines.first().map_or(0.0, |l| l.votes as f64 / img_diag);
    let v2 = lines.get(1).map_or(0.0, |l| l.votes as f64 / img_diag);
    let mutual = match (lines.first(), lines.get(1)) {
        (Some(a), Some(b)) => {
            let d = (a.orientation_deg - b.orientation_deg).abs();
            d.min(180.0 - d) / 90.0
        }
        _ => 0.0,
    };
    vec![v1, v2, mutual]
}

/// Tunable feature-extraction parameters shared by the classifier CLI and the
/// synthetic corpus builder.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct FeatureParams {
    pub block_size: usize,
    pub hough: HoughParams,
    pub lexicon: Vec<String>,
}

impl Default for FeatureParams {
    fn default() -> Self {
        Self {
            block_size: 8,
            hough: HoughParams::default(),
            lexicon: default_lexicon(),
        }
    }
}

/// Computes the full feature vector for one image. IS and CA always populate;
/// CT populates only when a caption is supplied (ablation-masking rule for
/// missing captions).
pub fn compute_features(
    img: &GrayImage,
    caption: Option<&str>,
    params: &FeatureParams,
) -> Result<FeatureVector, FeatureError> {
    let is = block_wavelet_features(img, params.block_size)?;
    let binary = binarize(img, None);
    let lines = hough_lines(&binary, &params.hough);
    let ca = axes_features(&lines, binary.diagonal());
    let ct = caption.map(|c| caption_features(c, &params.lexicon));
    assemble_feature_vector(Some(is), Some(ca), ct, params.lexicon.len())
}
