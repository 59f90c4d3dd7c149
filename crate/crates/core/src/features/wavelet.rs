//! Image-segment features: pooled histograms of one-level 2-D Haar detail
//! coefficients over non-overlapping blocks.

use crate::raster::GrayImage;

use super::FeatureError;

/// Histogram bins per detail subband.
pub const SUBBAND_BINS: usize = 16;

/// Total IS dimension: LH, HL, HH subbands x 16 bins.
pub const IS_DIM: usize = 3 * SUBBAND_BINS;

const COEFF_MIN: f64 = -255.0;
const COEFF_MAX: f64 = 255.0;

#[inline]
fn bin_of(v: f64) -> usize {
    let width = (COEFF_MAX - COEFF_MIN) / SUBBAND_BINS as f64;
    let idx = ((v - COEFF_MIN) / width).floor() as isize;
    idx.clamp(0, SUBBAND_BINS as isize - 1) as usize
}

/// Splits the image into `block_size` x `block_size` blocks (edges replicated
/// to a multiple of the block size), applies a one-level 2-D Haar transform
/// per block, and pools the LH/HL/HH detail coefficients of all blocks into
/// three 16-bin histograms over [-255, 255], each normalized to sum 1.
///
/// Output layout: `[LH bins | HL bins | HH bins]`, 48 values.
pub fn block_wavelet_features(
    img: &GrayImage,
    block_size: usize,
) -> Result<Vec<f64>, FeatureError> {
    if block_size < 2 || !block_size.is_multiple_of(2) {
        return Err(FeatureError::InvalidBlockSize(block_size));
    }
    if block_size > img.width() || block_size > img.height() {
        return Err(FeatureError::BlockTooLarge {
            block: block_size,
            width: img.width(),
            height: img.height(),
        });
    }

    let blocks_x = img.width().div_ceil(block_size);
    let blocks_y = img.height().div_ceil(block_size);
    // Replication padding: reads past the edge clamp to the last row/column.
    let sample = |r: usize, c: usize| -> f64 {
        img.get(r.min(img.height() - 1), c.min(img.width() - 1)) as f64
    };

    let mut hist = [[0u64; SUBBAND_BINS]; 3];
    for by in 0..blocks_y {
        for bx in 0..blocks_x {
            let (r0, c0) = (by * block_size, bx * block_size);
            for cr in (0..block_size).step_by(2) {
                for cc in (0..block_size).step_by(2) {
                    let a = sample(r0 + cr, c0 + cc);
                    let b = sample(r0 + cr, c0 + cc + 1);
                    let c = sample(r0 + cr + 1, c0 + cc);
                    let d = sample(r0 + cr + 1, c0 + cc + 1);
                    // Orthonormal 2-D Haar on a 2x2 cell: each detail
                    // coefficient is a signed sum scaled by 1/2.
                    let lh = (a + b - c - d) / 2.0;
                    let hl = (a - b + c - d) / 2.0;
                    let hh = (a - b - c + d) / 2.0;
                    hist[0][bin_of(lh)] += 1;
                    hist[1][bin_of(hl)] += 1;
                    hist[2][bin_of(hh)] += 1;
                }
            }
        }
    }

    let cells = (blocks_x * blocks_y * (block_size / 2) * (block_size / 2)) as f64;
    let mut out = Vec::with_capacity(IS_DIM);
    for subband in &hist {
        out.extend(subband.iter().map(|&n| n as f64 / cells));
    }
    Ok(out)
}
