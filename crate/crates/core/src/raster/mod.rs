//! Raster substrate: grayscale and binary image containers, file I/O and
//! binarization.
//!
//! Everything downstream consumes these two containers. Pixels are addressed
//! as `(row, col)` with row 0 at the top; data is row-major. Binarization
//! follows the dark-ink convention: foreground (1) is everything darker than
//! the threshold.

mod pgm;

pub use pgm::{read_pgm_bytes, write_pgm, write_pgm_ascii};

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors raised by image loading, construction and binarization.
#[derive(Debug, Error)]
pub enum RasterError {
    #[error("cannot read {path}: {source}")]
    UnreadableFile {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("unsupported image format for {path}: {detail}")]
    UnsupportedFormat { path: PathBuf, detail: String },
    #[error("corrupt header in {path}: {detail}")]
    CorruptHeader { path: PathBuf, detail: String },
    #[error("image dimensions must be at least 1x1")]
    EmptyImage,
    #[error("data length {got} does not match {width}x{height}")]
    BadDataLength {
        got: usize,
        width: usize,
        height: usize,
    },
    #[error("binary image values must be 0 or 1")]
    NotBinary,
    #[error("cannot write {path}: {source}")]
    UnwritableFile {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Row-major 8-bit grayscale image.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrayImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self, RasterError> {
        if width == 0 || height == 0 {
            return Err(RasterError::EmptyImage);
        }
        if data.len() != width * height {
            return Err(RasterError::BadDataLength {
                got: data.len(),
                width,
                height,
            });
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// Image of constant luminance.
    pub fn filled(width: usize, height: usize, value: u8) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be >= 1");
        Self {
            width,
            height,
            data: vec![value; width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u8 {
        debug_assert!(row < self.height && col < self.width);
        self.data[row * self.width + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: u8) {
        debug_assert!(row < self.height && col < self.width);
        self.data[row * self.width + col] = value;
    }

    /// Length of the image diagonal in pixels.
    pub fn diagonal(&self) -> f64 {
        (((self.width - 1) * (self.width - 1) + (self.height - 1) * (self.height - 1)) as f64)
            .sqrt()
    }

    /// Flips polarity (`v -> 255 - v`), for light-ink-on-dark inputs.
    pub fn inverted(&self) -> GrayImage {
        GrayImage {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| 255 - v).collect(),
        }
    }

    /// Writes the image as binary PGM (P5), maxval 255.
    pub fn save_pgm(&self, path: impl AsRef<Path>) -> Result<(), RasterError> {
        write_pgm(self, path.as_ref())
    }

    /// Writes the image as ASCII PGM (P2), maxval 255.
    pub fn save_pgm_ascii(&self, path: impl AsRef<Path>) -> Result<(), RasterError> {
        write_pgm_ascii(self, path.as_ref())
    }
}

/// Row-major binary image; 1 is foreground (ink), 0 is background.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinaryImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl BinaryImage {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self, RasterError> {
        if width == 0 || height == 0 {
            return Err(RasterError::EmptyImage);
        }
        if data.len() != width * height {
            return Err(RasterError::BadDataLength {
                got: data.len(),
                width,
                height,
            });
        }
        if data.iter().any(|&v| v > 1) {
            return Err(RasterError::NotBinary);
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// All-background image.
    pub fn zeros(width: usize, height: usize) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be >= 1");
        Self {
            width,
            height,
            data: vec![0; width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u8 {
        debug_assert!(row < self.height && col < self.width);
        self.data[row * self.width + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: u8) {
        debug_assert!(row < self.height && col < self.width);
        debug_assert!(value <= 1);
        self.data[row * self.width + col] = value;
    }

    pub fn foreground_count(&self) -> usize {
        self.data.iter().filter(|&&v| v == 1).count()
    }

    /// Iterates `(row, col)` coordinates of foreground pixels.
    pub fn foreground(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let w = self.width;
        self.data
            .iter()
            .enumerate()
            .filter(|(_, &v)| v == 1)
            .map(move |(i, _)| (i / w, i % w))
    }

    pub fn diagonal(&self) -> f64 {
        (((self.width - 1) * (self.width - 1) + (self.height - 1) * (self.height - 1)) as f64)
            .sqrt()
    }

    /// Crops the sub-image covered by `bbox` (inclusive bounds).
    pub fn crop(&self, bbox: &crate::plotseg::BBox) -> BinaryImage {
        assert!(bbox.bottom < self.height && bbox.right < self.width);
        let mut data = Vec::with_capacity(bbox.width() * bbox.height());
        for r in bbox.top..=bbox.bottom {
            let start = r * self.width + bbox.left;
            data.extend_from_slice(&self.data[start..start + bbox.width()]);
        }
        BinaryImage {
            width: bbox.width(),
            height: bbox.height(),
            data,
        }
    }

    /// Renders ink as 0 and background as 255.
    pub fn to_gray(&self) -> GrayImage {
        GrayImage {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| if v == 1 { 0 } else { 255 }).collect(),
        }
    }
}

/// BT.601 luminance, rounded to the nearest integer.
pub fn luminance(r: u8, g: u8, b: u8) -> u8 {
    (0.299 * r as f64 + 0.587 * g as f64 + 0.114 * b as f64).round() as u8
}

/// Loads a PGM (P2/P5) or PNG (8-bit gray / RGB, 16-bit rescaled) image as
/// grayscale. The format is sniffed from the file's magic bytes, not its
/// extension.
pub fn load_image(path: impl AsRef<Path>) -> Result<GrayImage, RasterError> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|source| RasterError::UnreadableFile {
        path: path.to_path_buf(),
        source,
    })?;
    if bytes.starts_with(b"P2") || bytes.starts_with(b"P5") {
        return read_pgm_bytes(&bytes, path);
    }
    if bytes.starts_with(&[0x89, b'P', b'N', b'G']) {
        return load_png_bytes(&bytes, path);
    }
    Err(RasterError::UnsupportedFormat {
        path: path.to_path_buf(),
        detail: "expected PGM (P2/P5) or PNG magic bytes".into(),
    })
}

fn load_png_bytes(bytes: &[u8], path: &Path) -> Result<GrayImage, RasterError> {
    use image::DynamicImage;

    let decoded = image::load_from_memory_with_format(bytes, image::ImageFormat::Png).map_err(
        |e| RasterError::CorruptHeader {
            path: path.to_path_buf(),
            detail: e.to_string(),
        },
    )?;
    let (w, h) = (decoded.width() as usize, decoded.height() as usize);
    let rescale16 = |v: u16| ((v as u32 * 255 + 32767) / 65535) as u8;
    let data: Vec<u8> = match decoded {
        DynamicImage::ImageLuma8(img) => img.into_raw(),
        DynamicImage::ImageLuma16(img) => img.into_raw().into_iter().map(rescale16).collect(),
        DynamicImage::ImageRgb8(img) => img
            .pixels()
            .map(|p| luminance(p.0[0], p.0[1], p.0[2]))
            .collect(),
        DynamicImage::ImageRgb16(img) => img
            .pixels()
            .map(|p| luminance(rescale16(p.0[0]), rescale16(p.0[1]), rescale16(p.0[2])))
            .collect(),
        other => {
            return Err(RasterError::UnsupportedFormat {
                path: path.to_path_buf(),
                detail: format!("PNG color type {:?} (only 8/16-bit gray and RGB)", other.color()),
            })
        }
    };
    GrayImage::new(w, h, data)
}

/// Binarizes a grayscale image: a pixel becomes foreground (1) when its
/// luminance is strictly below the threshold.
///
/// With `threshold = None` the threshold is chosen by Otsu's inter-class
/// variance maximization. A uniform image has no usable histogram split and
/// yields an all-background result.
pub fn binarize(img: &GrayImage, threshold: Option<u8>) -> BinaryImage {
    let t = match threshold.or_else(|| otsu_threshold(img)) {
        Some(t) => t,
        None => return BinaryImage::zeros(img.width(), img.height()),
    };
    let data = img.data().iter().map(|&v| u8::from(v < t)).collect();
    BinaryImage {
        width: img.width(),
        height: img.height(),
        data,
    }
}

/// Otsu threshold: the argmax over all 256 candidate thresholds of the
/// inter-class variance between `{p < T}` and `{p >= T}`; ties resolve to the
/// smallest T. Returns `None` for uniform images.
pub fn otsu_threshold(img: &GrayImage) -> Option<u8> {
    let mut hist = [0u64; 256];
    for &v in img.data() {
        hist[v as usize] += 1;
    }
    let total = img.data().len() as f64;
    let sum_total: f64 = hist
        .iter()
        .enumerate()
        .map(|(v, &n)| v as f64 * n as f64)
        .sum();
    if hist.iter().filter(|&&n| n > 0).count() < 2 {
        return None;
    }

    let mut best = (0.0f64, None::<u8>);
    let mut count_below = 0u64;
    let mut sum_below = 0.0f64;
    // Classes at threshold T: below = {p < T}, above = {p >= T}.
    for t in 0..=255u16 {
        if t > 0 {
            count_below += hist[(t - 1) as usize];
            sum_below += (t - 1) as f64 * hist[(t - 1) as usize] as f64;
        }
        let w0 = count_below as f64;
        let w1 = total - w0;
        if w0 == 0.0 || w1 == 0.0 {
            continue;
        }
        let m0 = sum_below / w0;
        let m1 = (sum_total - sum_below) / w1;
        let var_between = w0 * w1 * (m0 - m1) * (m0 - m1);
        if var_between > best.0 {
            best = (var_between, Some(t as u8));
        }
    }
    best.1
}

#[cfg(test)]
mod tests;
