//! Plain (P2) and raw (P5) PGM parsing and writing.
//!
//! Reads maxval up to 65535; samples are rescaled to [0, 255] with rounding.
//! Writing always emits maxval 255, so a write/read round trip is bit-exact.

use std::io::Write;
use std::path::Path;

use super::{GrayImage, RasterError};

fn corrupt(path: &Path, detail: impl Into<String>) -> RasterError {
    RasterError::CorruptHeader {
        path: path.to_path_buf(),
        detail: detail.into(),
    }
}

/// Token scanner over PGM header bytes: whitespace-separated fields with
/// `#`-to-end-of-line comments.
struct Tokens<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Tokens<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, pos: 0 }
    }

    fn skip_filler(&mut self) {
        while self.pos < self.bytes.len() {
            let b = self.bytes[self.pos];
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
    }

    fn next_token(&mut self) -> Option<&'a [u8]> {
        self.skip_filler();
        let start = self.pos;
        while self.pos < self.bytes.len()
            && !self.bytes[self.pos].is_ascii_whitespace()
            && self.bytes[self.pos] != b'#'
        {
            self.pos += 1;
        }
        (self.pos > start).then(|| &self.bytes[start..self.pos])
    }

    fn next_usize(&mut self, path: &Path, what: &str) -> Result<usize, RasterError> {
        let tok = self
            .next_token()
            .ok_or_else(|| corrupt(path, format!("missing {what}")))?;
        std::str::from_utf8(tok)
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| corrupt(path, format!("invalid {what}")))
    }
}

/// Parses PGM bytes (P2 or P5). `path` is used only for error messages.
pub fn read_pgm_bytes(bytes: &[u8], path: &Path) -> Result<GrayImage, RasterError> {
    let magic = bytes.get(..2).ok_or_else(|| corrupt(path, "truncated file"))?;
    let binary = match magic {
        b"P2" => false,
        b"P5" => true,
        _ => {
            return Err(RasterError::UnsupportedFormat {
                path: path.to_path_buf(),
                detail: "not a P2/P5 PGM".into(),
            })
        }
    };

    let mut toks = Tokens::new(bytes);
    toks.pos = 2;
    let width = toks.next_usize(path, "width")?;
    let height = toks.next_usize(path, "height")?;
    let maxval = toks.next_usize(path, "maxval")?;
    if width == 0 || height == 0 {
        return Err(corrupt(path, "zero dimension"));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(corrupt(path, format!("maxval {maxval} out of range 1..=65535")));
    }

    let n = width * height;
    let rescale = |v: usize| ((v * 255 + maxval / 2) / maxval) as u8;
    let mut data = Vec::with_capacity(n);

    if binary {
        // Exactly one whitespace byte separates the header from raster data.
        let start = toks.pos + 1;
        if toks.pos >= bytes.len() || !bytes[toks.pos].is_ascii_whitespace() {
            return Err(corrupt(path, "missing separator before raster data"));
        }
        let bytes_per = if maxval < 256 { 1 } else { 2 };
        let raster = &bytes[start.min(bytes.len())..];
        if raster.len() < n * bytes_per {
            return Err(corrupt(
                path,
                format!("raster data truncated: need {} bytes, have {}", n * bytes_per, raster.len()),
            ));
        }
        for i in 0..n {
            let v = if bytes_per == 1 {
                raster[i] as usize
            } else {
                ((raster[2 * i] as usize) << 8) | raster[2 * i + 1] as usize
            };
            if v > maxval {
                return Err(corrupt(path, format!("sample {v} exceeds maxval {maxval}")));
            }
            data.push(rescale(v));
        }
    } else {
        for _ in 0..n {
            let v = toks.next_usize(path, "sample")?;
            if v > maxval {
                return Err(corrupt(path, format!("sample {v} exceeds maxval {maxval}")));
            }
            data.push(rescale(v));
        }
    }

    GrayImage::new(width, height, data)
}

pub fn write_pgm(img: &GrayImage, path: &Path) -> Result<(), RasterError> {
    let mut buf = Vec::with_capacity(img.data().len() + 32);
    // Header write into a Vec cannot fail.
    write!(buf, "P5\n{} {}\n255\n", img.width(), img.height()).unwrap();
    buf.extend_from_slice(img.data());
    std::fs::write(path, buf).map_err(|source| RasterError::UnwritableFile {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_pgm_ascii(img: &GrayImage, path: &Path) -> Result<(), RasterError> {
    let mut buf = String::new();
    buf.push_str(&format!("P2\n{} {}\n255\n", img.width(), img.height()));
    for row in 0..img.height() {
        let line: Vec<String> = (0..img.width())
            .map(|col| img.get(row, col).to_string())
            .collect();
        buf.push_str(&line.join(" "));
        buf.push('\n');
    }
    std::fs::write(path, buf).map_err(|source| RasterError::UnwritableFile {
        path: path.to_path_buf(),
        source,
    })
}
