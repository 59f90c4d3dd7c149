use super::*;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Independent Otsu oracle: recomputes the inter-class variance from scratch
/// for every candidate threshold and scans for the argmax.
fn otsu_oracle(img: &GrayImage) -> Option<u8> {
    let pixels = img.data();
    let (lo, hi) = (
        *pixels.iter().min().unwrap(),
        *pixels.iter().max().unwrap(),
    );
    if lo == hi {
        return None;
    }
    let mut best_var = f64::NEG_INFINITY;
    let mut best_t = None;
    for t in 0..=255u16 {
        let below: Vec<f64> = pixels.iter().filter(|&&p| (p as u16) < t).map(|&p| p as f64).collect();
        let above: Vec<f64> = pixels.iter().filter(|&&p| (p as u16) >= t).map(|&p| p as f64).collect();
        if below.is_empty() || above.is_empty() {
            continue;
        }
        let w0 = below.len() as f64;
        let w1 = above.len() as f64;
        let m0 = below.iter().sum::<f64>() / w0;
        let m1 = above.iter().sum::<f64>() / w1;
        let var = w0 * w1 * (m0 - m1) * (m0 - m1);
        if var > best_var {
            best_var = var;
            best_t = Some(t as u8);
        }
    }
    best_t
}

fn write_temp(bytes: &[u8]) -> tempfile::NamedTempFile {
    use std::io::Write;
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(bytes).unwrap();
    f.flush().unwrap();
    f
}

#[test]
fn p2_identity_read() {
    let f = write_temp(b"P2\n2 2\n255\n0 85\n170 255\n");
    let img = load_image(f.path()).unwrap();
    assert_eq!((img.width(), img.height()), (2, 2));
    assert_eq!(img.data(), &[0, 85, 170, 255]);
}

#[test]
fn p2_with_comments() {
    let f = write_temp(b"P2\n# a comment\n2 1 # trailing\n255\n7 250\n");
    let img = load_image(f.path()).unwrap();
    assert_eq!(img.data(), &[7, 250]);
}

#[test]
fn sixteen_bit_rescaled() {
    let f = write_temp(b"P2\n2 1\n65535\n65535 0\n");
    let img = load_image(f.path()).unwrap();
    assert_eq!(img.data(), &[255, 0]);
}

#[test]
fn luminance_values() {
    assert_eq!(luminance(255, 255, 255), 255);
    assert_eq!(luminance(0, 0, 0), 0);
    // round(0.299 * 255) = 76, hand-computed
    assert_eq!(luminance(255, 0, 0), 76);
}

#[test]
fn png_rgb_roundtrip_via_image_crate() {
    let mut img = image::RgbImage::new(2, 1);
    img.put_pixel(0, 0, image::Rgb([255, 255, 255]));
    img.put_pixel(1, 0, image::Rgb([255, 0, 0]));
    let f = tempfile::Builder::new().suffix(".png").tempfile().unwrap();
    img.save_with_format(f.path(), image::ImageFormat::Png).unwrap();
    let loaded = load_image(f.path()).unwrap();
    assert_eq!(loaded.data(), &[255, 76]);
}

#[test]
fn load_errors_name_the_path() {
    let err = load_image("/no/such/file.pgm").unwrap_err();
    assert!(matches!(err, RasterError::UnreadableFile { .. }));
    assert!(err.to_string().contains("/no/such/file.pgm"));

    let f = write_temp(b"BM not an image");
    assert!(matches!(
        load_image(f.path()).unwrap_err(),
        RasterError::UnsupportedFormat { .. }
    ));

    let f = write_temp(b"P5\n4 4\n255\n\x00\x01");
    assert!(matches!(
        load_image(f.path()).unwrap_err(),
        RasterError::CorruptHeader { .. }
    ));
}

#[test]
fn binarize_explicit_threshold() {
    let black = GrayImage::filled(3, 2, 0);
    assert_eq!(binarize(&black, Some(128)).foreground_count(), 6);
    let white = GrayImage::filled(3, 2, 255);
    assert_eq!(binarize(&white, Some(128)).foreground_count(), 0);
}

#[test]
fn otsu_bimodal_matches_exhaustive_oracle() {
    // 100 pixels at 10, 100 pixels at 240.
    let mut data = vec![10u8; 100];
    data.extend(vec![240u8; 100]);
    let img = GrayImage::new(20, 10, data).unwrap();
    let t = otsu_threshold(&img).unwrap();
    assert!(t > 10 && t < 240, "threshold {t} not strictly between modes");
    assert_eq!(Some(t), otsu_oracle(&img));
    // Ties across the gap resolve to the smallest candidate.
    assert_eq!(t, 11);
}

#[test]
fn otsu_random_images_match_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let data: Vec<u8> = (0..64).map(|_| rng.random()).collect();
        let img = GrayImage::new(8, 8, data).unwrap();
        assert_eq!(otsu_threshold(&img), otsu_oracle(&img));
    }
}

#[test]
fn uniform_image_auto_threshold_is_all_background() {
    let img = GrayImage::filled(4, 4, 77);
    assert_eq!(binarize(&img, None).foreground_count(), 0);
}

#[test]
fn pgm_roundtrip_bit_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let data: Vec<u8> = (0..35).map(|_| rng.random()).collect();
    let img = GrayImage::new(7, 5, data).unwrap();

    let f = tempfile::NamedTempFile::new().unwrap();
    img.save_pgm(f.path()).unwrap();
    assert_eq!(load_image(f.path()).unwrap(), img);

    img.save_pgm_ascii(f.path()).unwrap();
    assert_eq!(load_image(f.path()).unwrap(), img);
}

#[test]
fn crop_extracts_inclusive_box() {
    let mut img = BinaryImage::zeros(5, 4);
    img.set(1, 2, 1);
    let bbox = crate::plotseg::BBox {
        top: 1,
        left: 2,
        bottom: 2,
        right: 3,
    };
    let crop = img.crop(&bbox);
    assert_eq!((crop.width(), crop.height()), (2, 2));
    assert_eq!(crop.get(0, 0), 1);
    assert_eq!(crop.foreground_count(), 1);
}

proptest! {
    /// Raising the threshold never removes foreground: {p < T1} ⊆ {p < T2}
    /// whenever T1 <= T2.
    #[test]
    fn binarize_monotone_in_threshold(
        data in proptest::collection::vec(any::<u8>(), 16),
        t1 in 0u8..=255,
        t2 in 0u8..=255,
    ) {
        let (t1, t2) = (t1.min(t2), t1.max(t2));
        let img = GrayImage::new(4, 4, data).unwrap();
        let low = binarize(&img, Some(t1));
        let high = binarize(&img, Some(t2));
        for (a, b) in low.data().iter().zip(high.data()) {
            prop_assert!(a <= b);
        }
    }

    #[test]
    fn pgm_roundtrip_random(data in proptest::collection::vec(any::<u8>(), 12)) {
        let img = GrayImage::new(3, 4, data).unwrap();
        let f = tempfile::NamedTempFile::new().unwrap();
        img.save_pgm(f.path()).unwrap();
        prop_assert_eq!(load_image(f.path()).unwrap(), img);
    }
}
