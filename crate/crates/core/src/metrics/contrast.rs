//! RMS contrast in two forms: the raised-cosine weighted, luminance
//! normalized patch contrast, and the plain intensity standard deviation.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::imagecore::{reflect101, to_grayscale, FloatPlane, RasterImage};

/// `(2p+1) x (2p+1)` weights `0.5 (cos(pi d / p) + 1)` where `d` is the
/// Euclidean distance to the center; zero beyond `d = p`.
pub fn raised_cosine_weights(radius: usize) -> Result<FloatPlane> {
    if radius < 1 {
        return Err(Error::InvalidParams("patch radius must be >= 1".into()));
    }
    let p = radius as f64;
    let size = 2 * radius + 1;
    Ok(FloatPlane::from_fn(size, size, |x, y| {
        let dx = x as f64 - p;
        let dy = y as f64 - p;
        let d = (dx * dx + dy * dy).sqrt();
        if d >= p {
            0.0
        } else {
            0.5 * ((PI / p * d).cos() + 1.0)
        }
    }))
}

fn check_congruent(patch: &FloatPlane, weights: &FloatPlane) -> Result<f64> {
    if !patch.same_shape(weights) {
        return Err(Error::DimensionMismatch(format!(
            "patch is {}x{}, weights are {}x{}",
            patch.width(),
            patch.height(),
            weights.width(),
            weights.height()
        )));
    }
    let sum: f64 = weights.data().iter().sum();
    if sum == 0.0 {
        return Err(Error::ZeroWeightSum);
    }
    Ok(sum)
}

/// Weighted mean `sum w L / sum w`.
pub fn local_luminance(patch: &FloatPlane, weights: &FloatPlane) -> Result<f64> {
    let wsum = check_congruent(patch, weights)?;
    let acc: f64 = patch
        .data()
        .iter()
        .zip(weights.data())
        .map(|(l, w)| w * l)
        .sum();
    Ok(acc / wsum)
}

/// `sqrt(sum w (L_i - L)^2 / (L^2 sum w))`. Invariant under scaling of the
/// patch by any positive factor.
pub fn patch_rms_contrast(patch: &FloatPlane, weights: &FloatPlane) -> Result<f64> {
    let wsum = check_congruent(patch, weights)?;
    if patch.data().windows(2).all(|p| p[0] == p[1]) {
        return Ok(0.0);
    }
    let lum = local_luminance(patch, weights)?;
    let spread: f64 = patch
        .data()
        .iter()
        .zip(weights.data())
        .map(|(l, w)| w * (l - lum) * (l - lum))
        .sum();
    if lum == 0.0 {
        return if spread == 0.0 {
            Ok(0.0)
        } else {
            Err(Error::ZeroLuminance)
        };
    }
    Ok((spread / (lum * lum * wsum)).sqrt())
}

/// Population standard deviation of the 8-bit intensities. Color input is
/// converted to gray first.
pub fn global_rms_contrast(img: &RasterImage) -> f64 {
    let gray = to_grayscale(img);
    let n = gray.pixel_count() as u128;
    let (sum, sum_sq) = gray.data().iter().fold((0u128, 0u128), |(s, q), &v| {
        let v = v as u128;
        (s + v, q + v * v)
    });
    // exact integer numerator keeps the result shift-invariant
    let num = n * sum_sq - sum * sum;
    ((num as f64) / ((n * n) as f64)).sqrt()
}

/// Mean of every sample over all channels.
pub fn image_mean(img: &RasterImage) -> f64 {
    let sum: u64 = img.data().iter().map(|&v| v as u64).sum();
    sum as f64 / img.data().len() as f64
}

/// Image-level patch contrast: the image (gray, raw intensities) is tiled
/// with `(2p+1)`-wide patches, sampled with reflect-101 past the borders,
/// and the patch contrasts are averaged.
pub fn mean_patch_rms_contrast(img: &RasterImage, radius: usize) -> Result<f64> {
    let weights = raised_cosine_weights(radius)?;
    let gray = to_grayscale(img);
    let (w, h) = (gray.width(), gray.height());
    let size = 2 * radius + 1;
    let nx = w.div_ceil(size);
    let ny = h.div_ceil(size);
    let r = radius as isize;
    let mut total = 0.0;
    for ty in 0..ny {
        for tx in 0..nx {
            let cx = (tx * size) as isize + r;
            let cy = (ty * size) as isize + r;
            let patch = FloatPlane::from_fn(size, size, |x, y| {
                let sx = reflect101(cx + x as isize - r, w);
                let sy = reflect101(cy + y as isize - r, h);
                gray.data()[sy * w + sx] as f64
            });
            total += patch_rms_contrast(&patch, &weights)?;
        }
    }
    Ok(total / (nx * ny) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plane(v: &[f64]) -> FloatPlane {
        FloatPlane::new(v.len(), 1, v.to_vec()).unwrap()
    }

    #[test]
    fn weight_examples() {
        let w = raised_cosine_weights(2).unwrap();
        assert_eq!((w.width(), w.height()), (5, 5));
        assert_eq!(w.get(2, 2), 1.0);
        assert!((w.get(3, 2) - 0.5).abs() < 1e-15);
        assert_eq!(w.get(4, 2), 0.0);
        assert_eq!(w.get(0, 0), 0.0);
        assert!(raised_cosine_weights(0).is_err());
    }

    #[test]
    fn luminance_examples() {
        assert_eq!(
            local_luminance(&plane(&[7.0, 7.0, 7.0]), &plane(&[0.2, 1.0, 0.4])).unwrap(),
            7.0
        );
        assert_eq!(
            local_luminance(&plane(&[10.0, 30.0]), &plane(&[1.0, 3.0])).unwrap(),
            25.0
        );
        assert_eq!(
            local_luminance(&plane(&[1.0, 2.0, 6.0]), &plane(&[2.0; 3])).unwrap(),
            3.0
        );
        assert!(matches!(
            local_luminance(&plane(&[1.0]), &plane(&[0.0])),
            Err(Error::ZeroWeightSum)
        ));
        assert!(matches!(
            local_luminance(&plane(&[1.0]), &plane(&[1.0, 1.0])),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn patch_contrast_examples() {
        let w = plane(&[1.0, 1.0]);
        assert_eq!(patch_rms_contrast(&plane(&[5.0, 5.0]), &w).unwrap(), 0.0);
        assert!((patch_rms_contrast(&plane(&[50.0, 150.0]), &w).unwrap() - 0.5).abs() < 1e-15);
        assert!((patch_rms_contrast(&plane(&[100.0, 300.0]), &w).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(patch_rms_contrast(&plane(&[0.0, 0.0]), &w).unwrap(), 0.0);
        assert!(matches!(
            patch_rms_contrast(&plane(&[-1.0, 1.0]), &w),
            Err(Error::ZeroLuminance)
        ));
    }

    #[test]
    fn global_contrast_examples() {
        let c = RasterImage::filled(3, 3, 1, 90).unwrap();
        assert_eq!(global_rms_contrast(&c), 0.0);
        let img = RasterImage::gray(2, 2, vec![0, 0, 255, 255]).unwrap();
        assert_eq!(global_rms_contrast(&img), 127.5);
        let shifted = RasterImage::gray(2, 2, vec![10, 10, 20, 40]).unwrap();
        let base = RasterImage::gray(2, 2, vec![0, 0, 10, 30]).unwrap();
        assert_eq!(global_rms_contrast(&shifted), global_rms_contrast(&base));
    }

    #[test]
    fn mean_examples() {
        assert_eq!(image_mean(&RasterImage::filled(2, 3, 1, 42).unwrap()), 42.0);
        assert_eq!(
            image_mean(&RasterImage::gray(2, 1, vec![0, 255]).unwrap()),
            127.5
        );
        assert_eq!(
            image_mean(&RasterImage::rgb(1, 1, vec![30, 60, 90]).unwrap()),
            60.0
        );
    }

    #[test]
    fn patch_variant_on_images() {
        let c = RasterImage::filled(40, 30, 1, 120).unwrap();
        assert_eq!(mean_patch_rms_contrast(&c, 4).unwrap(), 0.0);
        let black = RasterImage::filled(5, 5, 1, 0).unwrap();
        assert_eq!(mean_patch_rms_contrast(&black, 16).unwrap(), 0.0);
        let stripes = RasterImage::gray(
            20,
            20,
            (0..400)
                .map(|i| if (i % 20) % 2 == 0 { 50 } else { 150 })
                .collect(),
        )
        .unwrap();
        let v = mean_patch_rms_contrast(&stripes, 3).unwrap();
        assert!(v > 0.3 && v < 0.7, "{v}");
    }
}
