//! Raster and float-plane image types, file I/O and grayscale conversion.
//!
//! Everything downstream consumes [`RasterImage`] (8-bit, interleaved, one or
//! three channels) or [`FloatPlane`] (one real-valued channel).

mod io;
mod pnm;

pub use io::{encode_image, load_image, save_image, ImageFormat};
pub use pnm::{decode_pnm, encode_pnm};

use crate::error::{Error, Result};

/// BT.601 luma weights.
pub const LUMA_WEIGHTS: [f64; 3] = [0.299, 0.587, 0.114];

/// Round half away from zero, then clamp into the 8-bit range.
#[inline]
pub fn quantize_u8(value: f64) -> u8 {
    value.round().clamp(0.0, 255.0) as u8
}

/// 8-bit interleaved raster with one (gray) or three (RGB) channels, stored
/// row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RasterImage {
    width: usize,
    height: usize,
    channels: usize,
    data: Vec<u8>,
}

impl RasterImage {
    pub fn new(width: usize, height: usize, channels: usize, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidImage(format!(
                "dimensions must be positive, got {width}x{height}"
            )));
        }
        if channels != 1 && channels != 3 {
            return Err(Error::InvalidImage(format!(
                "channel count must be 1 or 3, got {channels}"
            )));
        }
        let expected = width
            .checked_mul(height)
            .and_then(|n| n.checked_mul(channels))
            .ok_or_else(|| Error::InvalidImage("dimensions overflow".into()))?;
        if data.len() != expected {
            return Err(Error::InvalidImage(format!(
                "buffer holds {} bytes, {width}x{height}x{channels} needs {expected}",
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            channels,
            data,
        })
    }

    pub fn gray(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        Self::new(width, height, 1, data)
    }

    pub fn rgb(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        Self::new(width, height, 3, data)
    }

    /// Constant-valued image; every sample of every channel equals `value`.
    pub fn filled(width: usize, height: usize, channels: usize, value: u8) -> Result<Self> {
        Self::new(
            width,
            height,
            channels,
            vec![value; width.saturating_mul(height).saturating_mul(channels)],
        )
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }

    pub fn is_gray(&self) -> bool {
        self.channels == 1
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn into_data(self) -> Vec<u8> {
        self.data
    }

    /// Samples of the pixel at `(x, y)`; length equals the channel count.
    pub fn pixel(&self, x: usize, y: usize) -> &[u8] {
        let start = (y * self.width + x) * self.channels;
        &self.data[start..start + self.channels]
    }

    pub fn rows(&self) -> std::slice::ChunksExact<'_, u8> {
        self.data.chunks_exact(self.width * self.channels)
    }

    /// Returns an error unless the image has exactly one channel.
    pub fn require_gray(&self) -> Result<()> {
        if self.channels == 1 {
            Ok(())
        } else {
            Err(Error::NotGrayscale(self.channels))
        }
    }

    /// Replicates a gray image into R=G=B triplets; color images are cloned.
    pub fn to_rgb(&self) -> RasterImage {
        if self.channels == 3 {
            return self.clone();
        }
        let data = self.data.iter().flat_map(|&v| [v, v, v]).collect();
        RasterImage {
            width: self.width,
            height: self.height,
            channels: 3,
            data,
        }
    }

    /// Applies a 256-entry table to every sample.
    pub fn map_lut(&self, lut: &[u8; 256]) -> RasterImage {
        RasterImage {
            width: self.width,
            height: self.height,
            channels: self.channels,
            data: self.data.iter().map(|&v| lut[v as usize]).collect(),
        }
    }
}

/// Gray conversion with BT.601 weights; gray input is copied unchanged.
pub fn to_grayscale(img: &RasterImage) -> RasterImage {
    if img.channels == 1 {
        return img.clone();
    }
    let data = img
        .data
        .chunks_exact(3)
        .map(|px| {
            quantize_u8(
                LUMA_WEIGHTS[0] * px[0] as f64
                    + LUMA_WEIGHTS[1] * px[1] as f64
                    + LUMA_WEIGHTS[2] * px[2] as f64,
            )
        })
        .collect();
    RasterImage {
        width: img.width,
        height: img.height,
        channels: 1,
        data,
    }
}

/// Real-valued single-channel plane, row-major. Values are always finite.
#[derive(Clone, Debug, PartialEq)]
pub struct FloatPlane {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl FloatPlane {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::DimensionMismatch(format!(
                "plane buffer holds {} values, {width}x{height} needs {}",
                data.len(),
                width * height
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidImage(format!(
                "non-finite value {} at index {pos}",
                data[pos]
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            data: vec![0.0; width * height],
        }
    }

    /// Builds a plane from a per-pixel function. Non-finite outputs are
    /// replaced by zero.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                let v = f(x, y);
                data.push(if v.is_finite() { v } else { 0.0 });
            }
        }
        Self {
            width,
            height,
            data,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    pub fn same_shape(&self, other: &FloatPlane) -> bool {
        self.width == other.width && self.height == other.height
    }

    /// Multiplies every value by `k`.
    pub fn scaled(&self, k: f64) -> FloatPlane {
        FloatPlane::from_fn(self.width, self.height, |x, y| self.get(x, y) * k)
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.data
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
    }
}

/// Reflect-101 index mapping (`.. p2 p1 | p0 p1 p2 ..`), valid for any
/// offset, including ones farther than the extent away.
#[inline]
pub fn reflect101(index: isize, len: usize) -> usize {
    if len == 1 {
        return 0;
    }
    let n = len as isize;
    let period = 2 * (n - 1);
    let mut i = index.rem_euclid(period);
    if i >= n {
        i = period - i;
    }
    i as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_buffers() {
        assert!(RasterImage::new(2, 2, 1, vec![0; 3]).is_err());
        assert!(RasterImage::new(0, 2, 1, vec![]).is_err());
        assert!(RasterImage::new(1, 1, 2, vec![0, 0]).is_err());
        assert!(RasterImage::new(1, 1, 3, vec![1, 2, 3]).is_ok());
    }

    #[test]
    fn float_plane_rejects_non_finite() {
        assert!(FloatPlane::new(1, 1, vec![f64::NAN]).is_err());
        assert!(FloatPlane::new(2, 1, vec![0.0]).is_err());
    }

    #[test]
    fn grayscale_examples() {
        let white = RasterImage::rgb(1, 1, vec![255, 255, 255]).unwrap();
        assert_eq!(to_grayscale(&white).data(), &[255]);
        let red = RasterImage::rgb(1, 1, vec![255, 0, 0]).unwrap();
        assert_eq!(to_grayscale(&red).data(), &[76]);
        let gray = RasterImage::gray(1, 1, vec![42]).unwrap();
        assert_eq!(to_grayscale(&gray), gray);
    }

    #[test]
    fn grayscale_of_achromatic_is_identity() {
        for v in 0..=255u8 {
            let img = RasterImage::rgb(1, 1, vec![v, v, v]).unwrap();
            assert_eq!(to_grayscale(&img).data(), &[v]);
        }
    }

    #[test]
    fn reflect101_mirrors_without_repeating_edge() {
        let got: Vec<usize> = (-3..8).map(|i| reflect101(i, 5)).collect();
        assert_eq!(got, vec![3, 2, 1, 0, 1, 2, 3, 4, 3, 2, 1]);
        assert_eq!(reflect101(-7, 1), 0);
        assert_eq!(reflect101(9, 2), 1);
    }
}
