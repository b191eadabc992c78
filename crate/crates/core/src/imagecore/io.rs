use std::fs;
use std::path::Path;

use image::{ColorType, DynamicImage, ExtendedColorType, ImageEncoder};

use super::pnm::{decode_pnm, encode_pnm};
use super::RasterImage;
use crate::error::{Error, Result};

/// File formats understood by [`load_image`] / [`save_image`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ImageFormat {
    /// P5 graymap.
    Pgm,
    /// P6 pixmap.
    Ppm,
    /// P5 or P6 chosen by channel count.
    Pnm,
    Png,
    /// Decode only.
    Jpeg,
}

impl ImageFormat {
    pub fn from_path(path: &Path) -> Result<Self> {
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase)
            .unwrap_or_default();
        match ext.as_str() {
            "pgm" => Ok(Self::Pgm),
            "ppm" => Ok(Self::Ppm),
            "pnm" => Ok(Self::Pnm),
            "png" => Ok(Self::Png),
            "jpg" | "jpeg" => Ok(Self::Jpeg),
            _ => Err(Error::UnsupportedFormat(format!(
                "cannot infer image format from '{}'",
                path.display()
            ))),
        }
    }

    fn sniff(bytes: &[u8]) -> Option<Self> {
        match bytes {
            [b'P', b'5', ..] => Some(Self::Pgm),
            [b'P', b'6', ..] => Some(Self::Ppm),
            [0x89, b'P', b'N', b'G', ..] => Some(Self::Png),
            [0xFF, 0xD8, ..] => Some(Self::Jpeg),
            [b'P', ..] => Some(Self::Pnm),
            _ => None,
        }
    }
}

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::FileNotFound(path.to_path_buf()),
        _ => Error::Io(e),
    })
}

fn from_dynamic(img: DynamicImage) -> Result<RasterImage> {
    let (w, h) = (img.width() as usize, img.height() as usize);
    match img.color() {
        ColorType::L8 => RasterImage::gray(w, h, img.into_luma8().into_raw()),
        ColorType::Rgb8 => RasterImage::rgb(w, h, img.into_rgb8().into_raw()),
        other => Err(Error::UnsupportedFormat(format!(
            "pixel layout {other:?} (only 8-bit gray and RGB are supported)"
        ))),
    }
}

/// Loads a NetPBM, PNG or JPEG file. The format is detected from the file
/// contents, not the extension.
pub fn load_image(path: impl AsRef<Path>) -> Result<RasterImage> {
    let path = path.as_ref();
    let bytes = read_bytes(path)?;
    let format = ImageFormat::sniff(&bytes).ok_or_else(|| {
        Error::UnsupportedFormat(format!(
            "unrecognized file contents in '{}'",
            path.display()
        ))
    })?;
    match format {
        ImageFormat::Pgm | ImageFormat::Ppm | ImageFormat::Pnm => decode_pnm(&bytes),
        ImageFormat::Png => image::load_from_memory_with_format(&bytes, image::ImageFormat::Png)
            .map_err(|e| Error::CorruptData(e.to_string()))
            .and_then(from_dynamic),
        ImageFormat::Jpeg => image::load_from_memory_with_format(&bytes, image::ImageFormat::Jpeg)
            .map_err(|e| Error::CorruptData(e.to_string()))
            .and_then(from_dynamic),
    }
}

/// Encodes `img` in the format named by the extension of `path`.
pub fn encode_image(img: &RasterImage, format: ImageFormat) -> Result<Vec<u8>> {
    match format {
        ImageFormat::Pgm => encode_pnm(img, 1),
        ImageFormat::Ppm => encode_pnm(img, 3),
        ImageFormat::Pnm => encode_pnm(img, img.channels()),
        ImageFormat::Png => {
            let color = if img.is_gray() {
                ExtendedColorType::L8
            } else {
                ExtendedColorType::Rgb8
            };
            let mut out = Vec::new();
            image::codecs::png::PngEncoder::new(&mut out)
                .write_image(img.data(), img.width() as u32, img.height() as u32, color)
                .map_err(|e| Error::Io(std::io::Error::other(e)))?;
            Ok(out)
        }
        ImageFormat::Jpeg => Err(Error::UnsupportedFormat(
            "JPEG is supported for loading only".into(),
        )),
    }
}

pub fn save_image(img: &RasterImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes = encode_image(img, ImageFormat::from_path(path)?)?;
    fs::write(path, bytes)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pgm_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let img = RasterImage::gray(2, 2, vec![0, 128, 255, 64]).unwrap();
        let path = dir.path().join("a.pgm");
        save_image(&img, &path).unwrap();
        assert_eq!(load_image(&path).unwrap(), img);
    }

    #[test]
    fn png_round_trip_gray_and_rgb() {
        let dir = tempfile::tempdir().unwrap();
        let gray = RasterImage::gray(3, 2, vec![0, 1, 2, 253, 254, 255]).unwrap();
        let rgb = RasterImage::rgb(2, 1, vec![1, 2, 3, 250, 251, 252]).unwrap();
        for (name, img) in [("g.png", gray), ("c.png", rgb)] {
            let path = dir.path().join(name);
            save_image(&img, &path).unwrap();
            assert_eq!(load_image(&path).unwrap(), img);
        }
    }

    #[test]
    fn save_errors() {
        let dir = tempfile::tempdir().unwrap();
        let rgb = RasterImage::rgb(1, 1, vec![1, 2, 3]).unwrap();
        assert!(matches!(
            save_image(&rgb, dir.path().join("x.pgm")),
            Err(Error::UnsupportedFormat(_))
        ));
        assert!(matches!(
            save_image(&rgb, dir.path().join("x.jpg")),
            Err(Error::UnsupportedFormat(_))
        ));
        assert!(matches!(
            save_image(&rgb, dir.path().join("x.bmp")),
            Err(Error::UnsupportedFormat(_))
        ));
        assert!(matches!(
            save_image(&rgb, dir.path().join("missing/dir/x.ppm")),
            Err(Error::Io(_))
        ));
    }

    #[test]
    fn load_errors() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            load_image(dir.path().join("nope.pgm")),
            Err(Error::FileNotFound(_))
        ));
        let junk = dir.path().join("junk.pgm");
        fs::write(&junk, b"hello").unwrap();
        assert!(matches!(
            load_image(&junk),
            Err(Error::UnsupportedFormat(_))
        ));
    }
}
