//! Binary NetPBM (P5 graymap, P6 pixmap) with maxval 255.

use super::RasterImage;
use crate::error::{Error, Result};

struct Header {
    channels: usize,
    width: usize,
    height: usize,
    payload_start: usize,
}

fn parse_header(bytes: &[u8]) -> Result<Header> {
    if bytes.len() < 2 || bytes[0] != b'P' {
        return Err(Error::UnsupportedFormat("missing NetPBM magic".into()));
    }
    let channels = match bytes[1] {
        b'5' => 1,
        b'6' => 3,
        other => {
            return Err(Error::UnsupportedFormat(format!(
                "NetPBM variant P{} is not supported (only P5/P6)",
                other as char
            )))
        }
    };

    let mut pos = 2;
    let mut fields = [0usize; 3];
    for field in fields.iter_mut() {
        // whitespace and comments
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while let Some(&b) = bytes.get(pos) {
                        pos += 1;
                        if b == b'\n' || b == b'\r' {
                            break;
                        }
                    }
                }
                _ => break,
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        if start == pos {
            return Err(Error::CorruptData("malformed NetPBM header".into()));
        }
        *field = std::str::from_utf8(&bytes[start..pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::CorruptData("NetPBM header value out of range".into()))?;
    }
    match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        _ => return Err(Error::CorruptData("missing whitespace after maxval".into())),
    }

    let [width, height, maxval] = fields;
    if maxval != 255 {
        return Err(Error::UnsupportedFormat(format!(
            "NetPBM maxval {maxval} (only 255 is supported)"
        )));
    }
    if width == 0 || height == 0 {
        return Err(Error::CorruptData(format!(
            "zero dimension {width}x{height}"
        )));
    }
    Ok(Header {
        channels,
        width,
        height,
        payload_start: pos,
    })
}

/// Decodes a P5/P6 byte stream. Trailing bytes past the payload are ignored.
pub fn decode_pnm(bytes: &[u8]) -> Result<RasterImage> {
    let header = parse_header(bytes)?;
    let needed = header
        .width
        .checked_mul(header.height)
        .and_then(|n| n.checked_mul(header.channels))
        .ok_or_else(|| Error::CorruptData("dimensions overflow".into()))?;
    let payload = &bytes[header.payload_start..];
    if payload.len() < needed {
        return Err(Error::CorruptData(format!(
            "header declares {}x{}x{} = {needed} bytes, payload has {}",
            header.width,
            header.height,
            header.channels,
            payload.len()
        )));
    }
    RasterImage::new(
        header.width,
        header.height,
        header.channels,
        payload[..needed].to_vec(),
    )
}

/// Encodes as P5 when `channels == 1`, P6 when `channels == 3`.
pub fn encode_pnm(img: &RasterImage, channels: usize) -> Result<Vec<u8>> {
    let (magic, data) = match (channels, img.channels()) {
        (1, 1) => ("P5", img.data().to_vec()),
        (1, _) => {
            return Err(Error::UnsupportedFormat(
                "P5 is grayscale-only; cannot store a 3-channel image".into(),
            ))
        }
        (3, _) => ("P6", img.to_rgb().into_data()),
        _ => {
            return Err(Error::UnsupportedFormat(format!(
                "{channels}-channel NetPBM"
            )))
        }
    };
    let mut out = format!("{magic}\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(&data);
    Ok(out)
}
