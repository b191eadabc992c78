//! Raw float plane sidecar.
//!
//! One ASCII header line `MGPLANES 1 <space> <width> <height>\n`, followed by
//! the three planes one after another, each `width * height` little-endian
//! IEEE-754 64-bit values in row-major order.

use std::fs;
use std::path::Path;

use crate::colorspace::{ColorPlanes, SpaceId};
use crate::error::{Error, Result};
use crate::imagecore::FloatPlane;

pub const MAGIC: &str = "MGPLANES";
pub const VERSION: u32 = 1;

pub fn encode_planes(cp: &ColorPlanes) -> Vec<u8> {
    let mut out = format!(
        "{MAGIC} {VERSION} {} {} {}\n",
        cp.space(),
        cp.width(),
        cp.height()
    )
    .into_bytes();
    for plane in cp.planes() {
        for v in plane.data() {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

pub fn is_planes_file(bytes: &[u8]) -> bool {
    bytes.starts_with(MAGIC.as_bytes())
}

pub fn decode_planes(bytes: &[u8]) -> Result<ColorPlanes> {
    let nl = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| Error::CorruptData("planes header has no newline".into()))?;
    let header = std::str::from_utf8(&bytes[..nl])
        .map_err(|_| Error::CorruptData("planes header is not ASCII".into()))?;
    let fields: Vec<&str> = header.split_ascii_whitespace().collect();
    let [magic, version, space, width, height] = fields.as_slice() else {
        return Err(Error::CorruptData(format!(
            "malformed planes header '{header}'"
        )));
    };
    if *magic != MAGIC {
        return Err(Error::UnsupportedFormat("not a planes file".into()));
    }
    if version.parse::<u32>().ok() != Some(VERSION) {
        return Err(Error::UnsupportedFormat(format!(
            "planes file version {version}"
        )));
    }
    let space: SpaceId = space.parse()?;
    let parse_dim = |s: &str| {
        s.parse::<usize>()
            .ok()
            .filter(|&v| v > 0)
            .ok_or_else(|| Error::CorruptData(format!("bad plane dimension '{s}'")))
    };
    let (w, h) = (parse_dim(width)?, parse_dim(height)?);
    let n = w * h;
    let payload = &bytes[nl + 1..];
    if payload.len() != n * 3 * 8 {
        return Err(Error::CorruptData(format!(
            "{w}x{h} planes need {} bytes, found {}",
            n * 24,
            payload.len()
        )));
    }
    let mut values = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")));
    let mut next_plane = || FloatPlane::new(w, h, values.by_ref().take(n).collect());
    let planes = [next_plane()?, next_plane()?, next_plane()?];
    ColorPlanes::new(space, planes)
}

pub fn write_planes(cp: &ColorPlanes, path: &Path) -> Result<()> {
    fs::write(path, encode_planes(cp))?;
    Ok(())
}
