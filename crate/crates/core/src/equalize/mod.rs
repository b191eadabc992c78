//! Gray-level histograms, global histogram equalization and CLAHE.

mod clahe;

pub use clahe::{
    apply_tile_luts, build_tile_luts, clahe, clahe_with, clip_and_redistribute, clip_threshold,
    tile_lut, ClaheParams, Execution, TileLuts,
};

use std::io::Write;

use crate::error::{Error, Result};
use crate::imagecore::RasterImage;

/// 256-bin counts with running cumulative counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Histogram256 {
    counts: [u64; 256],
    cumulative: [u64; 256],
}

impl Histogram256 {
    pub fn from_counts(counts: [u64; 256]) -> Self {
        let mut cumulative = [0u64; 256];
        let mut acc = 0;
        for (c, out) in counts.iter().zip(cumulative.iter_mut()) {
            acc += c;
            *out = acc;
        }
        Self { counts, cumulative }
    }

    pub fn counts(&self) -> &[u64; 256] {
        &self.counts
    }

    pub fn cumulative(&self) -> &[u64; 256] {
        &self.cumulative
    }

    pub fn total(&self) -> u64 {
        self.cumulative[255]
    }

    /// Smallest non-zero cumulative count, or `None` for an empty histogram.
    pub fn cdf_min(&self) -> Option<u64> {
        self.cumulative.iter().copied().find(|&c| c > 0)
    }

    /// Writes `bin,count,cdf` with one row per bin.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["bin", "count", "cdf"]).map_err(csv_err)?;
        for bin in 0..256 {
            w.write_record([
                bin.to_string(),
                self.counts[bin].to_string(),
                self.cumulative[bin].to_string(),
            ])
            .map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

pub fn histogram(gray: &RasterImage) -> Result<Histogram256> {
    gray.require_gray()?;
    let mut counts = [0u64; 256];
    for &v in gray.data() {
        counts[v as usize] += 1;
    }
    Ok(Histogram256::from_counts(counts))
}

/// Reported when equalization cannot spread a single occupied level.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DegenerateImage;

impl std::fmt::Display for DegenerateImage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("image has a single gray level; equalization left it unchanged")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equalized {
    pub image: RasterImage,
    pub warning: Option<DegenerateImage>,
}

/// `h(v) = round((cdf(v) - cdf_min) / (N - cdf_min) * 255)`, zero below the
/// first occupied level. `None` when every pixel shares one level.
pub fn global_lut(hist: &Histogram256) -> Option<[u8; 256]> {
    let total = hist.total();
    let cdf_min = hist.cdf_min()?;
    let den = total - cdf_min;
    if den == 0 {
        return None;
    }
    let mut lut = [0u8; 256];
    for (v, out) in lut.iter_mut().enumerate() {
        let cdf = hist.cumulative[v];
        if cdf > cdf_min {
            let num = (cdf - cdf_min) * 255;
            *out = ((2 * num + den) / (2 * den)).min(255) as u8;
        }
    }
    Some(lut)
}

/// Global histogram equalization. A constant image comes back unchanged
/// with a [`DegenerateImage`] warning.
pub fn equalize_global(gray: &RasterImage) -> Result<Equalized> {
    let hist = histogram(gray)?;
    Ok(match global_lut(&hist) {
        Some(lut) => Equalized {
            image: gray.map_lut(&lut),
            warning: None,
        },
        None => {
            log::warn!("{DegenerateImage}");
            Equalized {
                image: gray.clone(),
                warning: Some(DegenerateImage),
            }
        }
    })
}
