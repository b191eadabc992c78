//! Contrast Limited Adaptive Histogram Equalization.
//!
//! 1. Pad right/bottom with reflect-101 until the tile grid divides evenly.
//! 2. Histogram every tile, clip at the threshold and redistribute the excess.
//! 3. Turn each clipped histogram into a scaled-CDF table.
//! 4. Blend the four nearest tile tables bilinearly, weights taken from the
//!    distance to tile centers; neighbor indices clamp at the border.
//!
//! The per-tile table is `round(cdf * 255 / area)`, with no `cdf_min`
//! subtraction, unlike [`equalize_global`](super::equalize_global).
//! Blending is done in exact integer arithmetic: with tile width `tw`, the
//! horizontal weight of the right neighbor is `a / (2 tw)` for an integer
//! `a`, so the blended value is a ratio of integers and rounds half up
//! without floating point error.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::Histogram256;
use crate::error::{Error, Result};
use crate::imagecore::{reflect101, RasterImage};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClaheParams {
    clip_limit: f64,
    tiles_x: usize,
    tiles_y: usize,
}

impl ClaheParams {
    pub fn new(clip_limit: f64, tiles_x: usize, tiles_y: usize) -> Result<Self> {
        let p = Self {
            clip_limit,
            tiles_x,
            tiles_y,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.clip_limit.is_finite() && self.clip_limit > 0.0) {
            return Err(Error::InvalidParams(format!(
                "clip limit must be a positive number, got {}",
                self.clip_limit
            )));
        }
        if self.tiles_x < 1 || self.tiles_y < 1 {
            return Err(Error::InvalidParams(format!(
                "tile grid must be at least 1x1, got {}x{}",
                self.tiles_x, self.tiles_y
            )));
        }
        Ok(())
    }

    pub fn clip_limit(&self) -> f64 {
        self.clip_limit
    }

    pub fn tiles_x(&self) -> usize {
        self.tiles_x
    }

    pub fn tiles_y(&self) -> usize {
        self.tiles_y
    }
}

impl Default for ClaheParams {
    /// Clip limit 2.0 on an 8x8 grid.
    fn default() -> Self {
        Self {
            clip_limit: 2.0,
            tiles_x: 8,
            tiles_y: 8,
        }
    }
}

/// Per-bin cap: `max(1, floor(clip_limit * area / 256))`.
pub fn clip_threshold(area: u64, clip_limit: f64) -> u64 {
    let t = (clip_limit * area as f64 / 256.0).floor();
    if t >= u64::MAX as f64 {
        u64::MAX
    } else {
        (t as u64).max(1)
    }
}

/// Caps every bin at [`clip_threshold`] and hands the excess back: each bin
/// gets `excess / 256`, then the remaining `r` units go one each to bins
/// `0, s, 2s, ..` with `s = 256 / r`. The total is preserved.
pub fn clip_and_redistribute(
    hist: &Histogram256,
    area: u64,
    clip_limit: f64,
) -> Result<Histogram256> {
    if hist.total() != area {
        return Err(Error::InvalidParams(format!(
            "histogram holds {} counts, tile area is {area}",
            hist.total()
        )));
    }
    if !(clip_limit.is_finite() && clip_limit > 0.0) {
        return Err(Error::InvalidParams(format!(
            "clip limit must be a positive number, got {clip_limit}"
        )));
    }
    Ok(Histogram256::from_counts(clip_counts(
        hist.counts(),
        clip_threshold(area, clip_limit),
    )))
}

fn clip_counts(counts: &[u64; 256], threshold: u64) -> [u64; 256] {
    let mut out = *counts;
    let mut excess = 0;
    for c in out.iter_mut() {
        if *c > threshold {
            excess += *c - threshold;
            *c = threshold;
        }
    }
    if excess == 0 {
        return out;
    }
    let batch = excess / 256;
    let residual = (excess % 256) as usize;
    for c in out.iter_mut() {
        *c += batch;
    }
    if let Some(step) = 256usize.checked_div(residual) {
        for c in out.iter_mut().step_by(step).take(residual) {
            *c += 1;
        }
    }
    out
}

/// `lut[v] = round(cumulative[v] * 255 / area)`.
pub fn tile_lut(hist: &Histogram256, area: u64) -> [u8; 256] {
    assert!(area > 0, "tile area must be positive");
    let mut lut = [0u8; 256];
    for (out, &cdf) in lut.iter_mut().zip(hist.cumulative()) {
        *out = ((2 * cdf * 255 + area) / (2 * area)).min(255) as u8;
    }
    lut
}

/// Tile grid geometry and one mapping table per tile (row-major).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TileLuts {
    pub tiles_x: usize,
    pub tiles_y: usize,
    pub tile_width: usize,
    pub tile_height: usize,
    pub luts: Vec<[u8; 256]>,
}

impl TileLuts {
    pub fn lut(&self, tx: usize, ty: usize) -> &[u8; 256] {
        &self.luts[ty * self.tiles_x + tx]
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    #[default]
    Sequential,
    Parallel,
}

fn check_input(gray: &RasterImage, params: &ClaheParams) -> Result<()> {
    gray.require_gray()?;
    params.validate()?;
    if gray.width() < params.tiles_x || gray.height() < params.tiles_y {
        return Err(Error::ImageTooSmall(format!(
            "a {}x{} tile grid needs an image of at least {}x{} pixels, got {}x{}",
            params.tiles_x,
            params.tiles_y,
            params.tiles_x,
            params.tiles_y,
            gray.width(),
            gray.height()
        )));
    }
    Ok(())
}

pub fn build_tile_luts(
    gray: &RasterImage,
    params: &ClaheParams,
    exec: Execution,
) -> Result<TileLuts> {
    check_input(gray, params)?;
    let (w, h) = (gray.width(), gray.height());
    let tw = w.div_ceil(params.tiles_x);
    let th = h.div_ceil(params.tiles_y);
    let area = (tw * th) as u64;
    let threshold = clip_threshold(area, params.clip_limit);
    let src_x: Vec<usize> = (0..tw * params.tiles_x)
        .map(|x| reflect101(x as isize, w))
        .collect();
    let src_y: Vec<usize> = (0..th * params.tiles_y)
        .map(|y| reflect101(y as isize, h))
        .collect();
    let data = gray.data();

    let tile = |index: usize| {
        let (tx, ty) = (index % params.tiles_x, index / params.tiles_x);
        let mut counts = [0u64; 256];
        for &sy in &src_y[ty * th..(ty + 1) * th] {
            let row = &data[sy * w..(sy + 1) * w];
            for &sx in &src_x[tx * tw..(tx + 1) * tw] {
                counts[row[sx] as usize] += 1;
            }
        }
        tile_lut(
            &Histogram256::from_counts(clip_counts(&counts, threshold)),
            area,
        )
    };
    let n = params.tiles_x * params.tiles_y;
    let luts = match exec {
        Execution::Sequential => (0..n).map(tile).collect(),
        Execution::Parallel => (0..n).into_par_iter().map(tile).collect(),
    };
    Ok(TileLuts {
        tiles_x: params.tiles_x,
        tiles_y: params.tiles_y,
        tile_width: tw,
        tile_height: th,
        luts,
    })
}

/// For each coordinate along one axis: the lower and upper neighbor tile
/// and the upper tile's weight numerator over `2 * tile`.
fn axis_weights(len: usize, tile: usize, tiles: usize) -> Vec<(usize, usize, u64)> {
    let span = 2 * tile as i64;
    (0..len)
        .map(|x| {
            let offset = 2 * x as i64 + 1 - tile as i64;
            let lower = offset.div_euclid(span);
            let frac = offset.rem_euclid(span) as u64;
            let clamp = |i: i64| i.clamp(0, tiles as i64 - 1) as usize;
            (clamp(lower), clamp(lower + 1), frac)
        })
        .collect()
}

/// CLAHE on a gray image, sequential execution.
pub fn clahe(gray: &RasterImage, params: &ClaheParams) -> Result<RasterImage> {
    clahe_with(gray, params, Execution::Sequential)
}

/// CLAHE with a choice of execution; both modes give identical output.
pub fn clahe_with(
    gray: &RasterImage,
    params: &ClaheParams,
    exec: Execution,
) -> Result<RasterImage> {
    let luts = build_tile_luts(gray, params, exec)?;
    apply_tile_luts(gray, &luts, exec)
}

/// Blends the four nearest tile tables per pixel. `luts` must use the
/// tile geometry [`build_tile_luts`] derives for an image of this size.
pub fn apply_tile_luts(
    gray: &RasterImage,
    luts: &TileLuts,
    exec: Execution,
) -> Result<RasterImage> {
    gray.require_gray()?;
    let (w, h) = (gray.width(), gray.height());
    let covers = |len: usize, tile: usize, tiles: usize| tiles > 0 && tile == len.div_ceil(tiles);
    if !covers(w, luts.tile_width, luts.tiles_x)
        || !covers(h, luts.tile_height, luts.tiles_y)
        || luts.luts.len() != luts.tiles_x * luts.tiles_y
    {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} tiles of {}x{} do not fit a {w}x{h} image",
            luts.tiles_x, luts.tiles_y, luts.tile_width, luts.tile_height
        )));
    }
    let cols = axis_weights(w, luts.tile_width, luts.tiles_x);
    let rows = axis_weights(h, luts.tile_height, luts.tiles_y);
    let span_x = 2 * luts.tile_width as u64;
    let span_y = 2 * luts.tile_height as u64;
    let den = span_x * span_y;
    let data = gray.data();

    let fill_row = |y: usize, out: &mut [u8]| {
        let (j0, j1, b) = rows[y];
        let src = &data[y * w..(y + 1) * w];
        for (x, dst) in out.iter_mut().enumerate() {
            let (i0, i1, a) = cols[x];
            let v = src[x] as usize;
            let top = (span_x - a) * luts.lut(i0, j0)[v] as u64 + a * luts.lut(i1, j0)[v] as u64;
            let bottom = (span_x - a) * luts.lut(i0, j1)[v] as u64 + a * luts.lut(i1, j1)[v] as u64;
            let num = (span_y - b) * top + b * bottom;
            *dst = ((2 * num + den) / (2 * den)).min(255) as u8;
        }
    };

    let mut out = vec![0u8; w * h];
    match exec {
        Execution::Sequential => out
            .chunks_mut(w)
            .enumerate()
            .for_each(|(y, row)| fill_row(y, row)),
        Execution::Parallel => out
            .par_chunks_mut(w)
            .enumerate()
            .for_each(|(y, row)| fill_row(y, row)),
    }
    RasterImage::gray(w, h, out)
}
