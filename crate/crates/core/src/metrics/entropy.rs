//! Shannon entropy of the gray-level histogram, GLCM entropy, and per-pixel
//! local entropy maps.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::equalize::histogram;
use crate::error::{Error, Result};
use crate::imagecore::{reflect101, FloatPlane, RasterImage};

/// `-sum p log2 p` over a count vector, with `0 log 0 = 0`.
pub fn shannon_bits(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let n = total as f64;
    let h: f64 = counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum();
    h.max(0.0)
}

/// Entropy in bits of the 256-bin histogram of a gray image, in `[0, 8]`.
pub fn histogram_entropy(gray: &RasterImage) -> Result<f64> {
    let hist = histogram(gray)?;
    Ok(shannon_bits(hist.counts()))
}

/// One of the four co-occurrence directions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GlcmAngle {
    Deg0,
    Deg45,
    Deg90,
    Deg135,
}

impl GlcmAngle {
    pub const ALL: [GlcmAngle; 4] = [
        GlcmAngle::Deg0,
        GlcmAngle::Deg45,
        GlcmAngle::Deg90,
        GlcmAngle::Deg135,
    ];

    /// `(dx, dy)` with y growing downward.
    pub fn offset(self, d: usize) -> (isize, isize) {
        let d = d as isize;
        match self {
            GlcmAngle::Deg0 => (d, 0),
            GlcmAngle::Deg45 => (d, -d),
            GlcmAngle::Deg90 => (0, -d),
            GlcmAngle::Deg135 => (-d, -d),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GlcmParams {
    pub distance: usize,
    pub levels: usize,
}

impl GlcmParams {
    pub fn new(distance: usize, levels: usize) -> Result<Self> {
        let p = Self { distance, levels };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.distance < 1 {
            return Err(Error::InvalidParams("GLCM distance must be >= 1".into()));
        }
        if !(2..=256).contains(&self.levels) {
            return Err(Error::InvalidParams(format!(
                "GLCM levels must be in 2..=256, got {}",
                self.levels
            )));
        }
        Ok(())
    }

    #[inline]
    fn quantize(&self, v: u8) -> usize {
        v as usize * self.levels / 256
    }
}

impl Default for GlcmParams {
    fn default() -> Self {
        Self {
            distance: 1,
            levels: 256,
        }
    }
}

/// Normalized co-occurrence matrix for a single direction, row index `i`
/// is the reference pixel's level, column `j` the neighbor's.
#[derive(Clone, Debug, PartialEq)]
pub struct GlcmMatrix {
    levels: usize,
    probabilities: Vec<f64>,
}

impl GlcmMatrix {
    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.probabilities[i * self.levels + j]
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    /// `-sum P log10 P`.
    pub fn entropy(&self) -> f64 {
        let h: f64 = self
            .probabilities
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|&p| -p * p.log10())
            .sum();
        h.max(0.0)
    }
}

/// Co-occurrence of ordered pairs `(v(x, y), v((x, y) + offset))`.
pub fn glcm(gray: &RasterImage, params: &GlcmParams, angle: GlcmAngle) -> Result<GlcmMatrix> {
    gray.require_gray()?;
    params.validate()?;
    let (w, h) = (gray.width() as isize, gray.height() as isize);
    let (dx, dy) = angle.offset(params.distance);
    let levels = params.levels;
    let mut counts = vec![0u64; levels * levels];
    let mut pairs = 0u64;

    let data = gray.data();
    let x_range = (-dx).max(0)..(w - dx.max(0));
    let y_range = (-dy).max(0)..(h - dy.max(0));
    for y in y_range {
        let row = (y * w) as usize;
        let nrow = ((y + dy) * w) as usize;
        for x in x_range.clone() {
            let i = params.quantize(data[row + x as usize]);
            let j = params.quantize(data[nrow + (x + dx) as usize]);
            counts[i * levels + j] += 1;
            pairs += 1;
        }
    }
    if pairs == 0 {
        return Err(Error::ImageTooSmall(format!(
            "{}x{} image has no pixel pairs at distance {} for {:?}",
            w, h, params.distance, angle
        )));
    }
    let n = pairs as f64;
    Ok(GlcmMatrix {
        levels,
        probabilities: counts.into_iter().map(|c| c as f64 / n).collect(),
    })
}

/// Mean over the four directions of `-sum P log10 P`.
pub fn glcm_entropy(gray: &RasterImage, params: &GlcmParams) -> Result<f64> {
    let mut total = 0.0;
    for angle in GlcmAngle::ALL {
        total += glcm(gray, params, angle)?.entropy();
    }
    Ok(total / 4.0)
}

/// Offsets `(dx, dy)` with `dx^2 + dy^2 <= radius^2`, row-major.
pub fn disk_offsets(radius: usize) -> Vec<(isize, isize)> {
    let r = radius as isize;
    let mut out = Vec::new();
    for dy in -r..=r {
        for dx in -r..=r {
            if dx * dx + dy * dy <= r * r {
                out.push((dx, dy));
            }
        }
    }
    out
}

const FIXED_SHIFT: u32 = 40;

/// Local base-2 entropy of the 256-bin histogram inside a disk of `radius`
/// around each pixel, borders reflected (reflect-101).
///
/// Rows are processed independently; each row slides its histogram from
/// left to right and tracks `sum c log2 c` in fixed point so that the
/// result does not depend on the update order.
pub fn entropy_map(gray: &RasterImage, radius: usize) -> Result<FloatPlane> {
    gray.require_gray()?;
    if radius < 1 {
        return Err(Error::InvalidParams(
            "entropy-map radius must be >= 1".into(),
        ));
    }
    let (w, h) = (gray.width(), gray.height());
    let r = radius as isize;
    let spans: Vec<(isize, isize)> = (-r..=r)
        .map(|dy| {
            let mut hw = 0;
            while (hw + 1) * (hw + 1) + dy * dy <= r * r {
                hw += 1;
            }
            (dy, hw)
        })
        .collect();
    let n: u64 = spans.iter().map(|&(_, hw)| (2 * hw + 1) as u64).sum();
    let scale = (1u64 << FIXED_SHIFT) as f64;
    let clog: Vec<u128> = (0..=n)
        .map(|c| {
            if c < 2 {
                0
            } else {
                (c as f64 * (c as f64).log2() * scale).round() as u128
            }
        })
        .collect();
    let full = clog[n as usize];
    let data = gray.data();

    let rows: Vec<Vec<f64>> = (0..h)
        .into_par_iter()
        .map(|y| {
            let src_rows: Vec<(usize, isize)> = spans
                .iter()
                .map(|&(dy, hw)| (reflect101(y as isize + dy, h) * w, hw))
                .collect();
            let mut counts = [0u32; 256];
            let mut sum: u128 = 0;
            let add = |counts: &mut [u32; 256], sum: &mut u128, v: u8| {
                let c = &mut counts[v as usize];
                *sum = *sum - clog[*c as usize] + clog[*c as usize + 1];
                *c += 1;
            };
            for &(base, hw) in &src_rows {
                for dx in -hw..=hw {
                    add(&mut counts, &mut sum, data[base + reflect101(dx, w)]);
                }
            }
            let mut row = Vec::with_capacity(w);
            for x in 0..w {
                if x > 0 {
                    for &(base, hw) in &src_rows {
                        let out_v = data[base + reflect101(x as isize - 1 - hw, w)];
                        let c = &mut counts[out_v as usize];
                        sum = sum - clog[*c as usize] + clog[*c as usize - 1];
                        *c -= 1;
                        add(
                            &mut counts,
                            &mut sum,
                            data[base + reflect101(x as isize + hw, w)],
                        );
                    }
                }
                let bits = full.saturating_sub(sum) as f64 / scale / n as f64;
                row.push(bits.max(0.0));
            }
            row
        })
        .collect();

    FloatPlane::new(w, h, rows.concat())
}
