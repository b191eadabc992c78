use crate::error::{Error, Result};
use crate::imagecore::{FloatPlane, RasterImage};

/// Opponent color planes on unit-range channels: `rg = R - G` and
/// `yb = (R + G) / 2 - B`.
#[derive(Clone, Debug, PartialEq)]
pub struct OpponentChannels {
    pub rg: FloatPlane,
    pub yb: FloatPlane,
}

pub fn opponent_channels(img: &RasterImage) -> Result<OpponentChannels> {
    if img.channels() != 3 {
        return Err(Error::NotColor);
    }
    let n = img.pixel_count();
    let mut rg = Vec::with_capacity(n);
    let mut yb = Vec::with_capacity(n);
    for px in img.data().chunks_exact(3) {
        let r = px[0] as f64 / 255.0;
        let g = px[1] as f64 / 255.0;
        let b = px[2] as f64 / 255.0;
        rg.push(r - g);
        yb.push(0.5 * (r + g) - b);
    }
    let (w, h) = (img.width(), img.height());
    Ok(OpponentChannels {
        rg: FloatPlane::new(w, h, rg)?,
        yb: FloatPlane::new(w, h, yb)?,
    })
}

/// Population mean and variance.
pub(crate) fn mean_var(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var)
}

/// Colorfulness `sqrt(var_rg + var_yb) + 0.3 sqrt(mean_rg^2 + mean_yb^2)`.
/// Gray images score exactly zero.
pub fn colorfulness(img: &RasterImage) -> f64 {
    if img.is_gray() {
        return 0.0;
    }
    let opp = opponent_channels(img).expect("three channels");
    let (mu_rg, var_rg) = mean_var(opp.rg.data());
    let (mu_yb, var_yb) = mean_var(opp.yb.data());
    (var_rg + var_yb).sqrt() + 0.3 * (mu_rg * mu_rg + mu_yb * mu_yb).sqrt()
}
