//! Quantitative image metrics: colorfulness, entropy, RMS contrast, mean.
//!
//! Entropy and contrast each come in two interchangeable variants that
//! implement [`EntropyMeasure`] / [`ContrastMeasure`] and are looked up by
//! name in a [`MetricRegistry`]:
//!
//! * entropy `histogram` (default): base-2 Shannon entropy of the gray
//!   histogram, in `[0, 8]` bits.
//! * entropy `glcm`: four-direction mean of the base-10 GLCM entropy.
//! * contrast `global` (default): standard deviation of 8-bit intensities.
//! * contrast `patch`: mean raised-cosine patch RMS contrast (unitless).

pub mod color;
pub mod contrast;
pub mod entropy;

pub use color::{colorfulness, opponent_channels, OpponentChannels};
pub use contrast::{
    global_rms_contrast, image_mean, local_luminance, mean_patch_rms_contrast, patch_rms_contrast,
    raised_cosine_weights,
};
pub use entropy::{
    disk_offsets, entropy_map, glcm, glcm_entropy, histogram_entropy, shannon_bits, GlcmAngle,
    GlcmMatrix, GlcmParams,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imagecore::{to_grayscale, RasterImage};

pub const DEFAULT_PATCH_RADIUS: usize = 16;
pub const DEFAULT_ENTROPY_MAP_RADIUS: usize = 5;

/// A scalar entropy score of a gray image.
pub trait EntropyMeasure: Send + Sync {
    fn name(&self) -> &'static str;
    fn measure(&self, gray: &RasterImage) -> Result<f64>;
}

/// A scalar contrast score of a gray image.
pub trait ContrastMeasure: Send + Sync {
    fn name(&self) -> &'static str;
    fn measure(&self, gray: &RasterImage) -> Result<f64>;
}

pub struct HistogramEntropy;

impl EntropyMeasure for HistogramEntropy {
    fn name(&self) -> &'static str {
        "histogram"
    }

    fn measure(&self, gray: &RasterImage) -> Result<f64> {
        histogram_entropy(gray)
    }
}

pub struct GlcmEntropy(pub GlcmParams);

impl EntropyMeasure for GlcmEntropy {
    fn name(&self) -> &'static str {
        "glcm"
    }

    fn measure(&self, gray: &RasterImage) -> Result<f64> {
        glcm_entropy(gray, &self.0)
    }
}

pub struct GlobalContrast;

impl ContrastMeasure for GlobalContrast {
    fn name(&self) -> &'static str {
        "global"
    }

    fn measure(&self, gray: &RasterImage) -> Result<f64> {
        Ok(global_rms_contrast(gray))
    }
}

pub struct PatchContrast {
    pub radius: usize,
}

impl ContrastMeasure for PatchContrast {
    fn name(&self) -> &'static str {
        "patch"
    }

    fn measure(&self, gray: &RasterImage) -> Result<f64> {
        mean_patch_rms_contrast(gray, self.radius)
    }
}

/// Variant selection and tuning for [`metrics_report`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricsConfig {
    pub entropy: String,
    pub contrast: String,
    pub glcm: GlcmParams,
    pub patch_radius: usize,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        Self {
            entropy: "histogram".into(),
            contrast: "global".into(),
            glcm: GlcmParams::default(),
            patch_radius: DEFAULT_PATCH_RADIUS,
        }
    }
}

impl MetricsConfig {
    /// Checks that both variant names resolve and parameters are in range.
    pub fn validate(&self) -> Result<()> {
        let reg = MetricRegistry::from_config(self)?;
        reg.entropy(&self.entropy)?;
        reg.contrast(&self.contrast)?;
        Ok(())
    }
}

/// Name-keyed entropy and contrast variants.
pub struct MetricRegistry {
    entropy: Vec<Box<dyn EntropyMeasure>>,
    contrast: Vec<Box<dyn ContrastMeasure>>,
}

impl MetricRegistry {
    pub fn empty() -> Self {
        Self {
            entropy: Vec::new(),
            contrast: Vec::new(),
        }
    }

    /// Built-in variants parameterized from `config`.
    pub fn from_config(config: &MetricsConfig) -> Result<Self> {
        config.glcm.validate()?;
        if config.patch_radius < 1 {
            return Err(Error::InvalidParams("patch radius must be >= 1".into()));
        }
        let mut reg = Self::empty();
        reg.register_entropy(Box::new(HistogramEntropy));
        reg.register_entropy(Box::new(GlcmEntropy(config.glcm)));
        reg.register_contrast(Box::new(GlobalContrast));
        reg.register_contrast(Box::new(PatchContrast {
            radius: config.patch_radius,
        }));
        Ok(reg)
    }

    pub fn register_entropy(&mut self, m: Box<dyn EntropyMeasure>) {
        self.entropy.retain(|e| e.name() != m.name());
        self.entropy.push(m);
    }

    pub fn register_contrast(&mut self, m: Box<dyn ContrastMeasure>) {
        self.contrast.retain(|e| e.name() != m.name());
        self.contrast.push(m);
    }

    pub fn entropy_names(&self) -> Vec<&'static str> {
        self.entropy.iter().map(|m| m.name()).collect()
    }

    pub fn contrast_names(&self) -> Vec<&'static str> {
        self.contrast.iter().map(|m| m.name()).collect()
    }

    pub fn entropy(&self, name: &str) -> Result<&dyn EntropyMeasure> {
        self.entropy
            .iter()
            .find(|m| m.name() == name)
            .map(|m| m.as_ref())
            .ok_or_else(|| Error::UnknownVariant {
                kind: "entropy variant",
                name: name.to_string(),
                available: self.entropy_names().join(", "),
            })
    }

    pub fn contrast(&self, name: &str) -> Result<&dyn ContrastMeasure> {
        self.contrast
            .iter()
            .find(|m| m.name() == name)
            .map(|m| m.as_ref())
            .ok_or_else(|| Error::UnknownVariant {
                kind: "contrast variant",
                name: name.to_string(),
                available: self.contrast_names().join(", "),
            })
    }
}

/// One row of a metrics table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub file: String,
    pub space: String,
    pub colorfulness: f64,
    pub entropy: f64,
    pub rms_contrast: f64,
    pub mean: f64,
    pub entropy_variant: String,
    pub contrast_variant: String,
}

/// Computes all four metrics. Entropy and contrast run on the gray
/// conversion; the mean covers every channel sample.
pub fn metrics_report(img: &RasterImage, config: &MetricsConfig) -> Result<MetricsReport> {
    let reg = MetricRegistry::from_config(config)?;
    let entropy = reg.entropy(&config.entropy)?;
    let contrast = reg.contrast(&config.contrast)?;
    let gray = to_grayscale(img);
    Ok(MetricsReport {
        file: String::new(),
        space: String::new(),
        colorfulness: colorfulness(img),
        entropy: entropy.measure(&gray)?,
        rms_contrast: contrast.measure(&gray)?,
        mean: image_mean(img),
        entropy_variant: entropy.name().to_string(),
        contrast_variant: contrast.name().to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_image_report() {
        let img = RasterImage::filled(8, 8, 1, 33).unwrap();
        let r = metrics_report(&img, &MetricsConfig::default()).unwrap();
        assert_eq!(
            (r.colorfulness, r.entropy, r.rms_contrast, r.mean),
            (0.0, 0.0, 0.0, 33.0)
        );
        assert_eq!(r.entropy_variant, "histogram");
        assert_eq!(r.contrast_variant, "global");
    }

    #[test]
    fn variants_switch() {
        let img = RasterImage::gray(4, 4, (0..16).map(|v| v * 16).collect()).unwrap();
        let cfg = MetricsConfig {
            entropy: "glcm".into(),
            contrast: "patch".into(),
            patch_radius: 2,
            ..Default::default()
        };
        let r = metrics_report(&img, &cfg).unwrap();
        assert_eq!(
            r.entropy,
            glcm_entropy(&img, &GlcmParams::default()).unwrap()
        );
        assert_eq!(r.rms_contrast, mean_patch_rms_contrast(&img, 2).unwrap());
        assert_eq!(r.entropy_variant, "glcm");
    }

    #[test]
    fn unknown_variant() {
        let cfg = MetricsConfig {
            entropy: "renyi".into(),
            ..Default::default()
        };
        assert!(matches!(cfg.validate(), Err(Error::UnknownVariant { .. })));
    }

    #[test]
    fn color_report_uses_all_channels_for_mean() {
        let img = RasterImage::rgb(1, 1, vec![30, 60, 90]).unwrap();
        let r = metrics_report(&img, &MetricsConfig::default()).unwrap();
        assert_eq!(r.mean, 60.0);
        assert!(r.colorfulness > 0.0);
    }
}
