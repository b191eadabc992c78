//! Contrast enhancement and quality measurement for 8-bit grayscale and RGB
//! micrographs.
//!
//! * [`imagecore`]: raster types, NetPBM/PNG/JPEG I/O, grayscale conversion.
//! * [`colorspace`]: RGB to and from HSV, XYZ, LAB, YUV, YIQ.
//! * [`metrics`]: colorfulness, entropy, RMS contrast, mean, entropy maps.
//! * [`equalize`]: histograms, global equalization, CLAHE.
//! * [`cli`]: the `mgenhance` batch front end.

pub mod cli;
pub mod colorspace;
pub mod equalize;
pub mod error;
pub mod imagecore;
pub mod metrics;

pub use error::{Error, Result};
pub use imagecore::{FloatPlane, RasterImage};
