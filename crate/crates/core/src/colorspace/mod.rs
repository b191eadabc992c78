//! RGB to and from HSV, XYZ, LAB, YUV and YIQ.
//!
//! Every space implements [`ColorSpace`] and is registered by name in a
//! [`ColorSpaceRegistry`]; callers select one at runtime with
//! [`ColorSpaceRegistry::get`]. Conversions work on RGB normalized to
//! `[0, 1]` in double precision.
//!
//! Nominal component ranges used by [`planes_to_raster`] (part of the
//! stable CLI contract):
//!
//! | space | component 0 | component 1 | component 2 |
//! |-------|-------------|-------------|-------------|
//! | rgb   | [0, 1]      | [0, 1]      | [0, 1]      |
//! | hsv   | H [0, 1] turns | S [0, 1] | V [0, 1]    |
//! | xyz   | [0, 1.0891] | [0, 1.0891] | [0, 1.0891] |
//! | lab   | L [0, 100]  | a [-128, 127] | b [-128, 127] |
//! | yuv   | Y [0, 1]    | U [-0.436, 0.436] | V [-0.615, 0.615] |
//! | yiq   | Y [0, 1]    | I [-0.5957, 0.5957] | Q [-0.5226, 0.5226] |

pub mod spaces;

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::imagecore::{quantize_u8, FloatPlane, RasterImage};

/// Identifies the color space a set of planes is expressed in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SpaceId {
    Rgb,
    Hsv,
    Xyz,
    Lab,
    Yuv,
    Yiq,
}

impl SpaceId {
    pub const ALL: [SpaceId; 6] = [
        SpaceId::Rgb,
        SpaceId::Hsv,
        SpaceId::Xyz,
        SpaceId::Lab,
        SpaceId::Yuv,
        SpaceId::Yiq,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SpaceId::Rgb => "rgb",
            SpaceId::Hsv => "hsv",
            SpaceId::Xyz => "xyz",
            SpaceId::Lab => "lab",
            SpaceId::Yuv => "yuv",
            SpaceId::Yiq => "yiq",
        }
    }
}

impl fmt::Display for SpaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SpaceId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        SpaceId::ALL
            .into_iter()
            .find(|id| id.name() == lower)
            .ok_or_else(|| Error::UnknownVariant {
                kind: "color space",
                name: s.to_string(),
                available: SpaceId::ALL.map(SpaceId::name).join(", "),
            })
    }
}

/// A color model convertible to and from normalized RGB, one pixel at a time.
pub trait ColorSpace: Send + Sync {
    fn id(&self) -> SpaceId;

    fn name(&self) -> &'static str {
        self.id().name()
    }

    /// Converts one RGB triple in `[0, 1]`.
    #[allow(clippy::wrong_self_convention)]
    fn from_rgb(&self, rgb: [f64; 3]) -> [f64; 3];

    /// Converts back to RGB without clamping.
    fn to_rgb(&self, components: [f64; 3]) -> [f64; 3];

    /// Per-component `(low, high)` mapped onto `[0, 255]` by
    /// [`planes_to_raster`].
    fn nominal_ranges(&self) -> [(f64, f64); 3];
}

/// Name-keyed set of color spaces.
pub struct ColorSpaceRegistry {
    spaces: Vec<Box<dyn ColorSpace>>,
}

impl ColorSpaceRegistry {
    pub fn empty() -> Self {
        Self { spaces: Vec::new() }
    }

    /// RGB, HSV, XYZ, LAB, YUV and YIQ.
    pub fn with_builtins() -> Self {
        let mut reg = Self::empty();
        reg.register(Box::new(spaces::Rgb));
        reg.register(Box::new(spaces::Hsv));
        reg.register(Box::new(spaces::Xyz));
        reg.register(Box::new(spaces::Lab));
        reg.register(Box::new(spaces::Yuv));
        reg.register(Box::new(spaces::Yiq));
        reg
    }

    /// Adds a space, replacing any earlier entry with the same name.
    pub fn register(&mut self, space: Box<dyn ColorSpace>) {
        self.spaces.retain(|s| s.name() != space.name());
        self.spaces.push(space);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.spaces.iter().map(|s| s.name()).collect()
    }

    pub fn get(&self, name: &str) -> Result<&dyn ColorSpace> {
        let lower = name.to_ascii_lowercase();
        self.spaces
            .iter()
            .find(|s| s.name() == lower)
            .map(|s| s.as_ref())
            .ok_or_else(|| Error::UnknownVariant {
                kind: "color space",
                name: name.to_string(),
                available: self.names().join(", "),
            })
    }

    pub fn by_id(&self, id: SpaceId) -> &dyn ColorSpace {
        self.spaces
            .iter()
            .find(|s| s.id() == id)
            .map(|s| s.as_ref())
            .unwrap_or_else(|| builtin(id))
    }
}

impl Default for ColorSpaceRegistry {
    fn default() -> Self {
        Self::with_builtins()
    }
}

/// Shared registry of the built-in spaces.
pub fn registry() -> &'static ColorSpaceRegistry {
    static REG: OnceLock<ColorSpaceRegistry> = OnceLock::new();
    REG.get_or_init(ColorSpaceRegistry::with_builtins)
}

fn builtin(id: SpaceId) -> &'static dyn ColorSpace {
    match id {
        SpaceId::Rgb => &spaces::Rgb,
        SpaceId::Hsv => &spaces::Hsv,
        SpaceId::Xyz => &spaces::Xyz,
        SpaceId::Lab => &spaces::Lab,
        SpaceId::Yuv => &spaces::Yuv,
        SpaceId::Yiq => &spaces::Yiq,
    }
}

/// Three equally sized planes tagged with the space they are expressed in.
#[derive(Clone, Debug, PartialEq)]
pub struct ColorPlanes {
    space: SpaceId,
    planes: [FloatPlane; 3],
}

impl ColorPlanes {
    pub fn new(space: SpaceId, planes: [FloatPlane; 3]) -> Result<Self> {
        if !(planes[0].same_shape(&planes[1]) && planes[0].same_shape(&planes[2])) {
            return Err(Error::DimensionMismatch(format!(
                "planes are {}x{}, {}x{}, {}x{}",
                planes[0].width(),
                planes[0].height(),
                planes[1].width(),
                planes[1].height(),
                planes[2].width(),
                planes[2].height()
            )));
        }
        Ok(Self { space, planes })
    }

    /// Normalizes an 8-bit raster into RGB planes in `[0, 1]`; gray input is
    /// replicated into three equal planes.
    pub fn from_raster(img: &RasterImage) -> Self {
        let rgb = img.to_rgb();
        let (w, h) = (img.width(), img.height());
        let plane = |c: usize| FloatPlane::from_fn(w, h, |x, y| rgb.pixel(x, y)[c] as f64 / 255.0);
        Self {
            space: SpaceId::Rgb,
            planes: [plane(0), plane(1), plane(2)],
        }
    }

    pub fn space(&self) -> SpaceId {
        self.space
    }

    pub fn planes(&self) -> &[FloatPlane; 3] {
        &self.planes
    }

    pub fn width(&self) -> usize {
        self.planes[0].width()
    }

    pub fn height(&self) -> usize {
        self.planes[0].height()
    }

    pub fn pixel(&self, i: usize) -> [f64; 3] {
        [
            self.planes[0].data()[i],
            self.planes[1].data()[i],
            self.planes[2].data()[i],
        ]
    }

    fn map_pixels(&self, space: SpaceId, mut f: impl FnMut([f64; 3]) -> [f64; 3]) -> ColorPlanes {
        let n = self.width() * self.height();
        let mut out = [
            Vec::with_capacity(n),
            Vec::with_capacity(n),
            Vec::with_capacity(n),
        ];
        for i in 0..n {
            let c = f(self.pixel(i));
            for k in 0..3 {
                out[k].push(if c[k].is_finite() { c[k] } else { 0.0 });
            }
        }
        let (w, h) = (self.width(), self.height());
        let [a, b, c] = out;
        ColorPlanes {
            space,
            planes: [
                FloatPlane::new(w, h, a).expect("sized"),
                FloatPlane::new(w, h, b).expect("sized"),
                FloatPlane::new(w, h, c).expect("sized"),
            ],
        }
    }
}

/// Result of converting back to RGB: clamped planes plus how many
/// components fell outside `[0, 1]`.
#[derive(Clone, Debug)]
pub struct RgbRecovery {
    pub rgb: ColorPlanes,
    pub clamped: usize,
}

const GAMUT_SLACK: f64 = 1e-9;

/// Converts RGB planes into `space`.
pub fn forward(space: &dyn ColorSpace, rgb: &ColorPlanes) -> Result<ColorPlanes> {
    if rgb.space != SpaceId::Rgb {
        return Err(Error::SpaceTagMismatch {
            expected: SpaceId::Rgb.name(),
            actual: rgb.space.name(),
        });
    }
    Ok(rgb.map_pixels(space.id(), |p| space.from_rgb(p)))
}

/// Converts planes in `space` back to RGB without clamping.
pub fn inverse_unclamped(space: &dyn ColorSpace, planes: &ColorPlanes) -> Result<ColorPlanes> {
    if planes.space != space.id() {
        return Err(Error::SpaceTagMismatch {
            expected: space.name(),
            actual: planes.space.name(),
        });
    }
    Ok(planes.map_pixels(SpaceId::Rgb, |p| space.to_rgb(p)))
}

/// Converts planes in `space` back to RGB, clamping into `[0, 1]` and
/// counting out-of-gamut components.
pub fn inverse(space: &dyn ColorSpace, planes: &ColorPlanes) -> Result<RgbRecovery> {
    let raw = inverse_unclamped(space, planes)?;
    let mut clamped = 0;
    let rgb = raw.map_pixels(SpaceId::Rgb, |p| {
        p.map(|c| {
            if !(-GAMUT_SLACK..=1.0 + GAMUT_SLACK).contains(&c) {
                clamped += 1;
            }
            c.clamp(0.0, 1.0)
        })
    });
    Ok(RgbRecovery { rgb, clamped })
}

macro_rules! conversion_pair {
    ($fwd:ident, $inv:ident, $space:expr) => {
        pub fn $fwd(rgb: &ColorPlanes) -> Result<ColorPlanes> {
            forward(builtin($space), rgb)
        }

        pub fn $inv(planes: &ColorPlanes) -> Result<ColorPlanes> {
            inverse(builtin($space), planes).map(|r| r.rgb)
        }
    };
}

conversion_pair!(rgb_to_hsv, hsv_to_rgb, SpaceId::Hsv);
conversion_pair!(rgb_to_xyz, xyz_to_rgb, SpaceId::Xyz);
conversion_pair!(rgb_to_lab, lab_to_rgb, SpaceId::Lab);
conversion_pair!(rgb_to_yuv, yuv_to_rgb, SpaceId::Yuv);
conversion_pair!(rgb_to_yiq, yiq_to_rgb, SpaceId::Yiq);

/// Rescales every component from its nominal range onto `[0, 255]`.
pub fn planes_to_raster(cp: &ColorPlanes) -> RasterImage {
    let ranges = registry().by_id(cp.space).nominal_ranges();
    let n = cp.width() * cp.height();
    let mut data = Vec::with_capacity(n * 3);
    for i in 0..n {
        let p = cp.pixel(i);
        for k in 0..3 {
            let (lo, hi) = ranges[k];
            data.push(quantize_u8((p[k] - lo) / (hi - lo) * 255.0));
        }
    }
    RasterImage::rgb(cp.width(), cp.height(), data).expect("sized")
}

/// Inverse of [`planes_to_raster`]: reads 8-bit samples as nominal-range
/// components of `space`.
pub fn raster_to_planes(img: &RasterImage, space: SpaceId) -> ColorPlanes {
    let ranges = registry().by_id(space).nominal_ranges();
    let rgb = img.to_rgb();
    let (w, h) = (img.width(), img.height());
    let plane = |c: usize| {
        let (lo, hi) = ranges[c];
        FloatPlane::from_fn(w, h, |x, y| {
            lo + rgb.pixel(x, y)[c] as f64 / 255.0 * (hi - lo)
        })
    };
    ColorPlanes {
        space,
        planes: [plane(0), plane(1), plane(2)],
    }
}

/// Quantizes RGB planes in `[0, 1]` back to an 8-bit raster.
pub fn rgb_planes_to_raster(rgb: &ColorPlanes) -> Result<RasterImage> {
    if rgb.space != SpaceId::Rgb {
        return Err(Error::SpaceTagMismatch {
            expected: SpaceId::Rgb.name(),
            actual: rgb.space.name(),
        });
    }
    Ok(planes_to_raster(rgb))
}
