//! The built-in color spaces. All of them read and write RGB in [0, 1].

use std::sync::OnceLock;

use super::{ColorSpace, SpaceId};

pub(crate) type Mat3 = [[f64; 3]; 3];

pub(crate) fn mul(m: &Mat3, v: [f64; 3]) -> [f64; 3] {
    [
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
    ]
}

pub(crate) fn invert(m: &Mat3) -> Mat3 {
    let c00 = m[1][1] * m[2][2] - m[1][2] * m[2][1];
    let c01 = m[1][2] * m[2][0] - m[1][0] * m[2][2];
    let c02 = m[1][0] * m[2][1] - m[1][1] * m[2][0];
    let det = m[0][0] * c00 + m[0][1] * c01 + m[0][2] * c02;
    assert!(det.abs() > 1e-12, "singular color matrix");
    let inv = 1.0 / det;
    [
        [
            c00 * inv,
            (m[0][2] * m[2][1] - m[0][1] * m[2][2]) * inv,
            (m[0][1] * m[1][2] - m[0][2] * m[1][1]) * inv,
        ],
        [
            c01 * inv,
            (m[0][0] * m[2][2] - m[0][2] * m[2][0]) * inv,
            (m[0][2] * m[1][0] - m[0][0] * m[1][2]) * inv,
        ],
        [
            c02 * inv,
            (m[0][1] * m[2][0] - m[0][0] * m[2][1]) * inv,
            (m[0][0] * m[1][1] - m[0][1] * m[1][0]) * inv,
        ],
    ]
}

/// Identity; exists so RGB can be selected by name like any other space.
pub struct Rgb;

impl ColorSpace for Rgb {
    fn id(&self) -> SpaceId {
        SpaceId::Rgb
    }

    fn from_rgb(&self, rgb: [f64; 3]) -> [f64; 3] {
        rgb
    }

    fn to_rgb(&self, c: [f64; 3]) -> [f64; 3] {
        c
    }

    fn nominal_ranges(&self) -> [(f64, f64); 3] {
        [(0.0, 1.0); 3]
    }
}

/// Hexcone HSV with hue in turns, `[0, 1)`. Achromatic pixels get hue 0.
pub struct Hsv;

impl ColorSpace for Hsv {
    fn id(&self) -> SpaceId {
        SpaceId::Hsv
    }

    fn from_rgb(&self, [r, g, b]: [f64; 3]) -> [f64; 3] {
        let max = r.max(g).max(b);
        let min = r.min(g).min(b);
        let delta = max - min;
        let s = if max > 0.0 { delta / max } else { 0.0 };
        let mut h = if delta <= 0.0 {
            0.0
        } else if max == r {
            ((g - b) / delta).rem_euclid(6.0) / 6.0
        } else if max == g {
            ((b - r) / delta + 2.0) / 6.0
        } else {
            ((r - g) / delta + 4.0) / 6.0
        };
        if h >= 1.0 {
            h -= 1.0;
        }
        [h, s, max]
    }

    fn to_rgb(&self, [h, s, v]: [f64; 3]) -> [f64; 3] {
        let h6 = h.rem_euclid(1.0) * 6.0;
        let sector = h6.floor();
        let f = h6 - sector;
        let p = v * (1.0 - s);
        let q = v * (1.0 - s * f);
        let t = v * (1.0 - s * (1.0 - f));
        match sector as i32 {
            0 => [v, t, p],
            1 => [q, v, p],
            2 => [p, v, t],
            3 => [p, q, v],
            4 => [t, p, v],
            _ => [v, p, q],
        }
    }

    fn nominal_ranges(&self) -> [(f64, f64); 3] {
        [(0.0, 1.0); 3]
    }
}

/// sRGB/D65 matrix applied to gamma-linearized channels.
pub const SRGB_TO_XYZ: Mat3 = [
    [0.412453, 0.357580, 0.180423],
    [0.212671, 0.715160, 0.072169],
    [0.019334, 0.119193, 0.950227],
];

/// CIE D65 reference white used for LAB normalization.
pub const D65_WHITE: [f64; 3] = [0.95047, 1.0, 1.08883];

fn xyz_inverse() -> &'static Mat3 {
    static INV: OnceLock<Mat3> = OnceLock::new();
    INV.get_or_init(|| invert(&SRGB_TO_XYZ))
}

pub(crate) fn srgb_to_linear(c: f64) -> f64 {
    if c <= 0.04045 {
        c / 12.92
    } else {
        ((c + 0.055) / 1.055).powf(2.4)
    }
}

pub(crate) fn linear_to_srgb(c: f64) -> f64 {
    if c <= 0.04045 / 12.92 {
        c * 12.92
    } else {
        1.055 * c.powf(1.0 / 2.4) - 0.055
    }
}

pub struct Xyz;

impl ColorSpace for Xyz {
    fn id(&self) -> SpaceId {
        SpaceId::Xyz
    }

    fn from_rgb(&self, rgb: [f64; 3]) -> [f64; 3] {
        mul(&SRGB_TO_XYZ, rgb.map(srgb_to_linear))
    }

    fn to_rgb(&self, xyz: [f64; 3]) -> [f64; 3] {
        mul(xyz_inverse(), xyz).map(linear_to_srgb)
    }

    fn nominal_ranges(&self) -> [(f64, f64); 3] {
        [(0.0, 1.0891); 3]
    }
}

const LAB_DELTA: f64 = 6.0 / 29.0;

fn lab_f(t: f64) -> f64 {
    if t > LAB_DELTA * LAB_DELTA * LAB_DELTA {
        t.cbrt()
    } else {
        t / (3.0 * LAB_DELTA * LAB_DELTA) + 4.0 / 29.0
    }
}

fn lab_f_inv(f: f64) -> f64 {
    if f > LAB_DELTA {
        f * f * f
    } else {
        3.0 * LAB_DELTA * LAB_DELTA * (f - 4.0 / 29.0)
    }
}

/// CIE 1976 L*a*b* relative to D65, composed through [`Xyz`].
pub struct Lab;

impl ColorSpace for Lab {
    fn id(&self) -> SpaceId {
        SpaceId::Lab
    }

    fn from_rgb(&self, rgb: [f64; 3]) -> [f64; 3] {
        let [x, y, z] = Xyz.from_rgb(rgb);
        let fx = lab_f(x / D65_WHITE[0]);
        let fy = lab_f(y / D65_WHITE[1]);
        let fz = lab_f(z / D65_WHITE[2]);
        [116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)]
    }

    fn to_rgb(&self, [l, a, b]: [f64; 3]) -> [f64; 3] {
        let fy = (l + 16.0) / 116.0;
        let fx = fy + a / 500.0;
        let fz = fy - b / 200.0;
        Xyz.to_rgb([
            D65_WHITE[0] * lab_f_inv(fx),
            D65_WHITE[1] * lab_f_inv(fy),
            D65_WHITE[2] * lab_f_inv(fz),
        ])
    }

    fn nominal_ranges(&self) -> [(f64, f64); 3] {
        [(0.0, 100.0), (-128.0, 127.0), (-128.0, 127.0)]
    }
}

const LUMA: [f64; 3] = crate::imagecore::LUMA_WEIGHTS;
const U_MAX: f64 = 0.436;
const V_MAX: f64 = 0.615;

/// BT.601 YUV. The chroma rows are `U = U_MAX/(1-Kb) (B - Y)` and
/// `V = V_MAX/(1-Kr) (R - Y)`, so gray inputs have exactly zero chroma.
pub fn yuv_matrix() -> &'static Mat3 {
    static M: OnceLock<Mat3> = OnceLock::new();
    M.get_or_init(|| {
        let ku = U_MAX / (1.0 - LUMA[2]);
        let kv = V_MAX / (1.0 - LUMA[0]);
        [
            LUMA,
            [-ku * LUMA[0], -ku * LUMA[1], U_MAX],
            [V_MAX, -kv * LUMA[1], -kv * LUMA[2]],
        ]
    })
}

pub struct Yuv;

impl ColorSpace for Yuv {
    fn id(&self) -> SpaceId {
        SpaceId::Yuv
    }

    fn from_rgb(&self, [r, g, b]: [f64; 3]) -> [f64; 3] {
        // difference form of the matrix rows: chroma of R=G=B is exactly 0
        let ku = U_MAX / (1.0 - LUMA[2]);
        let kv = V_MAX / (1.0 - LUMA[0]);
        [
            LUMA[0] * r + LUMA[1] * g + LUMA[2] * b,
            ku * (LUMA[0] * (b - r) + LUMA[1] * (b - g)),
            kv * (LUMA[1] * (r - g) + LUMA[2] * (r - b)),
        ]
    }

    fn to_rgb(&self, yuv: [f64; 3]) -> [f64; 3] {
        static INV: OnceLock<Mat3> = OnceLock::new();
        mul(INV.get_or_init(|| invert(yuv_matrix())), yuv)
    }

    fn nominal_ranges(&self) -> [(f64, f64); 3] {
        [(0.0, 1.0), (-U_MAX, U_MAX), (-V_MAX, V_MAX)]
    }
}

pub const RGB_TO_YIQ: Mat3 = [
    [0.299, 0.587, 0.114],
    [0.5959, -0.2746, -0.3213],
    [0.2115, -0.5227, 0.3112],
];

pub struct Yiq;

impl ColorSpace for Yiq {
    fn id(&self) -> SpaceId {
        SpaceId::Yiq
    }

    fn from_rgb(&self, [r, g, b]: [f64; 3]) -> [f64; 3] {
        // I and Q rows each sum to zero; written as differences so gray
        // input yields exact zeros
        let m = &RGB_TO_YIQ;
        [
            m[0][0] * r + m[0][1] * g + m[0][2] * b,
            -m[1][1] * (r - g) - m[1][2] * (r - b),
            m[2][0] * (r - g) + m[2][2] * (b - g),
        ]
    }

    fn to_rgb(&self, yiq: [f64; 3]) -> [f64; 3] {
        static INV: OnceLock<Mat3> = OnceLock::new();
        mul(INV.get_or_init(|| invert(&RGB_TO_YIQ)), yiq)
    }

    fn nominal_ranges(&self) -> [(f64, f64); 3] {
        [(0.0, 1.0), (-0.5957, 0.5957), (-0.5226, 0.5226)]
    }
}
