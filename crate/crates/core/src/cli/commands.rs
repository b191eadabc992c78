//! The individual subcommands. Each processes every input independently;
//! a failing input is recorded in the [`Outcome`] and the rest continue.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use super::planes::{decode_planes, is_planes_file, write_planes};
use super::report::{write_metrics_report, MetricsRow};
use crate::colorspace::{
    self, planes_to_raster, raster_to_planes, rgb_planes_to_raster, ColorPlanes, SpaceId,
};
use crate::equalize::{clahe, equalize_global, histogram, ClaheParams};
use crate::error::{Error, Result};
use crate::imagecore::{load_image, quantize_u8, save_image, to_grayscale, RasterImage};
use crate::metrics::{entropy_map, metrics_report, MetricsConfig};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    #[default]
    Csv,
    Json,
}

impl ReportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ReportFormat::Csv => "csv",
            ReportFormat::Json => "json",
        }
    }
}

/// Container for written images: NetPBM (`.pgm` / `.ppm` by channel count)
/// or PNG.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ImageOut {
    #[default]
    Pnm,
    Png,
}

impl ImageOut {
    fn extension(self, channels: usize) -> &'static str {
        match (self, channels) {
            (ImageOut::Png, _) => "png",
            (ImageOut::Pnm, 1) => "pgm",
            (ImageOut::Pnm, _) => "ppm",
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunContext {
    pub output_dir: PathBuf,
    pub format: ReportFormat,
    pub image_format: ImageOut,
}

impl RunContext {
    pub fn new(output_dir: impl Into<PathBuf>) -> Self {
        Self {
            output_dir: output_dir.into(),
            format: ReportFormat::default(),
            image_format: ImageOut::default(),
        }
    }
}

/// An input file plus the name it is reported under.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InputFile {
    pub path: PathBuf,
    pub display: String,
}

/// What a command produced.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub outputs: Vec<PathBuf>,
    pub notices: Vec<String>,
    pub failures: Vec<String>,
}

impl Outcome {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }

    fn fail(&mut self, input: &InputFile, err: impl std::fmt::Display) {
        self.failures.push(format!("{}: {err}", input.display));
    }

    fn notice(&mut self, input: &InputFile, msg: impl std::fmt::Display) {
        self.notices.push(format!("{}: {msg}", input.display));
    }
}

fn has_glob_meta(s: &str) -> bool {
    s.contains(['*', '?', '['])
}

/// Expands glob patterns (sorted) and resolves relative paths against
/// `base`. Patterns without matches are reported as failures.
pub fn resolve_inputs(patterns: &[String], base: Option<&Path>) -> (Vec<InputFile>, Vec<String>) {
    let join = |p: &str| match base {
        Some(b) if Path::new(p).is_relative() => b.join(p),
        _ => PathBuf::from(p),
    };
    let mut files = Vec::new();
    let mut failures = Vec::new();
    for pattern in patterns {
        if !has_glob_meta(pattern) {
            files.push(InputFile {
                path: join(pattern),
                display: pattern.clone(),
            });
            continue;
        }
        let full = join(pattern);
        let matches = glob::glob(&full.to_string_lossy())
            .map(|paths| {
                let mut v: Vec<PathBuf> = paths.filter_map(|p| p.ok()).collect();
                v.sort();
                v
            })
            .unwrap_or_default();
        if matches.is_empty() {
            failures.push(format!("{pattern}: no files match"));
        }
        for path in matches {
            let display = match base {
                Some(b) => path.strip_prefix(b).unwrap_or(&path),
                None => path.as_path(),
            }
            .to_string_lossy()
            .replace('\\', "/");
            files.push(InputFile { path, display });
        }
    }
    (files, failures)
}

/// Hands out `<stem>_<suffix>` names, disambiguating repeated stems.
#[derive(Default)]
struct Names {
    seen: HashMap<String, usize>,
}

impl Names {
    fn stem(&mut self, input: &InputFile) -> String {
        let stem = input
            .path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "image".into());
        let n = self.seen.entry(stem.clone()).or_insert(0);
        *n += 1;
        if *n == 1 {
            stem
        } else {
            format!("{stem}_{n}")
        }
    }
}

fn prepare_output_dir(ctx: &RunContext) -> Result<()> {
    fs::create_dir_all(&ctx.output_dir)?;
    Ok(())
}

fn write_image(
    ctx: &RunContext,
    img: &RasterImage,
    stem: &str,
    suffix: &str,
    out: &mut Outcome,
) -> Result<()> {
    let path = ctx.output_dir.join(format!(
        "{stem}_{suffix}.{}",
        ctx.image_format.extension(img.channels())
    ));
    save_image(img, &path)?;
    out.outputs.push(path);
    Ok(())
}

fn load_gray(input: &InputFile, out: &mut Outcome) -> Result<RasterImage> {
    let img = load_image(&input.path)?;
    if !img.is_gray() {
        out.notice(input, "color input converted to grayscale");
    }
    Ok(to_grayscale(&img))
}

/// Target of `convert`: a color space or plain grayscale.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConvertTarget {
    Gray,
    Space(SpaceId),
}

impl std::str::FromStr for ConvertTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("gray") {
            Ok(ConvertTarget::Gray)
        } else {
            colorspace::registry()
                .get(s)
                .map(|cs| ConvertTarget::Space(cs.id()))
                .map_err(|_| Error::UnknownVariant {
                    kind: "conversion target",
                    name: s.to_string(),
                    available: format!("gray, {}", colorspace::registry().names().join(", ")),
                })
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConvertOptions {
    pub target: ConvertTarget,
    pub inverse: bool,
    pub planes: bool,
}

pub fn cmd_convert(
    ctx: &RunContext,
    inputs: &[InputFile],
    opts: ConvertOptions,
) -> Result<Outcome> {
    prepare_output_dir(ctx)?;
    let mut out = Outcome::default();
    let mut names = Names::default();
    for input in inputs {
        let stem = names.stem(input);
        if let Err(e) = convert_one(ctx, input, &stem, opts, &mut out) {
            out.fail(input, e);
        }
    }
    Ok(out)
}

fn convert_one(
    ctx: &RunContext,
    input: &InputFile,
    stem: &str,
    opts: ConvertOptions,
    out: &mut Outcome,
) -> Result<()> {
    let space = match opts.target {
        ConvertTarget::Gray => {
            if opts.inverse {
                return Err(Error::InvalidParams(
                    "gray conversion has no inverse".into(),
                ));
            }
            let img = load_image(&input.path)?;
            let ext = ctx.image_format.extension(1);
            let same_container = input
                .path
                .extension()
                .is_some_and(|e| e.eq_ignore_ascii_case(ext));
            if img.is_gray() && same_container {
                let dest = ctx.output_dir.join(format!("{stem}_gray.{ext}"));
                fs::copy(&input.path, &dest)?;
                out.outputs.push(dest);
                return Ok(());
            }
            return write_image(ctx, &to_grayscale(&img), stem, "gray", out);
        }
        ConvertTarget::Space(space) => space,
    };
    let converter = colorspace::registry().by_id(space);

    if opts.inverse {
        let bytes = fs::read(&input.path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => Error::FileNotFound(input.path.clone()),
            _ => Error::Io(e),
        })?;
        let planes = if is_planes_file(&bytes) {
            decode_planes(&bytes)?
        } else {
            raster_to_planes(&load_image(&input.path)?, space)
        };
        let recovered = colorspace::inverse(converter, &planes)?;
        if recovered.clamped > 0 {
            out.notice(
                input,
                format!(
                    "{} out-of-gamut components clamped to [0, 1]",
                    recovered.clamped
                ),
            );
        }
        return write_image(
            ctx,
            &rgb_planes_to_raster(&recovered.rgb)?,
            stem,
            "rgb",
            out,
        );
    }

    let img = load_image(&input.path)?;
    let converted = colorspace::forward(converter, &ColorPlanes::from_raster(&img))?;
    write_image(ctx, &planes_to_raster(&converted), stem, space.name(), out)?;
    if opts.planes {
        let path = ctx
            .output_dir
            .join(format!("{stem}_{}.planes", space.name()));
        write_planes(&converted, &path)?;
        out.outputs.push(path);
    }
    Ok(())
}

/// Which representation of an image `metrics` measures.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MetricSpace {
    /// As loaded.
    Original,
    Gray,
    Space(SpaceId),
}

impl MetricSpace {
    pub fn name(self) -> &'static str {
        match self {
            MetricSpace::Original => "original",
            MetricSpace::Gray => "gray",
            MetricSpace::Space(s) => s.name(),
        }
    }

    fn apply(self, img: &RasterImage) -> Result<RasterImage> {
        Ok(match self {
            MetricSpace::Original => img.clone(),
            MetricSpace::Gray => to_grayscale(img),
            MetricSpace::Space(space) => {
                let cs = colorspace::registry().by_id(space);
                planes_to_raster(&colorspace::forward(cs, &ColorPlanes::from_raster(img))?)
            }
        })
    }
}

impl std::str::FromStr for MetricSpace {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "original" => Ok(MetricSpace::Original),
            "gray" => Ok(MetricSpace::Gray),
            _ => colorspace::registry()
                .get(s)
                .map(|cs| MetricSpace::Space(cs.id()))
                .map_err(|_| Error::UnknownVariant {
                    kind: "metrics space",
                    name: s.to_string(),
                    available: format!(
                        "original, gray, {}",
                        colorspace::registry().names().join(", ")
                    ),
                }),
        }
    }
}

/// Writes one report with a row per (input, space). Rows are ordered by
/// input, then by space in the order given.
pub fn cmd_metrics(
    ctx: &RunContext,
    inputs: &[InputFile],
    spaces: &[MetricSpace],
    config: &MetricsConfig,
) -> Result<Outcome> {
    config.validate()?;
    prepare_output_dir(ctx)?;
    let mut out = Outcome::default();
    let mut rows = Vec::new();
    for input in inputs {
        let loaded = load_image(&input.path);
        for &space in spaces {
            let row = loaded.as_ref().map_err(|e| e.to_string()).and_then(|img| {
                space
                    .apply(img)
                    .and_then(|converted| metrics_report(&converted, config))
                    .map_err(|e| e.to_string())
            });
            match row {
                Ok(mut report) => {
                    report.file = input.display.clone();
                    report.space = space.name().to_string();
                    rows.push(MetricsRow::from(report));
                }
                Err(msg) => {
                    out.fail(input, format!("[{}] {msg}", space.name()));
                    rows.push(MetricsRow::error(&input.display, space.name(), config, msg));
                }
            }
        }
    }
    let path = ctx
        .output_dir
        .join(format!("metrics.{}", ctx.format.extension()));
    write_metrics_report(&rows, ctx.format, &path)?;
    out.outputs.push(path);
    Ok(out)
}

fn write_histogram(img: &RasterImage, path: PathBuf, out: &mut Outcome) -> Result<()> {
    let file = fs::File::create(&path)?;
    histogram(img)?.write_csv(std::io::BufWriter::new(file))?;
    out.outputs.push(path);
    Ok(())
}

/// Global equalization plus `bin,count,cdf` tables before and after.
pub fn cmd_equalize(ctx: &RunContext, inputs: &[InputFile]) -> Result<Outcome> {
    prepare_output_dir(ctx)?;
    let mut out = Outcome::default();
    let mut names = Names::default();
    for input in inputs {
        let stem = names.stem(input);
        let result = (|| {
            let gray = load_gray(input, &mut out)?;
            let eq = equalize_global(&gray)?;
            if let Some(w) = eq.warning {
                out.notice(input, format!("warning: {w}"));
            }
            write_image(ctx, &eq.image, &stem, "equalized", &mut out)?;
            write_histogram(
                &gray,
                ctx.output_dir.join(format!("{stem}_hist_before.csv")),
                &mut out,
            )?;
            write_histogram(
                &eq.image,
                ctx.output_dir.join(format!("{stem}_hist_after.csv")),
                &mut out,
            )
        })();
        if let Err(e) = result {
            out.fail(input, e);
        }
    }
    Ok(out)
}

pub fn cmd_clahe(ctx: &RunContext, inputs: &[InputFile], params: &ClaheParams) -> Result<Outcome> {
    params.validate()?;
    prepare_output_dir(ctx)?;
    let mut out = Outcome::default();
    let mut names = Names::default();
    for input in inputs {
        let stem = names.stem(input);
        let result = load_gray(input, &mut out)
            .and_then(|gray| clahe(&gray, params))
            .and_then(|img| write_image(ctx, &img, &stem, "clahe", &mut out));
        if let Err(e) = result {
            out.fail(input, e);
        }
    }
    Ok(out)
}

/// Local entropy rescaled so that 8 bits maps to 255.
pub fn entropy_raster(gray: &RasterImage, radius: usize) -> Result<RasterImage> {
    let plane = entropy_map(gray, radius)?;
    RasterImage::gray(
        plane.width(),
        plane.height(),
        plane
            .data()
            .iter()
            .map(|&bits| quantize_u8(bits * 255.0 / 8.0))
            .collect(),
    )
}

pub fn cmd_entropy_map(ctx: &RunContext, inputs: &[InputFile], radius: usize) -> Result<Outcome> {
    if radius < 1 {
        return Err(Error::InvalidParams("radius must be >= 1".into()));
    }
    prepare_output_dir(ctx)?;
    let mut out = Outcome::default();
    let mut names = Names::default();
    for input in inputs {
        let stem = names.stem(input);
        let result = load_gray(input, &mut out)
            .and_then(|gray| entropy_raster(&gray, radius))
            .and_then(|img| write_image(ctx, &img, &stem, "entropy", &mut out));
        if let Err(e) = result {
            out.fail(input, e);
        }
    }
    Ok(out)
}

/// Parses `WxH` (or a single `N` for a square grid).
pub fn parse_tiles(s: &str) -> Result<(usize, usize)> {
    let bad = || Error::InvalidParams(format!("tile grid '{s}' is not of the form WxH"));
    let (w, h) = match s.split_once(['x', 'X']) {
        Some((w, h)) => (w.trim(), h.trim()),
        None => (s.trim(), s.trim()),
    };
    let w: usize = w.parse().map_err(|_| bad())?;
    let h: usize = h.parse().map_err(|_| bad())?;
    if w == 0 || h == 0 {
        return Err(bad());
    }
    Ok((w, h))
}
