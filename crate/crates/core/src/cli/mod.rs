//! Command-line front end (`mgenhance`).
//!
//! Exit codes: 0 when every input succeeded, 1 when any input or job
//! failed, 2 for usage and configuration errors (nothing is written).

pub mod batch;
pub mod commands;
pub mod planes;
pub mod report;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use batch::{run_batch, BatchConfig, BatchOverrides, JobSpec, Manifest};
pub use commands::{
    cmd_clahe, cmd_convert, cmd_entropy_map, cmd_equalize, cmd_metrics, parse_tiles,
    resolve_inputs, ConvertOptions, ConvertTarget, ImageOut, InputFile, MetricSpace, Outcome,
    ReportFormat, RunContext,
};

use crate::equalize::ClaheParams;
use crate::error::{Error, Result};
use crate::metrics::{GlcmParams, MetricsConfig, DEFAULT_ENTROPY_MAP_RADIUS, DEFAULT_PATCH_RADIUS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "mgenhance",
    version,
    about = "Micrograph enhancement and image metrics"
)]
pub struct Cli {
    /// Directory for all outputs (created if missing).
    #[arg(long, global = true)]
    pub output_dir: Option<PathBuf>,

    /// Report format for metrics.
    #[arg(long, global = true, value_enum)]
    pub format: Option<ReportFormat>,

    /// Container for written images.
    #[arg(long, global = true, value_enum)]
    pub image_format: Option<ImageOut>,

    /// Suppress notices; failures are still reported.
    #[arg(long, short, global = true)]
    pub quiet: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Convert to grayscale or a color space (or back with --inverse).
    Convert(ConvertArgs),
    /// Colorfulness, entropy, RMS contrast and mean per image and space.
    Metrics(MetricsArgs),
    /// Global histogram equalization.
    Equalize(InputArgs),
    /// Contrast-limited adaptive histogram equalization.
    Clahe(ClaheArgs),
    /// Local entropy map over a disk neighbourhood.
    EntropyMap(EntropyMapArgs),
    /// Run the jobs of a JSON config and write a manifest.
    Batch(BatchArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Input images or glob patterns.
    #[arg(required = true)]
    pub inputs: Vec<String>,
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// gray, rgb, hsv, xyz, lab, yuv or yiq.
    #[arg(long)]
    pub space: String,
    /// Treat inputs as data in --space and convert back to RGB.
    #[arg(long)]
    pub inverse: bool,
    /// Also write exact float planes next to the 8-bit image.
    #[arg(long)]
    pub planes: bool,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Comma-separated: original, gray or a color space name.
    #[arg(long, value_delimiter = ',', default_value = "original")]
    pub space: Vec<String>,
    #[arg(long, default_value = "histogram")]
    pub entropy: String,
    #[arg(long, default_value = "global")]
    pub contrast: String,
    /// Patch radius for --contrast patch.
    #[arg(long, default_value_t = DEFAULT_PATCH_RADIUS)]
    pub patch_radius: usize,
    #[arg(long, default_value_t = 1)]
    pub glcm_distance: usize,
    #[arg(long, default_value_t = 256)]
    pub glcm_levels: usize,
}

#[derive(Debug, Args)]
pub struct ClaheArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value_t = 2.0)]
    pub clip_limit: f64,
    /// Tile grid as WxH (or N for NxN).
    #[arg(long, default_value = "8x8")]
    pub tiles: String,
}

#[derive(Debug, Args)]
pub struct EntropyMapArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value_t = DEFAULT_ENTROPY_MAP_RADIUS)]
    pub radius: usize,
}

#[derive(Debug, Args)]
pub struct BatchArgs {
    /// JSON job config.
    pub config: PathBuf,
}

fn context(cli: &Cli) -> RunContext {
    RunContext {
        output_dir: cli.output_dir.clone().unwrap_or_else(|| PathBuf::from(".")),
        format: cli.format.unwrap_or_default(),
        image_format: cli.image_format.unwrap_or_default(),
    }
}

fn report(quiet: bool, notices: &[String], failures: &[String]) -> i32 {
    if !quiet {
        for n in notices {
            eprintln!("{n}");
        }
    }
    for f in failures {
        eprintln!("error: {f}");
    }
    if failures.is_empty() {
        EXIT_OK
    } else {
        EXIT_FAILED
    }
}

/// Validates arguments that clap cannot check, then runs one command.
fn run_simple(cli: &Cli) -> Result<(Outcome, Vec<String>)> {
    let ctx = context(cli);
    let resolve = |args: &InputArgs| resolve_inputs(&args.inputs, None);
    let (inputs, unresolved, outcome) = match &cli.command {
        Command::Convert(a) => {
            let opts = ConvertOptions {
                target: a.space.parse()?,
                inverse: a.inverse,
                planes: a.planes,
            };
            let (inputs, unresolved) = resolve(&a.input);
            (inputs.len(), unresolved, cmd_convert(&ctx, &inputs, opts)?)
        }
        Command::Metrics(a) => {
            let config = MetricsConfig {
                entropy: a.entropy.clone(),
                contrast: a.contrast.clone(),
                glcm: GlcmParams {
                    distance: a.glcm_distance,
                    levels: a.glcm_levels,
                },
                patch_radius: a.patch_radius,
            };
            config.validate()?;
            let spaces = a
                .space
                .iter()
                .map(|s| s.trim().parse::<MetricSpace>())
                .collect::<Result<Vec<_>>>()?;
            let (inputs, unresolved) = resolve(&a.input);
            (
                inputs.len(),
                unresolved,
                cmd_metrics(&ctx, &inputs, &spaces, &config)?,
            )
        }
        Command::Equalize(a) => {
            let (inputs, unresolved) = resolve(a);
            (inputs.len(), unresolved, cmd_equalize(&ctx, &inputs)?)
        }
        Command::Clahe(a) => {
            let (tx, ty) = parse_tiles(&a.tiles)?;
            let params = ClaheParams::new(a.clip_limit, tx, ty)?;
            let (inputs, unresolved) = resolve(&a.input);
            (inputs.len(), unresolved, cmd_clahe(&ctx, &inputs, &params)?)
        }
        Command::EntropyMap(a) => {
            if a.radius < 1 {
                return Err(Error::InvalidParams("--radius must be >= 1".into()));
            }
            let (inputs, unresolved) = resolve(&a.input);
            (
                inputs.len(),
                unresolved,
                cmd_entropy_map(&ctx, &inputs, a.radius)?,
            )
        }
        Command::Batch(_) => unreachable!("handled by run"),
    };
    log::debug!("processed {inputs} input(s)");
    Ok((outcome, unresolved))
}

fn is_usage_error(e: &Error) -> bool {
    matches!(
        e,
        Error::InvalidParams(_) | Error::UnknownVariant { .. } | Error::Config(_)
    )
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    if let Command::Batch(args) = &cli.command {
        let overrides = BatchOverrides {
            output_dir: cli.output_dir.clone(),
            format: cli.format,
            image_format: cli.image_format,
        };
        return match run_batch(&args.config, &overrides) {
            Ok(done) => {
                let mut failures = Vec::new();
                let mut notices = Vec::new();
                for job in &done.manifest.jobs {
                    let tag = format!("job {} ({})", job.index, job.command);
                    notices.extend(job.notices.iter().map(|n| format!("{tag}: {n}")));
                    failures.extend(job.errors.iter().map(|e| format!("{tag}: {e}")));
                }
                if !cli.quiet {
                    eprintln!(
                        "wrote {}",
                        done.output_dir.join(batch::MANIFEST_NAME).display()
                    );
                }
                report(cli.quiet, &notices, &failures)
            }
            Err(e) => {
                eprintln!("error: {e}");
                if is_usage_error(&e) || matches!(e, Error::FileNotFound(_)) {
                    EXIT_USAGE
                } else {
                    EXIT_FAILED
                }
            }
        };
    }
    match run_simple(&cli) {
        Ok((outcome, mut unresolved)) => {
            unresolved.extend(outcome.failures);
            report(cli.quiet, &outcome.notices, &unresolved)
        }
        Err(e) => {
            eprintln!("error: {e}");
            if is_usage_error(&e) {
                EXIT_USAGE
            } else {
                EXIT_FAILED
            }
        }
    }
}
