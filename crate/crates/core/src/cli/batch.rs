//! `batch`: run a JSON job list and record everything in a manifest.
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "output_dir": "out",
//!   "format": "csv",
//!   "jobs": [
//!     { "command": "metrics", "inputs": ["*.pgm"], "spaces": ["original", "xyz", "yuv"] },
//!     { "command": "clahe", "inputs": ["a.pgm"], "clip_limit": 2.0, "tiles": "8x8" }
//!   ]
//! }
//! ```
//!
//! Relative input paths resolve against the config file's directory. Job
//! `i` writes into `<output_dir>/job-<iii>-<command>/`; `manifest.json` at
//! the top of the output directory lists every job in index order.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::commands::{
    cmd_clahe, cmd_convert, cmd_entropy_map, cmd_equalize, cmd_metrics, parse_tiles,
    resolve_inputs, ConvertOptions, ConvertTarget, ImageOut, MetricSpace, Outcome, ReportFormat,
    RunContext,
};
use crate::equalize::ClaheParams;
use crate::error::{Error, Result};
use crate::metrics::{GlcmParams, MetricsConfig, DEFAULT_ENTROPY_MAP_RADIUS, DEFAULT_PATCH_RADIUS};

pub const SCHEMA_VERSION: u32 = 1;
pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatchConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub output_dir: Option<String>,
    #[serde(default)]
    pub format: Option<ReportFormat>,
    #[serde(default)]
    pub image_format: Option<ImageOut>,
    #[serde(default)]
    pub jobs: Vec<JobSpec>,
}

fn default_spaces() -> Vec<String> {
    vec!["original".into()]
}

fn default_entropy() -> String {
    "histogram".into()
}

fn default_contrast() -> String {
    "global".into()
}

fn default_patch_radius() -> usize {
    DEFAULT_PATCH_RADIUS
}

fn default_clip_limit() -> f64 {
    2.0
}

fn default_tiles() -> String {
    "8x8".into()
}

fn default_radius() -> usize {
    DEFAULT_ENTROPY_MAP_RADIUS
}

/// One job of the batch, tagged by `command`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case", deny_unknown_fields)]
pub enum JobSpec {
    Convert {
        inputs: Vec<String>,
        space: String,
        #[serde(default)]
        inverse: bool,
        #[serde(default)]
        planes: bool,
    },
    Metrics {
        inputs: Vec<String>,
        #[serde(default = "default_spaces")]
        spaces: Vec<String>,
        #[serde(default = "default_entropy")]
        entropy: String,
        #[serde(default = "default_contrast")]
        contrast: String,
        #[serde(default = "default_patch_radius")]
        patch_radius: usize,
        #[serde(default)]
        glcm: GlcmParams,
    },
    Equalize {
        inputs: Vec<String>,
    },
    Clahe {
        inputs: Vec<String>,
        #[serde(default = "default_clip_limit")]
        clip_limit: f64,
        #[serde(default = "default_tiles")]
        tiles: String,
    },
    EntropyMap {
        inputs: Vec<String>,
        #[serde(default = "default_radius")]
        radius: usize,
    },
}

impl JobSpec {
    pub fn command(&self) -> &'static str {
        match self {
            JobSpec::Convert { .. } => "convert",
            JobSpec::Metrics { .. } => "metrics",
            JobSpec::Equalize { .. } => "equalize",
            JobSpec::Clahe { .. } => "clahe",
            JobSpec::EntropyMap { .. } => "entropy-map",
        }
    }

    pub fn inputs(&self) -> &[String] {
        match self {
            JobSpec::Convert { inputs, .. }
            | JobSpec::Metrics { inputs, .. }
            | JobSpec::Equalize { inputs }
            | JobSpec::Clahe { inputs, .. }
            | JobSpec::EntropyMap { inputs, .. } => inputs,
        }
    }

    fn prepare(&self) -> Result<Prepared> {
        Ok(match self {
            JobSpec::Convert {
                space,
                inverse,
                planes,
                ..
            } => Prepared::Convert(ConvertOptions {
                target: space.parse::<ConvertTarget>()?,
                inverse: *inverse,
                planes: *planes,
            }),
            JobSpec::Metrics {
                spaces,
                entropy,
                contrast,
                patch_radius,
                glcm,
                ..
            } => {
                let config = MetricsConfig {
                    entropy: entropy.clone(),
                    contrast: contrast.clone(),
                    glcm: *glcm,
                    patch_radius: *patch_radius,
                };
                config.validate()?;
                let spaces = spaces
                    .iter()
                    .map(|s| s.parse::<MetricSpace>())
                    .collect::<Result<Vec<_>>>()?;
                if spaces.is_empty() {
                    return Err(Error::InvalidParams("metrics job lists no spaces".into()));
                }
                Prepared::Metrics(spaces, config)
            }
            JobSpec::Equalize { .. } => Prepared::Equalize,
            JobSpec::Clahe {
                clip_limit, tiles, ..
            } => {
                let (tx, ty) = parse_tiles(tiles)?;
                Prepared::Clahe(ClaheParams::new(*clip_limit, tx, ty)?)
            }
            JobSpec::EntropyMap { radius, .. } => {
                if *radius < 1 {
                    return Err(Error::InvalidParams("radius must be >= 1".into()));
                }
                Prepared::EntropyMap(*radius)
            }
        })
    }
}

enum Prepared {
    Convert(ConvertOptions),
    Metrics(Vec<MetricSpace>, MetricsConfig),
    Equalize,
    Clahe(ClaheParams),
    EntropyMap(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JobStatus {
    Ok,
    Failed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JobRecord {
    pub index: usize,
    pub command: String,
    pub spec: JobSpec,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub notices: Vec<String>,
    pub errors: Vec<String>,
    pub status: JobStatus,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub format: ReportFormat,
    pub image_format: ImageOut,
    pub jobs: Vec<JobRecord>,
    pub failed_jobs: usize,
}

/// Output location and format overrides from the command line.
#[derive(Clone, Debug, Default)]
pub struct BatchOverrides {
    pub output_dir: Option<PathBuf>,
    pub format: Option<ReportFormat>,
    pub image_format: Option<ImageOut>,
}

#[derive(Clone, Debug)]
pub struct BatchOutcome {
    pub output_dir: PathBuf,
    pub manifest: Manifest,
}

/// Reads and fully validates a config without touching the file system
/// beyond reading it.
pub fn load_config(path: &Path) -> Result<BatchConfig> {
    let text = fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::FileNotFound(path.to_path_buf()),
        _ => Error::Io(e),
    })?;
    let config: BatchConfig = serde_json::from_str(&text)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    if config.schema_version != SCHEMA_VERSION {
        return Err(Error::Config(format!(
            "schema_version {} is not supported (expected {SCHEMA_VERSION})",
            config.schema_version
        )));
    }
    for (i, job) in config.jobs.iter().enumerate() {
        job.prepare()
            .map_err(|e| Error::Config(format!("job {i} ({}): {e}", job.command())))?;
        if job.inputs().is_empty() {
            return Err(Error::Config(format!(
                "job {i} ({}): no inputs",
                job.command()
            )));
        }
    }
    Ok(config)
}

fn relative_display(path: &Path, root: &Path) -> String {
    path.strip_prefix(root)
        .unwrap_or(path)
        .to_string_lossy()
        .replace('\\', "/")
}

fn run_job(index: usize, spec: &JobSpec, base: &Path, root: &Path, ctx: &RunContext) -> JobRecord {
    let dir = root.join(format!("job-{index:03}-{}", spec.command()));
    let job_ctx = RunContext {
        output_dir: dir,
        ..ctx.clone()
    };
    let (inputs, mut unresolved) = resolve_inputs(spec.inputs(), Some(base));
    let prepared = spec.prepare().expect("validated by load_config");
    let result = match &prepared {
        Prepared::Convert(opts) => cmd_convert(&job_ctx, &inputs, *opts),
        Prepared::Metrics(spaces, config) => cmd_metrics(&job_ctx, &inputs, spaces, config),
        Prepared::Equalize => cmd_equalize(&job_ctx, &inputs),
        Prepared::Clahe(params) => cmd_clahe(&job_ctx, &inputs, params),
        Prepared::EntropyMap(radius) => cmd_entropy_map(&job_ctx, &inputs, *radius),
    };
    let outcome = result.unwrap_or_else(|e| Outcome {
        failures: vec![e.to_string()],
        ..Default::default()
    });
    unresolved.extend(outcome.failures);
    JobRecord {
        index,
        command: spec.command().to_string(),
        spec: spec.clone(),
        inputs: inputs.iter().map(|i| i.display.clone()).collect(),
        outputs: outcome
            .outputs
            .iter()
            .map(|p| relative_display(p, root))
            .collect(),
        notices: outcome.notices,
        status: if unresolved.is_empty() {
            JobStatus::Ok
        } else {
            JobStatus::Failed
        },
        errors: unresolved,
    }
}

/// Runs every job (concurrently) and writes the manifest. Config errors
/// are returned before anything is written.
pub fn run_batch(config_path: &Path, overrides: &BatchOverrides) -> Result<BatchOutcome> {
    let config = load_config(config_path)?;
    let base = config_path
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_default();
    let root = match (&overrides.output_dir, &config.output_dir) {
        (Some(dir), _) => dir.clone(),
        (None, Some(dir)) => base.join(dir),
        (None, None) => base.join("batch-out"),
    };
    let ctx = RunContext {
        output_dir: root.clone(),
        format: overrides.format.or(config.format).unwrap_or_default(),
        image_format: overrides
            .image_format
            .or(config.image_format)
            .unwrap_or_default(),
    };
    fs::create_dir_all(&root)?;

    let jobs: Vec<JobRecord> = config
        .jobs
        .par_iter()
        .enumerate()
        .map(|(i, spec)| run_job(i, spec, &base, &root, &ctx))
        .collect();
    let manifest = Manifest {
        schema_version: SCHEMA_VERSION,
        format: ctx.format,
        image_format: ctx.image_format,
        failed_jobs: jobs
            .iter()
            .filter(|j| j.status == JobStatus::Failed)
            .count(),
        jobs,
    };
    let mut bytes = serde_json::to_vec_pretty(&manifest).map_err(std::io::Error::other)?;
    bytes.push(b'\n');
    fs::write(root.join(MANIFEST_NAME), bytes)?;
    Ok(BatchOutcome {
        output_dir: root,
        manifest,
    })
}
