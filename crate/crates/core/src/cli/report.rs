use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::commands::ReportFormat;
use crate::equalize::csv_err;
use crate::error::Result;
use crate::metrics::{MetricsConfig, MetricsReport};

/// Column order of the metrics CSV. Stable across versions.
pub const METRICS_COLUMNS: [&str; 8] = [
    "file",
    "space",
    "colorfulness",
    "entropy",
    "rms_contrast",
    "mean",
    "entropy_variant",
    "contrast_variant",
];

/// A report row; numeric fields are empty when the image failed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub file: String,
    pub space: String,
    pub colorfulness: Option<f64>,
    pub entropy: Option<f64>,
    pub rms_contrast: Option<f64>,
    pub mean: Option<f64>,
    pub entropy_variant: String,
    pub contrast_variant: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl From<MetricsReport> for MetricsRow {
    fn from(r: MetricsReport) -> Self {
        Self {
            file: r.file,
            space: r.space,
            colorfulness: Some(r.colorfulness),
            entropy: Some(r.entropy),
            rms_contrast: Some(r.rms_contrast),
            mean: Some(r.mean),
            entropy_variant: r.entropy_variant,
            contrast_variant: r.contrast_variant,
            error: None,
        }
    }
}

impl MetricsRow {
    pub fn error(file: &str, space: &str, config: &MetricsConfig, msg: String) -> Self {
        Self {
            file: file.to_string(),
            space: space.to_string(),
            colorfulness: None,
            entropy: None,
            rms_contrast: None,
            mean: None,
            entropy_variant: config.entropy.clone(),
            contrast_variant: config.contrast.clone(),
            error: Some(msg),
        }
    }
}

fn num(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn metrics_csv(rows: &[MetricsRow]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(METRICS_COLUMNS).map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.file.clone(),
            r.space.clone(),
            num(r.colorfulness),
            num(r.entropy),
            num(r.rms_contrast),
            num(r.mean),
            r.entropy_variant.clone(),
            r.contrast_variant.clone(),
        ])
        .map_err(csv_err)?;
    }
    w.into_inner()
        .map_err(|e| std::io::Error::other(e.to_string()).into())
}

pub fn metrics_json(rows: &[MetricsRow]) -> Result<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(rows).map_err(std::io::Error::other)?;
    out.push(b'\n');
    Ok(out)
}

pub fn write_metrics_report(rows: &[MetricsRow], format: ReportFormat, path: &Path) -> Result<()> {
    let bytes = match format {
        ReportFormat::Csv => metrics_csv(rows)?,
        ReportFormat::Json => metrics_json(rows)?,
    };
    fs::write(path, bytes)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row() -> MetricsRow {
        MetricsRow {
            file: "a.pgm".into(),
            space: "original".into(),
            colorfulness: Some(0.0),
            entropy: Some(7.5),
            rms_contrast: Some(18.25),
            mean: Some(119.0),
            entropy_variant: "histogram".into(),
            contrast_variant: "global".into(),
            error: None,
        }
    }

    #[test]
    fn csv_layout() {
        let err = MetricsRow::error("b.pgm", "xyz", &MetricsConfig::default(), "boom".into());
        let text = String::from_utf8(metrics_csv(&[row(), err]).unwrap()).unwrap();
        assert_eq!(
            text,
            "file,space,colorfulness,entropy,rms_contrast,mean,entropy_variant,contrast_variant\n\
             a.pgm,original,0,7.5,18.25,119,histogram,global\n\
             b.pgm,xyz,,,,,histogram,global\n"
        );
    }

    #[test]
    fn json_has_error_only_when_failed() {
        let err = MetricsRow::error("b.pgm", "xyz", &MetricsConfig::default(), "boom".into());
        let text = String::from_utf8(metrics_json(&[row(), err]).unwrap()).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert!(v[0].get("error").is_none());
        assert_eq!(v[0]["colorfulness"], 0.0);
        assert_eq!(v[1]["error"], "boom");
        assert!(v[1]["entropy"].is_null());
    }
}
