use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use micrograph_enhance::colorspace::{self, ColorPlanes};
use micrograph_enhance::equalize::{clahe, ClaheParams};
use micrograph_enhance::imagecore::{encode_pnm, load_image};
use micrograph_enhance::RasterImage;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mgenhance"))
}

fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data")
}

fn run(args: &[&str], out: &Path) -> Output {
    bin()
        .args(args)
        .arg("--output-dir")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn write_image(dir: &Path, name: &str, img: &RasterImage) -> String {
    let path = dir.join(name);
    let channels = if name.ends_with(".pgm") { 1 } else { 3 };
    fs::write(&path, encode_pnm(img, channels).unwrap()).unwrap();
    path.to_string_lossy().into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn noise(w: usize, h: usize, seed: u32) -> RasterImage {
    let mut s = seed;
    let data = (0..w * h)
        .map(|_| {
            s = s.wrapping_mul(1_664_525).wrapping_add(1_013_904_223);
            (s >> 24) as u8
        })
        .collect();
    RasterImage::gray(w, h, data).unwrap()
}

#[test]
fn convert_gray_of_gray_is_byte_identical_copy() {
    let tmp = tempfile::tempdir().unwrap();
    let input = data_dir().join("cells.pgm");
    let o = run(
        &["convert", input.to_str().unwrap(), "--space", "gray"],
        tmp.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(
        fs::read(tmp.path().join("cells_gray.pgm")).unwrap(),
        fs::read(&input).unwrap()
    );
}

#[test]
fn convert_achromatic_to_yuv_has_flat_128_chroma() {
    let tmp = tempfile::tempdir().unwrap();
    let data: Vec<u8> = (0..64u8).flat_map(|v| [v * 4, v * 4, v * 4]).collect();
    let input = write_image(
        tmp.path(),
        "ramp.ppm",
        &RasterImage::rgb(8, 8, data).unwrap(),
    );
    let o = run(&["convert", &input, "--space", "yuv"], tmp.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let out = load_image(tmp.path().join("ramp_yuv.ppm")).unwrap();
    for px in out.data().chunks(3) {
        assert_eq!((px[1], px[2]), (128, 128));
    }
}

#[test]
fn convert_xyz_and_back_through_planes_within_one_count() {
    let tmp = tempfile::tempdir().unwrap();
    let input = data_dir().join("stained.ppm");
    let o = run(
        &[
            "convert",
            input.to_str().unwrap(),
            "--space",
            "xyz",
            "--planes",
        ],
        tmp.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let planes = tmp.path().join("stained_xyz.planes");
    let back = tmp.path().join("back");
    let o = run(
        &[
            "convert",
            planes.to_str().unwrap(),
            "--space",
            "xyz",
            "--inverse",
        ],
        &back,
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let a = load_image(&input).unwrap();
    let b = load_image(back.join("stained_xyz_rgb.ppm")).unwrap();
    let worst = a
        .data()
        .iter()
        .zip(b.data())
        .map(|(x, y)| x.abs_diff(*y))
        .max()
        .unwrap();
    assert!(worst <= 1, "max channel error {worst}");
}

#[test]
fn convert_inverse_rejects_space_mismatch_on_planes() {
    let tmp = tempfile::tempdir().unwrap();
    let input = data_dir().join("stained.ppm");
    run(
        &[
            "convert",
            input.to_str().unwrap(),
            "--space",
            "lab",
            "--planes",
        ],
        tmp.path(),
    );
    let planes = tmp.path().join("stained_lab.planes");
    let o = run(
        &[
            "convert",
            planes.to_str().unwrap(),
            "--space",
            "xyz",
            "--inverse",
        ],
        &tmp.path().join("back"),
    );
    assert!(!o.status.success());
}

#[test]
fn metrics_header_is_golden() {
    let tmp = tempfile::tempdir().unwrap();
    let input = data_dir().join("cells.pgm");
    let o = run(&["metrics", input.to_str().unwrap()], tmp.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(tmp.path().join("metrics.csv")).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "file,space,colorfulness,entropy,rms_contrast,mean,entropy_variant,contrast_variant"
    );
}

#[test]
fn metrics_constant_images_have_zero_entropy_and_contrast() {
    let tmp = tempfile::tempdir().unwrap();
    let a = write_image(
        tmp.path(),
        "a.pgm",
        &RasterImage::filled(8, 8, 1, 40).unwrap(),
    );
    let b = write_image(
        tmp.path(),
        "b.pgm",
        &RasterImage::filled(5, 7, 1, 200).unwrap(),
    );
    let o = run(&["metrics", &a, &b], tmp.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let mut rdr = csv::Reader::from_path(tmp.path().join("metrics.csv")).unwrap();
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 2);
    for r in &rows {
        assert_eq!(&r[2], "0");
        assert_eq!(&r[3], "0");
        assert_eq!(&r[4], "0");
    }
}

#[test]
fn metrics_entropy_variant_switches_column() {
    let tmp = tempfile::tempdir().unwrap();
    let input = data_dir().join("cells.pgm");
    let path = input.to_str().unwrap();
    let o = run(
        &["metrics", path, "--format", "json"],
        &tmp.path().join("h"),
    );
    assert!(o.status.success());
    let o = run(
        &["metrics", path, "--entropy", "glcm", "--format", "json"],
        &tmp.path().join("g"),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let read = |d: &str| -> serde_json::Value {
        serde_json::from_slice(&fs::read(tmp.path().join(d).join("metrics.json")).unwrap()).unwrap()
    };
    let (h, g) = (read("h"), read("g"));
    assert_eq!(h[0]["entropy_variant"], "histogram");
    assert_eq!(g[0]["entropy_variant"], "glcm");
    let gray = load_image(&input).unwrap();
    let expected = micrograph_enhance::metrics::glcm_entropy(
        &gray,
        &micrograph_enhance::metrics::GlcmParams::default(),
    )
    .unwrap();
    assert_eq!(g[0]["entropy"].as_f64().unwrap(), expected);
    assert_ne!(h[0]["entropy"], g[0]["entropy"]);
}

#[test]
fn metrics_failing_image_yields_error_row_and_nonzero_exit() {
    let tmp = tempfile::tempdir().unwrap();
    let good = data_dir().join("cells.pgm");
    let bad = tmp.path().join("broken.pgm");
    fs::write(&bad, b"P5\n4 4\n255\nxx").unwrap();
    let o = run(
        &["metrics", good.to_str().unwrap(), bad.to_str().unwrap()],
        tmp.path(),
    );
    assert_eq!(o.status.code(), Some(1));
    let text = fs::read_to_string(tmp.path().join("metrics.csv")).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().nth(2).unwrap().contains(",,,,"));
}

#[test]
fn unknown_variant_is_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let input = data_dir().join("cells.pgm");
    let o = run(
        &["metrics", input.to_str().unwrap(), "--entropy", "renyi"],
        tmp.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("glcm"));
}

#[test]
fn equalize_ramp_reaches_both_ends_and_writes_histograms() {
    let tmp = tempfile::tempdir().unwrap();
    let data: Vec<u8> = (0..51 * 4).map(|i| 100 + (i % 51) as u8).collect();
    let input = write_image(
        tmp.path(),
        "ramp.pgm",
        &RasterImage::gray(51, 4, data).unwrap(),
    );
    let o = run(&["equalize", &input], tmp.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let out = load_image(tmp.path().join("ramp_equalized.pgm")).unwrap();
    assert_eq!(*out.data().iter().min().unwrap(), 0);
    assert_eq!(*out.data().iter().max().unwrap(), 255);
    for name in ["ramp_hist_before.csv", "ramp_hist_after.csv"] {
        let text = fs::read_to_string(tmp.path().join(name)).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("bin,count,cdf"));
        assert_eq!(lines.count(), 256);
    }
}

#[test]
fn equalize_hand_example() {
    let tmp = tempfile::tempdir().unwrap();
    let img = RasterImage::gray(2, 2, vec![0, 0, 128, 255]).unwrap();
    let input = write_image(tmp.path(), "hand.pgm", &img);
    let o = run(&["equalize", &input], tmp.path());
    assert!(o.status.success());
    let out = load_image(tmp.path().join("hand_equalized.pgm")).unwrap();
    assert_eq!(out.data(), &[0, 0, 128, 255]);
}

#[test]
fn equalize_constant_warns_and_copies() {
    let tmp = tempfile::tempdir().unwrap();
    let input = data_dir().join("flat.pgm");
    let o = run(&["equalize", input.to_str().unwrap()], tmp.path());
    assert!(o.status.success());
    assert!(stderr(&o).contains("warning"));
    assert_eq!(
        fs::read(tmp.path().join("flat_equalized.pgm")).unwrap(),
        fs::read(&input).unwrap()
    );
    let q = run(
        &["equalize", input.to_str().unwrap(), "--quiet"],
        tmp.path(),
    );
    assert!(q.status.success());
    assert!(q.stderr.is_empty());
}

#[test]
fn clahe_defaults_match_library() {
    let tmp = tempfile::tempdir().unwrap();
    let img = noise(64, 64, 9);
    let input = write_image(tmp.path(), "n.pgm", &img);
    let o = run(&["clahe", &input], tmp.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let out = load_image(tmp.path().join("n_clahe.pgm")).unwrap();
    assert_eq!(out, clahe(&img, &ClaheParams::default()).unwrap());
}

#[test]
fn clahe_single_tile_without_clipping_is_scaled_cdf() {
    let tmp = tempfile::tempdir().unwrap();
    let img = noise(30, 20, 4);
    let input = write_image(tmp.path(), "n.pgm", &img);
    let o = run(
        &["clahe", &input, "--tiles", "1x1", "--clip-limit", "1e9"],
        tmp.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let out = load_image(tmp.path().join("n_clahe.pgm")).unwrap();
    let mut cdf = [0u64; 256];
    for &v in img.data() {
        cdf[v as usize] += 1;
    }
    for v in 1..256 {
        cdf[v] += cdf[v - 1];
    }
    let n = img.data().len() as f64;
    for (a, b) in img.data().iter().zip(out.data()) {
        assert_eq!(*b as f64, (cdf[*a as usize] as f64 * 255.0 / n).round());
    }
}

#[test]
fn clahe_too_small_names_minimum() {
    let tmp = tempfile::tempdir().unwrap();
    let input = write_image(tmp.path(), "s.pgm", &noise(4, 4, 1));
    let o = run(&["clahe", &input, "--tiles", "8x8"], tmp.path());
    assert!(!o.status.success());
    assert!(stderr(&o).contains("8x8 pixels"), "{}", stderr(&o));
    assert!(!tmp.path().join("s_clahe.pgm").exists());
}

#[test]
fn entropy_map_constant_is_black() {
    let tmp = tempfile::tempdir().unwrap();
    let input = data_dir().join("flat.pgm");
    let o = run(&["entropy-map", input.to_str().unwrap()], tmp.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let out = load_image(tmp.path().join("flat_entropy.pgm")).unwrap();
    assert!(out.data().iter().all(|&v| v == 0));
}

#[test]
fn entropy_map_checkerboard_matches_brute_force() {
    let tmp = tempfile::tempdir().unwrap();
    let (w, h, r) = (12usize, 10usize, 2isize);
    let data: Vec<u8> = (0..w * h)
        .map(|i| if (i % w + i / w) % 2 == 0 { 0 } else { 255 })
        .collect();
    let img = RasterImage::gray(w, h, data).unwrap();
    let input = write_image(tmp.path(), "cb.pgm", &img);
    let o = run(&["entropy-map", &input, "--radius", "2"], tmp.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let out = load_image(tmp.path().join("cb_entropy.pgm")).unwrap();
    let reflect = |i: isize, n: isize| {
        let mut i = i;
        while i < 0 || i >= n {
            i = if i < 0 { -i } else { 2 * (n - 1) - i };
        }
        i as usize
    };
    for y in 0..h as isize {
        for x in 0..w as isize {
            let mut counts = [0f64; 256];
            let mut n = 0.0;
            for dy in -r..=r {
                for dx in -r..=r {
                    if dx * dx + dy * dy <= r * r {
                        let sx = reflect(x + dx, w as isize);
                        let sy = reflect(y + dy, h as isize);
                        counts[img.data()[sy * w + sx] as usize] += 1.0;
                        n += 1.0;
                    }
                }
            }
            let bits: f64 = counts
                .iter()
                .filter(|&&c| c > 0.0)
                .map(|&c| -(c / n) * (c / n).log2())
                .sum();
            let expected = (bits * 255.0 / 8.0).round() as u8;
            let got = out.data()[y as usize * w + x as usize];
            assert_eq!(got, expected, "({x},{y})");
            assert!(got > 0);
        }
    }
}

#[test]
fn missing_input_fails_but_others_are_written() {
    let tmp = tempfile::tempdir().unwrap();
    let good = data_dir().join("cells.pgm");
    let o = run(
        &["clahe", good.to_str().unwrap(), "/nonexistent/x.pgm"],
        tmp.path(),
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(tmp.path().join("cells_clahe.pgm").exists());
}

fn batch_config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("batch.json");
    fs::write(&path, text).unwrap();
    path
}

#[test]
fn batch_empty_job_list() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = batch_config(tmp.path(), r#"{"schema_version": 1, "jobs": []}"#);
    let out = tmp.path().join("out");
    let o = run(&["batch", cfg.to_str().unwrap()], &out);
    assert!(o.status.success(), "{}", stderr(&o));
    let manifest: serde_json::Value =
        serde_json::from_slice(&fs::read(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["jobs"].as_array().unwrap().len(), 0);
    assert_eq!(manifest["failed_jobs"], 0);
}

#[test]
fn batch_malformed_config_writes_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    for text in [
        r#"{"schema_version": 1, "jobs": [{"command": "clahe""#,
        r#"{"schema_version": 9, "jobs": []}"#,
        r#"{"schema_version": 1, "jobs": [{"command": "clahe", "inputs": ["a.pgm"], "clip_limit": -1}]}"#,
    ] {
        let cfg = batch_config(tmp.path(), text);
        let o = run(&["batch", cfg.to_str().unwrap()], &out);
        assert_eq!(o.status.code(), Some(2), "{text}");
        assert!(!out.exists(), "{text}");
    }
}

#[test]
fn batch_sweep_of_four_images_by_three_spaces() {
    let tmp = tempfile::tempdir().unwrap();
    for name in ["cells.pgm", "stained.ppm", "flat.pgm", "gradient.png"] {
        fs::copy(data_dir().join(name), tmp.path().join(name)).unwrap();
    }
    let cfg = batch_config(
        tmp.path(),
        r#"{"schema_version": 1, "jobs": [{"command": "metrics",
            "inputs": ["cells.pgm", "stained.ppm", "flat.pgm", "gradient.png"],
            "spaces": ["original", "xyz", "yuv"]}]}"#,
    );
    let out = tmp.path().join("out");
    let o = run(&["batch", cfg.to_str().unwrap()], &out);
    assert!(o.status.success(), "{}", stderr(&o));
    let mut rdr = csv::Reader::from_path(out.join("job-000-metrics/metrics.csv")).unwrap();
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 12);
    let spaces: Vec<&str> = rows.iter().map(|r| &r[1]).take(3).collect();
    assert_eq!(spaces, ["original", "xyz", "yuv"]);
}

#[test]
fn batch_job_failure_recorded_and_exit_nonzero() {
    let tmp = tempfile::tempdir().unwrap();
    fs::copy(data_dir().join("cells.pgm"), tmp.path().join("cells.pgm")).unwrap();
    let cfg = batch_config(
        tmp.path(),
        r#"{"schema_version": 1, "jobs": [
            {"command": "equalize", "inputs": ["cells.pgm"]},
            {"command": "clahe", "inputs": ["missing.pgm"]}
        ]}"#,
    );
    let out = tmp.path().join("out");
    let o = run(&["batch", cfg.to_str().unwrap()], &out);
    assert_eq!(o.status.code(), Some(1));
    let manifest: serde_json::Value =
        serde_json::from_slice(&fs::read(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["failed_jobs"], 1);
    assert_eq!(manifest["jobs"][0]["status"], "ok");
    assert_eq!(manifest["jobs"][1]["status"], "failed");
    assert_eq!(
        manifest["jobs"][0]["outputs"][0],
        "job-000-equalize/cells_equalized.pgm"
    );
}

#[test]
fn color_input_to_gray_command_gets_notice() {
    let tmp = tempfile::tempdir().unwrap();
    let input = data_dir().join("stained.ppm");
    let o = run(
        &["clahe", input.to_str().unwrap(), "--tiles", "2x2"],
        tmp.path(),
    );
    assert!(o.status.success());
    assert!(stderr(&o).contains("grayscale"));
    let out = load_image(tmp.path().join("stained_clahe.pgm")).unwrap();
    assert!(out.is_gray());
}

#[test]
fn planes_sidecar_layout() {
    let tmp = tempfile::tempdir().unwrap();
    let img = RasterImage::rgb(2, 1, vec![255, 0, 0, 0, 0, 255]).unwrap();
    let input = write_image(tmp.path(), "two.ppm", &img);
    let o = run(
        &["convert", &input, "--space", "lab", "--planes"],
        tmp.path(),
    );
    assert!(o.status.success());
    let bytes = fs::read(tmp.path().join("two_lab.planes")).unwrap();
    let header = b"MGPLANES 1 lab 2 1\n";
    assert!(bytes.starts_with(header));
    assert_eq!(bytes.len(), header.len() + 6 * 8);
    let first = f64::from_le_bytes(bytes[header.len()..header.len() + 8].try_into().unwrap());
    let lab = colorspace::rgb_to_lab(&ColorPlanes::from_raster(&img)).unwrap();
    assert_eq!(first, lab.pixel(0)[0]);
}
