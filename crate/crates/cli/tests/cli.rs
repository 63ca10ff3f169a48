use std::path::Path;
use std::process::{Command, Output};

use scatter_cli::manifest::sha256_hex;

fn scatter(args: &[&str], config: &str, dir: &Path) -> Output {
    let path = dir.join("config.ini");
    std::fs::write(&path, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_scatter"))
        .args(args)
        .arg("--config")
        .arg(&path)
        .arg("--out")
        .arg(dir.join("out"))
        .env("SCATTER_THREADS", "1")
        .output()
        .unwrap()
}

fn text(b: &[u8]) -> String {
    String::from_utf8_lossy(b).into_owned()
}

fn outputs(dir: &Path, ext: &str) -> Vec<std::path::PathBuf> {
    let mut v: Vec<_> = std::fs::read_dir(dir.join("out"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.to_string_lossy().ends_with(ext))
        .collect();
    v.sort();
    v
}

const THRESHOLDS: &str = "
[run]
experiment = thresholds
seed = 3

[model]
v12 = poschl-teller
v12_strength = 2.0
v12_width = 1.0
v13 = zero
v23 = zero

[grid]
points = 512
half_extent = 64
";

#[test]
fn thresholds_of_a_single_well() {
    let dir = tempfile::tempdir().unwrap();
    let out = scatter(&["thresholds"], THRESHOLDS, dir.path());
    assert!(out.status.success(), "{}", text(&out.stderr));
    let csv = outputs(dir.path(), ".csv");
    assert_eq!(csv.len(), 1);
    let name = csv[0].file_name().unwrap().to_string_lossy().into_owned();
    assert!(name.starts_with("thresholds-") && name.ends_with(".csv"));
    let body = std::fs::read_to_string(&csv[0]).unwrap();
    let values: Vec<f64> = body
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(values.len(), 2, "{body}");
    assert!((values[0] + 1.0).abs() <= 5e-3);
    assert_eq!(values[1], 0.0);
}

#[test]
fn manifest_lists_every_output_with_checksum() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = THRESHOLDS.replace("experiment = thresholds", "experiment = spectrum")
        + "\n[spectrum]\noperator = subsystem\ncluster = y_x0\nmethod = dense\ncount = 4\n";
    let out = scatter(&["spectrum"], &cfg, dir.path());
    assert!(out.status.success(), "{}", text(&out.stderr));
    let manifest = outputs(dir.path(), ".manifest");
    assert_eq!(manifest.len(), 1);
    let m = std::fs::read_to_string(&manifest[0]).unwrap();
    assert!(m.contains("status = ok") && m.contains("anchor = ") && m.contains("wall_time_s = "));
    let files: Vec<_> = std::fs::read_dir(dir.path().join("out"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_none_or(|e| e != "manifest"))
        .collect();
    assert_eq!(files.len(), 2, "csv and ground-state dump");
    for f in files {
        let name = f.file_name().unwrap().to_string_lossy().into_owned();
        let sha = sha256_hex(&std::fs::read(&f).unwrap());
        assert!(
            m.contains(&format!("{name} = sha256:{sha}")),
            "{name} missing from\n{m}"
        );
    }
    let config_sha = sha256_hex(cfg.as_bytes());
    assert!(m.contains(&format!("sha256:{config_sha}")));
}

#[test]
fn partition_is_clean() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = THRESHOLDS
        .replace("experiment = thresholds", "experiment = partition")
        .replace("points = 512", "points = 128");
    let out = scatter(&["partition"], &cfg, dir.path());
    assert!(out.status.success(), "{}", text(&out.stderr));
    assert!(
        text(&out.stdout).contains(" 0 violations"),
        "{}",
        text(&out.stdout)
    );
}

#[test]
fn missing_grid_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = THRESHOLDS.replace("[grid]\npoints = 512\nhalf_extent = 64\n", "");
    let out = scatter(&["thresholds"], &cfg, dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(
        text(&out.stderr).contains("[grid]"),
        "{}",
        text(&out.stderr)
    );
    assert!(!dir.path().join("out").exists());
}

#[test]
fn unknown_key_exits_two_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = THRESHOLDS.replace("half_extent = 64", "half_extent = 64\npoint = 3");
    let out = scatter(&["thresholds"], &cfg, dir.path());
    assert_eq!(out.status.code(), Some(2));
    let err = text(&out.stderr);
    assert!(err.contains("line 16") && err.contains("point"), "{err}");
}

#[test]
fn runtime_failure_exits_one_and_flags_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "
[run]
experiment = evolve

[model]
v12 = zero
v23 = zero

[grid]
points = 64
half_extent = 8

[packet]
electron = 0 3 1
photon = 0 3 1

[schedule]
dt = 0.05
duration = 20
";
    let out = scatter(&["evolve"], cfg, dir.path());
    assert_eq!(out.status.code(), Some(1), "{}", text(&out.stderr));
    let m = std::fs::read_to_string(&outputs(dir.path(), ".manifest")[0]).unwrap();
    assert!(
        m.contains("status = failed") && m.contains("left the box"),
        "{m}"
    );
}

#[test]
fn min_velocity_precondition_skips_the_criterion() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "
[run]
experiment = verify-all

[verify-all]
profile = smoke
criteria = 2, 12

[cutoff]
delta = 1.5
epsilon = 0.1
mu = 0.6

[min-velocity]
theta = 0.5
";
    let out = scatter(&["verify-all"], cfg, dir.path());
    let stdout = text(&out.stdout);
    assert!(out.status.success(), "{stdout}{}", text(&out.stderr));
    assert!(stdout.contains("criterion  2 PASS"), "{stdout}");
    assert!(
        stdout.contains("criterion 12 SKIP")
            && stdout.contains("delta = 1.5 is not below theta = 0.5"),
        "{stdout}"
    );
}

#[test]
fn same_seed_gives_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "[run]\nexperiment = verify-all\nseed = 5\n[verify-all]\nprofile = smoke\ncriteria = 1, 6, 7\n";
    let mut runs = Vec::new();
    for name in ["a", "b"] {
        let sub = dir.path().join(name);
        std::fs::create_dir_all(&sub).unwrap();
        let out = scatter(&["verify-all"], cfg, &sub);
        assert!(out.status.success(), "{}", text(&out.stderr));
        runs.push(
            outputs(&sub, ".csv")
                .into_iter()
                .map(|p| {
                    (
                        p.file_name().unwrap().to_owned(),
                        std::fs::read(&p).unwrap(),
                    )
                })
                .collect::<Vec<_>>(),
        );
    }
    assert_eq!(runs[0].len(), 4);
    assert_eq!(runs[0], runs[1]);
}
