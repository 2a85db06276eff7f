use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn trackforge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trackforge")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = trackforge(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// simulate → sync → annotate over a short block_2x2 run; returns the
/// annotation files, sorted.
fn pipeline(dir: &Path) -> Vec<PathBuf> {
    let spec = dir.join("spec_in.json");
    std::fs::write(&spec, r#"{"kind": "block_2x2", "stage": "empty_pallets", "duration": 3.0, "seed": 11}"#).unwrap();
    let sim = dir.join("sim");
    ok(&["simulate", "--spec", p(&spec), "--out", p(&sim)]);
    let matched = dir.join("matched.jsonl");
    ok(&["sync", "--poses", p(&sim.join("poses.csv")), "--images", p(&sim.join("images.csv")), "--out", p(&matched)]);
    let ann = dir.join("ann");
    ok(&[
        "annotate",
        "--rig",
        p(&sim.join("rig.json")),
        "--models",
        p(&sim.join("models.json")),
        "--matched",
        p(&matched),
        "--out",
        p(&ann),
    ]);
    let mut files: Vec<PathBuf> = std::fs::read_dir(&ann).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    files
}

#[test]
fn full_pipeline_counts_and_scores() {
    let dir = TempDir::new().unwrap();
    let files = pipeline(dir.path());
    assert!(!files.is_empty());

    let mut args = vec!["stats", "--format", "json"];
    args.extend(files.iter().map(|f| p(f)));
    let stats: serde_json::Value = serde_json::from_str(&ok(&args)).unwrap();
    let per_camera = stats["per_camera"].as_array().unwrap();
    assert_eq!(per_camera.len(), files.len());
    for (cam, file) in per_camera.iter().zip(&files) {
        let visible = std::fs::read_to_string(file).unwrap().lines().filter(|l| l.contains("\"visible\":1")).count();
        assert_eq!(cam["instances"].as_u64().unwrap() as usize, visible, "{}", file.display());
    }

    let gt = dir.path().join("gt.txt");
    let id_map = dir.path().join("ids.json");
    ok(&["export-mot", "--annotations", p(&files[0]), "--out", p(&gt), "--id-map", p(&id_map)]);
    let report: serde_json::Value =
        serde_json::from_str(&ok(&["evaluate", "--gt", p(&gt), "--results", p(&gt)])).unwrap();
    assert_eq!(report["mota"], 1.0);
    assert_eq!(report["idf1"], 1.0);
    assert_eq!(report["hota"], 1.0);
    assert_eq!(report["id_switches"], 0);

    let table = ok(&["evaluate", "--gt", p(&gt), "--results", p(&gt), "--format", "text", "--name", "oracle"]);
    assert!(table.contains("oracle") && table.contains("1.000"));
}

#[test]
fn outputs_are_reproducible() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    let (fa, fb) = (pipeline(a.path()), pipeline(b.path()));
    assert_eq!(fa.len(), fb.len());
    for (x, y) in fa.iter().zip(&fb) {
        assert_eq!(std::fs::read(x).unwrap(), std::fs::read(y).unwrap());
    }
    for name in ["poses.csv", "images.csv", "models.json", "events.json"] {
        let read = |d: &TempDir| std::fs::read(d.path().join("sim").join(name)).unwrap();
        assert_eq!(read(&a), read(&b), "{name}");
    }
}

#[test]
fn seed_flag_overrides_spec() {
    let dir = TempDir::new().unwrap();
    let spec = dir.path().join("spec.json");
    std::fs::write(&spec, r#"{"kind": "lanes_broad", "stage": "empty_pallets", "duration": 1.0, "seed": 1}"#).unwrap();
    ok(&["simulate", "--spec", p(&spec), "--out", p(&dir.path().join("a")), "--seed", "99"]);
    let written = std::fs::read_to_string(dir.path().join("a/spec.json")).unwrap();
    assert!(written.contains("\"seed\": 99"));
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let empty = dir.path().join("empty.txt");
    std::fs::write(&empty, "").unwrap();
    let one = dir.path().join("one.txt");
    std::fs::write(&one, "0,1,10,10,20,20,1,-1,-1,-1\n").unwrap();
    assert_eq!(trackforge(&["evaluate", "--gt", p(&empty), "--results", p(&one)]).status.code(), Some(5));

    let bad_json = dir.path().join("bad.json");
    std::fs::write(&bad_json, "{").unwrap();
    let out = dir.path().join("o");
    assert_eq!(trackforge(&["simulate", "--spec", p(&bad_json), "--out", p(&out)]).status.code(), Some(3));

    let invalid = dir.path().join("invalid.json");
    std::fs::write(&invalid, r#"{"kind": "block_3x3", "stage": "empty_pallets", "duration": 1.0}"#).unwrap();
    let res = trackforge(&["simulate", "--spec", p(&invalid), "--out", p(&out)]);
    assert_eq!(res.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&res.stderr).starts_with("error: "));

    let missing = dir.path().join("nope.txt");
    assert_eq!(trackforge(&["evaluate", "--gt", p(&missing), "--results", p(&one)]).status.code(), Some(6));
    assert_eq!(trackforge(&["evaluate", "--gt", p(&one), "--results", p(&one), "--iou", "1.5"]).status.code(), Some(4));
    assert_eq!(trackforge(&["evaluate", "--bogus"]).status.code(), Some(2));
}

#[test]
fn every_subcommand_has_help() {
    for cmd in ["simulate", "sync", "annotate", "stats", "export-mot", "evaluate"] {
        let text = ok(&[cmd, "--help"]);
        assert!(text.contains("Usage:"), "{cmd}");
    }
    assert!(ok(&["--help"]).contains("export-mot"));
}

#[test]
fn config_supplies_defaults() {
    let dir = TempDir::new().unwrap();
    let gt = dir.path().join("gt.txt");
    std::fs::write(&gt, "0,1,10,10,20,20,1,-1,-1,-1\n").unwrap();
    let pred = dir.path().join("pred.txt");
    // IoU with the ground-truth box is 2/3.
    std::fs::write(&pred, "0,1,14,10,20,20,1,-1,-1,-1\n").unwrap();
    let config = dir.path().join("run.json");
    std::fs::write(&config, r#"{"iou_threshold": 0.7}"#).unwrap();
    let strict: serde_json::Value =
        serde_json::from_str(&ok(&["evaluate", "--gt", p(&gt), "--results", p(&pred), "--config", p(&config)]))
            .unwrap();
    assert_eq!(strict["mota"], -1.0);
    let loose: serde_json::Value = serde_json::from_str(&ok(&[
        "evaluate",
        "--gt",
        p(&gt),
        "--results",
        p(&pred),
        "--config",
        p(&config),
        "--iou",
        "0.5",
    ]))
    .unwrap();
    assert_eq!(loose["mota"], 1.0);

    std::fs::write(&config, r#"{"iou": 0.7}"#).unwrap();
    assert_eq!(
        trackforge(&["evaluate", "--gt", p(&gt), "--results", p(&pred), "--config", p(&config)]).status.code(),
        Some(3)
    );
}
