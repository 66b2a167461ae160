use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(dir: &Path, args: &[&str], config: &str) -> Output {
    std::fs::write(dir.join("cfg.json"), config).unwrap();
    let mut full = vec![args[0], "cfg.json"];
    full.extend_from_slice(&args[1..]);
    Command::new(env!("CARGO_BIN_EXE_bloch-fiber"))
        .args(&full)
        .current_dir(dir)
        .output()
        .unwrap()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn verify_mathieu_defaults_pass() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["verify"], r#"{"model": "mathieu", "p": 1, "q": 3}"#);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = read_json(&dir.path().join("report.json"));
    assert_eq!(report["passed"], true);
    for check in report["checks"].as_array().unwrap() {
        assert!(check["value"].as_f64().unwrap() <= check["tolerance"].as_f64().unwrap());
    }
}

#[test]
fn verify_other_models_pass() {
    for cfg in [
        r#"{"model": "hofstadter", "p": 1, "q": 3, "L": 16}"#,
        r#"{"model": "chain", "potential": [1.0, -1.0]}"#,
        r#"{"model": "finite_group", "orders": [2, 3]}"#,
    ] {
        let dir = tempfile::tempdir().unwrap();
        let out = run(dir.path(), &["verify"], cfg);
        assert_eq!(out.status.code(), Some(0), "{cfg}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn verify_names_the_wandering_failure() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["verify"], r#"{"model": "mathieu", "p": 1, "q": 3, "candidates": [[0, 0]]}"#);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("wandering"));
    let report = read_json(&dir.path().join("report.json"));
    let failed: Vec<&str> = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["passed"] == false)
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert!(failed.iter().all(|n| n.starts_with("wandering.")), "{failed:?}");
    assert!(failed.contains(&"wandering.cyclic_defect"));
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    for cfg in [r#"{"model": "mathieu", "q": 0}"#, "not json", r#"{"model": "mathieu", "p": 2, "q": 4}"#] {
        assert_eq!(run(dir.path(), &["verify"], cfg).status.code(), Some(2), "{cfg}");
    }
    let missing = Command::new(env!("CARGO_BIN_EXE_bloch-fiber"))
        .args(["bands", "nope.json"])
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(2));
    let bogus = Command::new(env!("CARGO_BIN_EXE_bloch-fiber"))
        .args(["frobnicate", "cfg.json"])
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(bogus.status.code(), Some(2));
}

#[test]
fn bands_free_chain() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["bands"], r#"{"model": "chain", "q": 1, "potential": [0.0], "L": 10}"#);
    assert!(out.status.success());
    let rows = csv_rows(&dir.path().join("bands.csv"));
    assert_eq!(rows[0], ["t1", "band_index", "energy"]);
    assert_eq!(rows.len(), 11);
    for (l, row) in rows[1..].iter().enumerate() {
        let e: f64 = row[2].parse().unwrap();
        assert!((e - 2.0 * (std::f64::consts::TAU * l as f64 / 10.0).cos()).abs() <= 1e-12);
    }
}

#[test]
fn bands_row_counts() {
    let dir = tempfile::tempdir().unwrap();
    run(dir.path(), &["bands", "--out", "m"], r#"{"model": "mathieu", "p": 1, "q": 3, "L": 64}"#);
    let rows = csv_rows(&dir.path().join("m/bands.csv"));
    assert_eq!(rows.len() - 1, 192);
    run(dir.path(), &["bands", "--out", "h"], r#"{"model": "hofstadter", "p": 1, "q": 3, "L": 24}"#);
    let rows = csv_rows(&dir.path().join("h/bands.csv"));
    assert_eq!(rows[0], ["t1", "t2", "band_index", "energy"]);
    assert_eq!(rows.len() - 1, 1728);
    // Node-then-band order.
    assert_eq!(rows[1][2], "0");
    assert_eq!(rows[3][2], "2");
    assert_eq!(rows[4][0], rows[1][0]);
    assert_ne!(rows[4][1], rows[1][1]);
}

#[test]
fn chern_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["chern", "--out", "per"], r#"{"model": "hofstadter", "p": 1, "q": 3, "L": 24}"#);
    assert!(out.status.success());
    let json = read_json(&dir.path().join("per/chern.json"));
    assert_eq!((json["p"].as_u64(), json["q"].as_u64(), json["grid"].as_u64()), (Some(1), Some(3), Some(24)));
    let cherns: Vec<i64> = json["bands"].as_array().unwrap().iter().map(|b| b["chern"].as_i64().unwrap()).collect();
    assert_eq!(cherns, [1, -2, 1]);
    assert!(json["bands"][0]["min_gap"].as_f64().unwrap() > 0.5);

    let out = run(
        dir.path(),
        &["chern", "--out", "all"],
        r#"{"model": "hofstadter", "p": 1, "q": 3, "L": 24, "band_set": "all"}"#,
    );
    assert!(out.status.success());
    let json = read_json(&dir.path().join("all/chern.json"));
    assert_eq!(json["bands"][0]["chern"], 0);
    assert!(json["bands"][0]["min_gap"].is_null());
}

#[test]
fn chern_gap_failure_reports_the_node() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["chern"], r#"{"model": "chain", "potential": [0.0, 0.0], "L": 8}"#);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("gap failure") && err.contains("3.141593"), "{err}");
}

#[test]
fn butterfly_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["butterfly", "--out", "two"], r#"{"model": "mathieu", "q_max": 2}"#);
    assert!(out.status.success());
    let rows = csv_rows(&dir.path().join("two/butterfly.csv"));
    assert_eq!(rows[0], ["p", "q", "band_index", "emin", "emax"]);
    let keys: Vec<(&str, &str, &str)> = rows[1..].iter().map(|r| (r[0].as_str(), r[1].as_str(), r[2].as_str())).collect();
    assert_eq!(keys, [("0", "1", "0"), ("1", "2", "0"), ("1", "2", "1")]);

    run(dir.path(), &["butterfly", "--out", "three"], r#"{"model": "mathieu", "q_max": 3}"#);
    let rows = csv_rows(&dir.path().join("three/butterfly.csv"));
    let pick = |p: &str| -> Vec<(f64, f64)> {
        rows[1..]
            .iter()
            .filter(|r| r[0] == p && r[1] == "3")
            .map(|r| (r[3].parse().unwrap(), r[4].parse().unwrap()))
            .collect()
    };
    let (a, b) = (pick("1"), pick("2"));
    assert_eq!(a.len(), 3);
    for (x, y) in a.iter().zip(&b) {
        assert!((x.0 - y.0).abs() <= 1e-10 && (x.1 - y.1).abs() <= 1e-10);
    }

    let out = run(dir.path(), &["butterfly"], r#"{"model": "mathieu", "q_max": 1}"#);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn decompose_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["decompose", "--out", "z2"], r#"{"model": "finite_group", "orders": [2]}"#);
    assert!(out.status.success());
    let json = read_json(&dir.path().join("z2/decomposition.json"));
    assert_eq!(json["labels"], serde_json::json!([[0], [1]]));
    assert_eq!(json["ranks"], serde_json::json!([1, 1]));
    // (1, 1)/√2 up to a phase.
    let re = &json["bases"][0]["re"];
    let im = &json["bases"][0]["im"];
    let amp = |i: usize| (re[i][0].as_f64().unwrap().powi(2) + im[i][0].as_f64().unwrap().powi(2)).sqrt();
    assert!((amp(0) - 0.5f64.sqrt()).abs() <= 1e-12 && (amp(1) - 0.5f64.sqrt()).abs() <= 1e-12);

    run(dir.path(), &["decompose", "--out", "z6"], r#"{"model": "finite_group", "orders": [2, 3]}"#);
    let json = read_json(&dir.path().join("z6/decomposition.json"));
    assert_eq!(json["labels"].as_array().unwrap().len(), 6);
    assert_eq!(json["ranks"], serde_json::json!([1, 1, 1, 1, 1, 1]));

    let out = run(
        dir.path(),
        &["decompose"],
        r#"{"model": "finite_group", "orders": [4], "corrupt_generator": true}"#,
    );
    assert_eq!(out.status.code(), Some(1));
    let out = run(dir.path(), &["decompose"], r#"{"model": "mathieu"}"#);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn seeded_runs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = run(dir.path(), &["verify", "--out", "a", "--seed", "1"], r#"{"model": "mathieu"}"#);
    let b = run(dir.path(), &["verify", "--out", "b", "--seed", "1"], r#"{"model": "mathieu"}"#);
    assert!(a.status.success() && b.status.success());
    assert_eq!(
        std::fs::read(dir.path().join("a/report.json")).unwrap(),
        std::fs::read(dir.path().join("b/report.json")).unwrap()
    );
}
