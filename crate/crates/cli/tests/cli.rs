use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_expanderlab"))
        .args(args)
        .arg("--output-dir")
        .arg(dir)
        .env_remove("EXPANDERLAB_THREADS")
        .output()
        .expect("spawn expanderlab")
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    csv::Reader::from_path(path)
        .unwrap()
        .records()
        .map(|r| r.unwrap().iter().map(str::to_string).collect())
        .collect()
}

#[test]
fn density_table_writes_ten_rows_and_a_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["density-table", "--k-max", "10", "--formats", "csv"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = csv_rows(&dir.path().join("density_table.csv"));
    assert_eq!(rows.len(), 10);
    assert_eq!(rows[0][0], "1");
    let m = manifest(dir.path());
    assert_eq!(m["files"], serde_json::json!(["density_table.csv"]));
    assert_eq!(m["passed"], Value::Bool(true));
    assert_eq!(m["config"]["parameters"]["k_max"], 10);
    assert!(!dir.path().join("density_table.svg").exists());
}

#[test]
fn csv_output_is_byte_identical_across_runs() {
    for args in [
        &["density-table", "--k-max", "12"][..],
        &["spectral", "--n", "5", "--lambda1", "-2.25", "--epsilon", "0.1"][..],
        &["translator", "--epsilon", "1", "--lambda", "10"][..],
    ] {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        assert_eq!(run(args, a.path()).status.code(), Some(0));
        assert_eq!(run(args, b.path()).status.code(), Some(0));
        let mut seen = 0;
        for entry in std::fs::read_dir(a.path()).unwrap() {
            let path = entry.unwrap().path();
            if path.extension().is_some_and(|e| e == "csv") {
                let name = path.file_name().unwrap();
                assert_eq!(std::fs::read(&path).unwrap(), std::fs::read(b.path().join(name)).unwrap(), "{args:?}");
                seen += 1;
            }
        }
        assert!(seen > 0);
    }
}

#[test]
fn solve_rotational_certifies_barriers() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["solve-rotational", "--n", "3", "--kappa", "1", "--R", "20"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("profile.csv").is_file());
    let svg = std::fs::read_to_string(dir.path().join("profile.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("<polyline"));
    let m = manifest(dir.path());
    let checks = m["checks"].as_array().unwrap();
    assert!(checks.iter().any(|c| c["name"] == "upper barrier violation"));
    assert!(checks.iter().all(|c| c["passed"] == Value::Bool(true)));
    let rows = csv_rows(&dir.path().join("profile.csv"));
    assert_eq!(rows.len(), 4001);
    let last: f64 = rows[4000][0].parse().unwrap();
    assert_eq!(last, 20.0);
}

#[test]
fn usage_errors_exit_with_status_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["density-table", "--bogus"][..],
        &["solve-rotational", "--n", "3"][..],
        &["nonsense"][..],
        &["spectral", "--n", "3", "--lambda1", "x", "--epsilon", "0.1"][..],
        &["density-table", "--k-max", "2"][..],
        &[][..],
    ] {
        assert_eq!(run(args, dir.path()).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn bad_thread_cap_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    for value in ["0", "-1", "many"] {
        let out = Command::new(env!("CARGO_BIN_EXE_expanderlab"))
            .args(["density-table", "--k-max", "5", "--output-dir"])
            .arg(dir.path())
            .env("EXPANDERLAB_THREADS", value)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(2), "{value}");
    }
    let out = Command::new(env!("CARGO_BIN_EXE_expanderlab"))
        .args(["density-table", "--k-max", "5", "--output-dir"])
        .arg(dir.path())
        .env("EXPANDERLAB_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn config_file_supplies_command_and_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let out_dir = dir.path().join("artifacts");
    std::fs::write(
        &cfg,
        serde_json::json!({
            "command": "latitude",
            "parameters": { "epsilon": "inf", "theta2": 0.8, "resolution": 201 },
            "output_dir": out_dir,
            "formats": ["csv", "json"]
        })
        .to_string(),
    )
    .unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_expanderlab")).arg("--config").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let m = manifest(&out_dir);
    assert_eq!(m["config"]["parameters"]["epsilon"], "inf");
    assert_eq!(csv_rows(&out_dir.join("latitude.csv")).len(), 201);

    let flagged = dir.path().join("flagged");
    let out = Command::new(env!("CARGO_BIN_EXE_expanderlab"))
        .arg("--config")
        .arg(&cfg)
        .args(["latitude", "--theta2", "0.5", "--output-dir"])
        .arg(&flagged)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(manifest(&flagged)["config"]["parameters"]["theta2"], 0.5);
}

#[test]
fn config_file_errors_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        serde_json::json!({ "command": "density-table", "parameters": { "k_max": 5 }, "colour": "blue" }),
        serde_json::json!({ "command": "density-table", "parameters": { "k_max": 5, "kappa": 1 } }),
        serde_json::json!({ "command": "teleport" }),
        serde_json::json!({ "command": "density-table", "parameters": { "k_max": 5 }, "formats": [] }),
    ];
    for (i, case) in cases.iter().enumerate() {
        let cfg = dir.path().join(format!("bad{i}.json"));
        std::fs::write(&cfg, case.to_string()).unwrap();
        let out = run(&["--config", cfg.to_str().unwrap()], dir.path());
        assert_eq!(out.status.code(), Some(2), "{case}");
    }
    let cfg = dir.path().join("other.json");
    std::fs::write(&cfg, serde_json::json!({ "command": "spectral" }).to_string()).unwrap();
    let out = run(&["--config", cfg.to_str().unwrap(), "density-table", "--k-max", "5"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn failed_certificate_exits_with_status_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["verify-all", "--only", "7"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let m = manifest(dir.path());
    assert_eq!(m["passed"], Value::Bool(false));
    let out = run(&["verify-all", "--quick", "--only", "1,2,3"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(csv_rows(&dir.path().join("verify_summary.csv")).len(), 13);
}

#[test]
fn dirichlet_accepts_keywords_and_objects() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["dirichlet", "--data", "abs-first", "--R", "3", "--resolution", "41"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(std::fs::read_to_string(dir.path().join("dirichlet_contours.svg")).unwrap().contains("<path"));
    let data = r#"{"kind":"linear","a":[0.5,-0.25]}"#;
    let out = run(&["dirichlet", "--data", data, "--R", "2", "--resolution", "31"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let out = run(&["dirichlet", "--data", "spiral"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}
