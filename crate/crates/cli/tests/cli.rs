use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn modloc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_modloc")).args(args).output().expect("binary runs")
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn empty_experiment_list_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"schema_version":1,"model":{"variant":"trivial"},"experiments":[]}"#);
    let out = modloc(&["run", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["experiments"].as_array().unwrap().len(), 0);
    assert_eq!(report["schema_version"], 1);
}

#[test]
fn unknown_probe_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.json",
        r#"{"schema_version":1,"model":{"variant":"trivial"},"experiments":[{"probe":"frobnicate"}]}"#,
    );
    for sub in ["validate", "run"] {
        let out = modloc(&[sub, "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(1));
        assert!(String::from_utf8_lossy(&out.stderr).contains("frobnicate"));
    }
}

#[test]
fn missing_config_is_an_error() {
    let out = modloc(&["validate", "--config", "/nonexistent/x.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
}

#[test]
fn failing_check_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.json",
        r#"{"schema_version":1,"model":{"variant":"rapidity","mass":1.0,"n":24},
            "experiments":[{"probe":"strip","params":{"a":[-0.5,0.5]}}]}"#,
    );
    let d = dir.path().to_str().unwrap();
    let out = modloc(&["run", "--config", cfg.to_str().unwrap(), "--out", d]);
    assert_eq!(out.status.code(), Some(2));
    let again = modloc(&["report", "--config", cfg.to_str().unwrap(), "--out", d]);
    assert_eq!(again.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&again.stdout).contains("FAIL strip_standard"));
}

#[test]
fn rerun_is_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let cfg = configs().join("fock.json");
    let cfg = cfg.to_str().unwrap();
    for (dir, jobs) in [(&a, "1"), (&b, "4")] {
        let out = modloc(&["run", "--config", cfg, "--out", dir.path().to_str().unwrap(), "--jobs", jobs]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for f in ["report.json", "sweep.csv"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap(), "{f} differs");
    }
}

#[test]
fn seed_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let cfg = configs().join("empty.json");
    let out = modloc(&["run", "--config", cfg.to_str().unwrap(), "--out", d, "--seed", "42"]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["seed"], 42);
}

#[test]
fn bundled_configs_validate() {
    for entry in std::fs::read_dir(configs()).unwrap() {
        let p = entry.unwrap().path();
        let out = modloc(&["validate", "--config", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{}: {}", p.display(), String::from_utf8_lossy(&out.stderr));
    }
}
