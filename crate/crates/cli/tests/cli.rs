use hcsub_cli::config::{parse_poly, DiskSpec, RunConfig};
use serde_json::Value;
use std::path::Path;
use std::process::Command;

fn hcsub(out: &Path, args: &[&str]) -> (i32, String) {
    let o = Command::new(env!("CARGO_BIN_EXE_hcsub"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("HCSUB_OUT_DIR")
        .output()
        .unwrap();
    (o.status.code().unwrap(), String::from_utf8_lossy(&o.stdout).into_owned())
}

fn json(p: &Path) -> Value {
    serde_json::from_slice(&std::fs::read(p).unwrap()).unwrap()
}

#[test]
fn nk_prints_ten() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out) = hcsub(dir.path(), &["nk", "--mu", "3,0", "--prefix", "2"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("N = 10"), "{out}");
    let art = json(&dir.path().join("nk.nk.json"));
    assert_eq!(art["kind"], "nk");
    assert_eq!(art["data"]["n"], 10);
}

#[test]
fn negative_eps_is_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = hcsub(dir.path(), &["lem1", "--eps", "-1"]);
    assert_eq!(code, 3);
    assert!(dir.path().join("lem1.lem1.error.json").exists());
}

#[test]
fn unknown_config_key_is_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"eps": 0.1, "bogus": 1}"#).unwrap();
    let (code, _) = hcsub(dir.path(), &["lem1", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, 3);
}

#[test]
fn check_reproduces_x0_report() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out) = hcsub(dir.path(), &["x0", "--stages", "2"]);
    assert_eq!(code, 0, "{out}");
    let art = dir.path().join("x0.x0.json");
    let (code, out) = hcsub(dir.path(), &["check", "--artifact", art.to_str().unwrap(), "--scenario", "again"]);
    assert_eq!(code, 0, "{out}");
    let first = json(&dir.path().join("x0.x0.report.json"));
    let second = json(&dir.path().join("again.check.report.json"));
    assert_eq!(first["report"], second["report"]);
    assert_eq!(first["artifact_sha256"], second["artifact_sha256"]);
    assert_eq!(first["config"]["stages"], 2);
}

#[test]
fn tampered_artifact_fails_check() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = hcsub(dir.path(), &["x0", "--stages", "2"]);
    assert_eq!(code, 0);
    let path = dir.path().join("x0.x0.json");
    let mut art = json(&path);
    // Push the first correction far from zero.
    art["data"]["entries"][0]["p"][1] = serde_json::json!([1.0e3, 0.0]);
    std::fs::write(&path, serde_json::to_vec(&art).unwrap()).unwrap();
    let (code, out) = hcsub(dir.path(), &["check", "--artifact", path.to_str().unwrap()]);
    assert_eq!(code, 1, "{out}");
    assert!(out.contains("FAIL"));
}

#[test]
fn missing_artifact_is_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = hcsub(dir.path(), &["check", "--artifact", "/nonexistent/a.json"]);
    assert_eq!(code, 3);
}

#[test]
fn impossible_simul_is_construction_failure() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out) = hcsub(dir.path(), &["simul"]);
    assert_eq!(code, 2, "{out}");
    let err = json(&dir.path().join("simul.simul.error.json"));
    assert_eq!(err["exit_code"], 2);
}

#[test]
fn grid_and_norms_pass() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out) = hcsub(dir.path(), &["grid", "--delta", "0.5", "--c", "4", "--n", "2"]);
    assert_eq!(code, 0, "{out}");
    let (code, out) = hcsub(dir.path(), &["norms", "--poly", "1,0;0,1;2", "--radii", "1,2"]);
    assert_eq!(code, 0, "{out}");
    let t = json(&dir.path().join("norms.norms.json"));
    assert_eq!(t["data"]["rows"].as_array().unwrap().len(), 2);
}

#[test]
fn sweep_writes_csv_trace() {
    let dir = tempfile::tempdir().unwrap();
    // x = z² / 2, D x = z: witness at s = 1.
    let (code, out) = hcsub(
        dir.path(),
        &["sweep", "--poly", "0;0;0.5", "--target", "0;1", "--operator", "derivative", "--window", "0,3", "--csv"],
    );
    assert_eq!(code, 0, "{out}");
    let mut rdr = csv::Reader::from_path(dir.path().join("sweep.sweep.trace.csv")).unwrap();
    let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, ["scenario", "a_re", "a_im", "b", "s", "log_error"]);
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(&rows[1][4], "1");
}

#[test]
fn run_config_round_trips() {
    let cfg = RunConfig {
        scenario: Some("demo".into()),
        stages: Some(4),
        eps: Some(0.1 + 0.2),
        mu: Some([1.0, -0.5]),
        seeds: Some(vec![parse_poly("1").unwrap(), parse_poly("0;0,1").unwrap()]),
        disks: Some(vec![DiskSpec {
            center: [5.0, 0.0],
            radius: 1.0,
            target: parse_poly("0").unwrap(),
        }]),
        probe_deltas: Some(vec![0.1, 0.05]),
        csv: Some(true),
        ..Default::default()
    };
    let text = serde_json::to_string(&cfg).unwrap();
    let back: RunConfig = serde_json::from_str(&text).unwrap();
    assert_eq!(cfg, back);
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"mu": [1, 0], "prefix": [1], "scenario": "from_file"}"#).unwrap();
    let (code, out) = hcsub(dir.path(), &["nk", "--config", cfg.to_str().unwrap(), "--mu", "3", "--prefix", "2"]);
    assert_eq!(code, 0);
    assert!(out.contains("N = 10"), "{out}");
    assert!(dir.path().join("from_file.nk.report.json").exists());
}
