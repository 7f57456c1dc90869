use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sha2::{Digest, Sha256};

fn kamdnlw(args: &[&str], config: Option<&Path>, out: &Path) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_kamdnlw"));
    cmd.args(args).arg("--out").arg(out).env_remove("KAMDNLW_THREADS");
    if let Some(c) = config {
        cmd.arg("--config").arg(c);
    }
    cmd.output().unwrap()
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn read_json(p: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

/// Data rows of a CSV artifact, after the provenance comment and header.
fn csv_rows(p: &Path) -> (String, Vec<Vec<f64>>) {
    let text = std::fs::read_to_string(p).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# kamdnlw "));
    let header = lines.next().unwrap().to_string();
    let rows = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    (header, rows)
}

const QP_CONFIG: &str = r#"{
  "model": { "mass": 1.0, "xi": {"1": 0.001}, "grid_n": 128,
             "truncation": {"j_max": 16, "k_max": 8, "d_max": 3} }
}"#;

#[test]
fn qp_solve_writes_solution_and_provenance() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "qp.json", QP_CONFIG);
    let out = dir.path().join("out");
    let o = kamdnlw(&["qp-solve"], Some(&cfg), &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rep = read_json(&out.join("newton.json"));
    assert!(rep["residual"].as_f64().unwrap() < 1e-10);
    let sol = read_json(&out.join("qp_solution.json"));
    assert_eq!(sol["sites"], serde_json::json!([1]));
    let prov = read_json(&out.join("provenance.json"));
    let want = format!("{:x}", Sha256::digest(QP_CONFIG.as_bytes()));
    assert_eq!(prov["config_sha256"], serde_json::json!(want));
    assert_eq!(prov["command"], "qp-solve");
    assert_eq!(prov["resolved_config"]["newton"]["max_iter"], 30);
}

#[test]
fn blowup_run_flags_before_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "b.json",
        r#"{ "simulate": { "mass": 0.0, "grid_n": 32, "y": [], "v": [{"j": 0, "cos": 1.0}, {"j": 1, "cos": 0.05}] },
             "integrator": { "dt": 0.01, "t_end": 2.0 } }"#,
    );
    let out = dir.path().join("out");
    let o = kamdnlw(&["nonexistence", "blowup"], Some(&cfg), &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = csv_rows(&out.join("trajectory.csv"));
    assert_eq!(header, "t,energy,M,H,mean,meanvel,flag");
    let last = rows.last().unwrap();
    assert_eq!(last[6], 1.0);
    assert!(last[0] < 1.0);
    assert!(rows[..rows.len() - 1].iter().all(|r| r[6] == 0.0));
    let rep = read_json(&out.join("blowup.json"));
    assert_eq!(rep["holds"], true);
    let (header, _) = csv_rows(&out.join("blowup.csv"));
    assert_eq!(header, "t,observed,bound");
}

#[test]
fn malformed_config_exits_2_without_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    for (name, body) in [("bad.json", "{ \"model\": "), ("unknown.json", "{ \"modle\": {} }")] {
        let cfg = write_config(dir.path(), name, body);
        let out = dir.path().join(format!("out-{name}"));
        let o = kamdnlw(&["qp-solve"], Some(&cfg), &out);
        assert_eq!(o.status.code(), Some(2), "{name}");
        assert!(!out.exists(), "{name}");
    }
}

#[test]
fn invalid_model_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "m.json",
        r#"{ "model": { "mass": -1.0, "xi": {"1": 0.001}, "grid_n": 64,
                        "truncation": {"j_max": 16, "k_max": 8, "d_max": 3} } }"#,
    );
    let out = dir.path().join("out");
    let o = kamdnlw(&["birkhoff"], Some(&cfg), &out);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("mass"));
    assert!(!out.exists());
}

#[test]
fn missing_model_block_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = kamdnlw(&["qp-solve"], None, &out);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn newton_failure_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let body = QP_CONFIG.trim_end().trim_end_matches('}').to_string() + r#", "newton": { "tol": 1e-30, "max_iter": 1 } }"#;
    let cfg = write_config(dir.path(), "n.json", &body);
    let out = dir.path().join("out");
    let o = kamdnlw(&["qp-solve"], Some(&cfg), &out);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(!out.exists());
}

#[test]
fn melnikov_scan_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "m.json",
        r#"{ "model": { "mass": 1.0, "xi": {"1": 0.001}, "grid_n": 64,
                        "truncation": {"j_max": 16, "k_max": 8, "d_max": 3} },
             "melnikov": { "samples": 50, "k_max": 3 }, "seed": 9 }"#,
    );
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(kamdnlw(&["melnikov-scan", "--threads", "1"], Some(&cfg), &a).status.success());
    assert!(kamdnlw(&["melnikov-scan", "--threads", "3"], Some(&cfg), &b).status.success());
    let ca = std::fs::read(a.join("melnikov.csv")).unwrap();
    assert_eq!(ca, std::fs::read(b.join("melnikov.csv")).unwrap());
    let (header, rows) = csv_rows(&a.join("melnikov.csv"));
    assert_eq!(header, "scale,density");
    assert_eq!(rows.len(), 3);
    assert!(String::from_utf8(ca).unwrap().starts_with("# kamdnlw "));
    assert!(String::from_utf8_lossy(&std::fs::read(a.join("melnikov.csv")).unwrap()).contains("seed=9"));
}

#[test]
fn seed_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "a.json", r#"{ "algebra": { "cases": 40, "penalization_cases": 10 }, "seed": 1 }"#);
    let out = dir.path().join("out");
    let o = kamdnlw(&["algebra-check", "--seed", "77"], Some(&cfg), &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(read_json(&out.join("provenance.json"))["seed"], 77);
    let rep = read_json(&out.join("algebra_check.json"));
    assert_eq!(rep["passed"], true);
    assert_eq!(rep["penalization_violations"], 0);
}

#[test]
fn asymptotics_schema() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "a.json",
        r#"{ "model": { "mass": 1.0, "xi": {"1": 0.001}, "grid_n": 128,
                        "truncation": {"j_max": 32, "k_max": 8, "d_max": 3} } }"#,
    );
    let out = dir.path().join("out");
    assert!(kamdnlw(&["asymptotics"], Some(&cfg), &out).status.success());
    let (header, rows) = csv_rows(&out.join("asymptotics.csv"));
    assert_eq!(header, "j,Omega,residual");
    assert_eq!(rows.len(), 25);
    assert!(rows.iter().all(|r| (r[0] * r[2]).abs() < 1e-2));
}

#[test]
fn continuation_and_simulate_schemas() {
    let dir = tempfile::tempdir().unwrap();
    let body = QP_CONFIG.trim_end().trim_end_matches('}').to_string()
        + r#", "continuation": { "targets": [1e-4, 2e-4, 4e-4] },
             "simulate": { "grid_n": 32, "from_qp": true },
             "integrator": { "dt": 0.02, "t_end": 1.0, "record_every": 10 } }"#;
    let cfg = write_config(dir.path(), "c.json", &body);
    let out = dir.path().join("c");
    assert!(kamdnlw(&["continuation"], Some(&cfg), &out).status.success());
    let (header, rows) = csv_rows(&out.join("continuation.csv"));
    assert_eq!(header, "xi,omega_1,residual,iters");
    assert_eq!(rows.len(), 3);

    let out = dir.path().join("s");
    assert!(kamdnlw(&["simulate"], Some(&cfg), &out).status.success());
    let (header, rows) = csv_rows(&out.join("snapshot.csv"));
    assert_eq!(header, "x,y,v");
    assert_eq!(rows.len(), 32);
    let rep = read_json(&out.join("simulate.json"));
    assert!(rep["qp_gap"].as_f64().unwrap() < 1e-8);
}

#[test]
fn identity_run_writes_fluxes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "m.json",
        r#"{ "simulate": { "mass": 0.0, "grid_n": 32, "y": [{"j": 1, "cos": 0.2}], "v": [{"j": 2, "sin": 0.1}] },
             "integrator": { "dt": 0.01, "t_end": 1.0 } }"#,
    );
    let out = dir.path().join("out");
    let o = kamdnlw(&["nonexistence", "M"], Some(&cfg), &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rep = read_json(&out.join("identity.json"));
    assert!(rep["max_defect"].as_f64().unwrap() < 1e-6);
    let (header, _) = csv_rows(&out.join("identity.csv"));
    assert_eq!(header, "t,numerical,analytic");
}
