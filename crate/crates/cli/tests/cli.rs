use std::f64::consts::PI;
use std::process::{Command, Output};

use serde_json::Value;

fn cp2w(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cp2w")).args(args).output().expect("run cp2w")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

fn value(v: &Value, name: &str) -> f64 {
    v["invariants"][name]["value"].as_f64().unwrap()
}

#[test]
fn eval_whitney_reports_eight_pi() {
    let out = cp2w(&["eval", "whitney", "t=1", "--grid", "48x96"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["surface"], "whitney");
    assert_eq!(v["params"]["t"], 1.0);
    assert_eq!(v["grid"][0], 48);
    assert!((value(&v, "Wminus") - 8.0 * PI).abs() < 1e-8);
    assert!(v["invariants"]["Wminus"]["expected"].is_number());
    for c in v["checks"].as_array().unwrap() {
        assert_eq!(c["status"], "PASS", "{c}");
        for key in ["id", "computed", "expected", "tol"] {
            assert!(c.get(key).is_some());
        }
    }
}

#[test]
fn eval_line_and_clifford() {
    let v = json_of(&cp2w(&["eval", "surface=line"]));
    assert!((value(&v, "Wminus") - 2.0 * PI).abs() < 1e-8);
    assert!((value(&v, "Wplus") - 6.0 * PI).abs() < 1e-8);
    let v = json_of(&cp2w(&["eval", "clifford", "--grid", "32x32"]));
    let target = 8.0 * PI * PI / (3.0 * 3f64.sqrt());
    assert!((value(&v, "Wminus") - target).abs() < 1e-10 * target);
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# whitney run\nversion = 1\nsurface = whitney\nt = 2\ngrid = 32x64\nformat = csv\n").unwrap();
    let out_path = dir.path().join("report.csv");
    let out = cp2w(&["eval", "--config", cfg.to_str().unwrap(), "t=0.5", "--out", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&out_path).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(rdr.headers().unwrap(), vec!["name", "value", "error", "expected"]);
    let wm = rdr
        .records()
        .map(|r| r.unwrap())
        .find(|r| &r[0] == "Wminus")
        .map(|r| r[1].parse::<f64>().unwrap())
        .unwrap();
    assert!((wm - 8.0 * PI).abs() < 1e-8);
}

#[test]
fn bad_configuration_exits_with_two() {
    for args in [
        vec!["eval", "nowhere"],
        vec!["eval", "whitney", "t=-1"],
        vec!["eval", "line", "--grid", "4x4"],
        vec!["eval", "line", "colour=red"],
        vec!["eval", "line", "--format", "yaml"],
        vec!["verify", "everything"],
        vec!["optimize", "surface=line"],
        vec!["optimize", "start=1,2"],
        vec!["eval", "line", "version=9"],
    ] {
        let out = cp2w(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn thread_override_is_validated() {
    let out = Command::new(env!("CARGO_BIN_EXE_cp2w"))
        .args(["eval", "line", "--grid", "16x32"])
        .env("CP2W_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_cp2w"))
        .args(["eval", "line", "--grid", "16x32"])
        .env("CP2W_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn output_is_deterministic() {
    let a = cp2w(&["eval", "psi", "b=0.5+0.5i", "--grid", "32x64"]);
    let b = Command::new(env!("CARGO_BIN_EXE_cp2w"))
        .args(["eval", "psi", "b=0.5+0.5i", "--grid", "32x64"])
        .env("CP2W_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn verify_bounds_passes() {
    let out = cp2w(&["verify", "bounds", "--grid", "48x96"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json_of(&out);
    assert_eq!(v["failed"], 0);
    let checks = v["checks"].as_array().unwrap();
    assert!(checks.iter().any(|c| c["id"] == "wminus_ge_2pi_mu/clifford"));
    assert!(checks.iter().all(|c| c["basis"].is_string()));
}

#[test]
fn verify_all_reports_failures_with_exit_one() {
    let out = cp2w(&["verify", "all", "--format", "text"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let failed: Vec<&str> = text.lines().filter(|l| l.starts_with("FAIL")).collect();
    // the [1:0] member of the ψ family is branched at one point
    assert_eq!(failed.len(), 2, "{failed:?}");
    assert!(failed.iter().all(|l| l.contains("psi[1:0]")));
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn scans() {
    let v = json_of(&cp2w(&["scan", "whitney", "steps=3", "--grid", "32x64"]));
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    for r in rows {
        assert!((r["Wminus"].as_f64().unwrap() - 8.0 * PI).abs() < 1e-8);
    }
    let v = json_of(&cp2w(&["scan", "phi_ab", "samples=3", "--grid", "32x64"]));
    for r in v["rows"].as_array().unwrap() {
        assert!((r["Wminus"].as_f64().unwrap() - 4.0 * PI).abs() < 1e-6);
    }
    let v = json_of(&cp2w(&["scan", "flat_torus", "from=0.3", "to=0.8", "steps=11", "--grid", "16x16"]));
    let rows = v["rows"].as_array().unwrap();
    let best = rows
        .iter()
        .min_by(|a, b| a["Wminus"].as_f64().unwrap().total_cmp(&b["Wminus"].as_f64().unwrap()))
        .unwrap();
    let r1: f64 = best["value"].as_str().unwrap().parse().unwrap();
    assert!((r1 * r1 - 1.0 / 3.0).abs() < 0.05);
}

#[test]
fn scan_records_row_failures() {
    let out = cp2w(&["scan", "flat_torus", "from=0.5", "to=1.0", "steps=2", "--grid", "16x16"]);
    assert_eq!(out.status.code(), Some(2));
    let out = cp2w(&["scan", "whitney", "from=-1", "to=1", "steps=3", "--grid", "16x32"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows[0]["ok"], false);
    assert!(rows[0]["error"].as_str().unwrap().contains("t = -1"));
    assert_eq!(rows[2]["ok"], true);
}

#[test]
fn optimizer_finds_clifford() {
    let out = cp2w(&["optimize"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    let target = 8.0 * PI * PI / (3.0 * 3f64.sqrt());
    for run in v["runs"].as_array().unwrap() {
        assert_eq!(run["converged"], true);
        for w in run["argmin"].as_array().unwrap() {
            assert!((w.as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-6);
        }
        assert!((run["min_wminus"].as_f64().unwrap() - target).abs() < 1e-6 * target);
        assert!(!run["trace"].as_array().unwrap().is_empty());
    }
}

#[test]
fn optimizer_non_convergence_exits_with_four() {
    let out = cp2w(&["optimize", "max_iter=3", "start=0.6,0.3,0.1", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("best so far"));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 2);
}
