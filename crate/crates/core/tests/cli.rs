use std::process::{Command, Output};

use serde_json::Value;

fn ghgeom(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ghgeom")).args(args).output().unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let out = ghgeom(&all);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn close(v: &Value, want: f64, tol: f64) -> bool {
    (v.as_f64().unwrap() - want).abs() <= tol
}

#[test]
fn curvature_at_origin() {
    let v = json(&["curvature", "--point", "0,0,0"]);
    assert!(close(&v["rho"], -1.0, 1e-15));
    assert!(close(&v["lambda1"], std::f64::consts::FRAC_1_SQRT_2, 1e-15));
    assert!(close(&v["H2_paper"], -1.5, 1e-15));
    assert_eq!(v["provenance"]["command"], "curvature");
}

#[test]
fn generic_engine_agrees_with_closed_form() {
    let closed = json(&["curvature", "--point", "1.5,-2,0.5"]);
    let generic = json(&["curvature", "--point", "1.5,-2,0.5", "--generic"]);
    let fd = json(&["curvature", "--point", "1.5,-2,0.5", "--generic", "--fd"]);
    for key in ["rho", "lambda1", "lambda2", "H1", "H2"] {
        assert!(close(&generic[key], closed[key].as_f64().unwrap(), 1e-13), "{key}");
        assert!(close(&fd[key], closed[key].as_f64().unwrap(), 1e-6), "{key}");
    }
}

#[test]
fn geodesic_conserves_energy() {
    let v = json(&["geodesic", "--preset", "fig6", "--tmax", "2"]);
    let rows = v["rows"].as_array().unwrap();
    let e0 = rows[0]["energy"].as_f64().unwrap();
    assert!((e0 - 166.0).abs() < 1e-12);
    for r in rows {
        assert!(close(&r["energy"], e0, 1e-7 * e0));
    }
    assert!(close(&rows.last().unwrap()["t"], 2.0, 0.0));
}

#[test]
fn shoot_hits_target() {
    let v = json(&["shoot", "--from", "0,0,0", "--to", "1,0.5,-1"]);
    let last = v["rows"].as_array().unwrap().last().unwrap().clone();
    assert!(close(&last["x1"], 1.0, 1e-7));
    assert!(close(&last["x2"], 0.5, 1e-7));
    assert!(close(&last["x3"], -1.0, 1e-7));
}

#[test]
fn equivalence_csv() {
    let out = ghgeom(&["equiv", "--log", "tsallis", "--q", "1.5", "--point", "2,1,1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# tool: ghgeom"));
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    assert_eq!(lines.next().unwrap(), "x1,x2,x3,entropy,mu,sigma,integral,residual,quad_error");
    let row: Vec<f64> = lines.next().unwrap().split(',').map(|c| c.parse().unwrap()).collect();
    assert_eq!(row[3], 1.0);
    assert!(row[7].abs() < 1e-8);
}

#[test]
fn levelset_points_lie_on_both_surfaces() {
    let v = json(&["levelset", "--entropy-level", "0.5", "--radius", "3", "--samples", "16"]);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 16);
    for r in rows {
        let x1 = r["x1"].as_f64().unwrap();
        let x2 = r["x2"].as_f64().unwrap();
        let x3 = r["x3"].as_f64().unwrap();
        assert!((x1 * x3 - x2 - 0.5).abs() < 1e-12);
        assert!((x1 * x1 + x3 * x3 - 9.0).abs() < 1e-12);
    }
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["curvature", "--point", "1,2"][..],
        &["frobnicate"],
        &["map", "--field", "nope"],
    ] {
        let out = ghgeom(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn numeric_errors_exit_one() {
    let out = ghgeom(&["equiv", "--log", "tsallis", "--q", "3", "--point", "0,0,0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error: DomainError"));
    let out = ghgeom(&["levelset", "--entropy-level", "0", "--rho", "0.5"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("OutOfRange"));
}

#[test]
fn writes_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("map.csv");
    let out = ghgeom(&["map", "--field", "rho", "--grid", "x1=-1:1:3,x3=-1:1:3", "--out", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(path).unwrap();
    let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(data.len(), 10);
    assert!(data.iter().any(|l| l.ends_with(",-1.0")));
}
