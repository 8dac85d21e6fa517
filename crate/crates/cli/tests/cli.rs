//! End-to-end tests of the `plc` binary: JSON in, JSON out, exit codes.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn plc(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_plc"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("failed to spawn plc")
}

fn stdout_json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "exit {:?}, stderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is not valid JSON")
}

fn write_general_h(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("hb.json");
    std::fs::write(&path, r#"{"h":[2,1,0,1,3,0,1,2,1]}"#).unwrap();
    path
}

#[test]
fn pl_homography_form() {
    let tmp = tempfile::tempdir().unwrap();
    let h = write_general_h(tmp.path());
    let out = plc(&["pl", "--homography", h.to_str().unwrap()], tmp.path());
    let js = stdout_json(&out);
    let s = 10.0_f64.sqrt();
    assert!((js["a"].as_f64().unwrap() - -3.0 / s).abs() < 1e-12);
    assert!((js["b"].as_f64().unwrap() - 1.0 / s).abs() < 1e-12);
    assert!((js["c"].as_f64().unwrap() - 1.0 / s).abs() < 1e-12);
    assert_eq!(js["method"], "homography");
}

#[test]
fn pl_methods_agree() {
    let tmp = tempfile::tempdir().unwrap();
    let h = write_general_h(tmp.path());
    let path = h.to_str().unwrap();
    let base = stdout_json(&plc(&["pl", "--homography", path], tmp.path()));
    for (method, tag) in [("ovp", "ovp"), ("auto", "ovp")] {
        let js = stdout_json(&plc(
            &["pl", "--homography", path, "--method", method],
            tmp.path(),
        ));
        assert_eq!(js["method"], tag);
        for k in ["a", "b", "c"] {
            let d = (js[k].as_f64().unwrap() - base[k].as_f64().unwrap()).abs();
            assert!(d < 1e-12, "{k} differs by {d}");
        }
    }
}

#[test]
fn pl_fronto_parallel_is_a_domain_error() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("identity.json");
    std::fs::write(&path, r#"{"h":[1,0,0,0,1,0,0,0,1]}"#).unwrap();
    let out = plc(&["pl", "--homography", path.to_str().unwrap()], tmp.path());
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("FrontoParallel"), "stderr: {stderr}");
}

#[test]
fn vps_columns_and_edges() {
    let tmp = tempfile::tempdir().unwrap();
    let h = write_general_h(tmp.path());
    let path = h.to_str().unwrap();
    let js = stdout_json(&plc(&["vps", "--homography", path], tmp.path()));
    let pv = js["pv"].as_array().unwrap();
    assert_eq!(pv.len(), 4);
    // pv1 dehomogenizes to (2, 1).
    let p = pv[0].as_array().unwrap();
    let (x, y, w) = (
        p[0].as_f64().unwrap(),
        p[1].as_f64().unwrap(),
        p[2].as_f64().unwrap(),
    );
    assert!((x / w - 2.0).abs() < 1e-12);
    assert!((y / w - 1.0).abs() < 1e-12);

    // The edge route returns the same four points up to scale.
    let js_edges = stdout_json(&plc(
        &["vps", "--homography", path, "--route", "edges"],
        tmp.path(),
    ));
    let pv_e = js_edges["pv"].as_array().unwrap();
    for (a, b) in pv.iter().zip(pv_e) {
        let a: Vec<f64> = a.as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
        let b: Vec<f64> = b.as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
        let cross = [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ];
        let na = a.iter().map(|v| v * v).sum::<f64>().sqrt();
        let nb = b.iter().map(|v| v * v).sum::<f64>().sqrt();
        let sin = cross.iter().map(|v| v * v).sum::<f64>().sqrt() / (na * nb);
        assert!(sin < 1e-10, "points differ: {a:?} vs {b:?}");
    }
}

#[test]
fn vps_custom_direction() {
    let tmp = tempfile::tempdir().unwrap();
    let h = write_general_h(tmp.path());
    let js = stdout_json(&plc(
        &["vps", "--homography", h.to_str().unwrap(), "--dir", "2,1"],
        tmp.path(),
    ));
    let p3 = js["pv"][2].as_array().unwrap();
    let (x, y, w) = (
        p3[0].as_f64().unwrap(),
        p3[1].as_f64().unwrap(),
        p3[2].as_f64().unwrap(),
    );
    assert!((x / w - 1.25).abs() < 1e-12);
    assert!((y / w - 1.25).abs() < 1e-12);
    let dir = js["dir"].as_array().unwrap();
    let (a, b) = (dir[0].as_f64().unwrap(), dir[1].as_f64().unwrap());
    assert!((a - 2.0 / 5.0_f64.sqrt()).abs() < 1e-12);
    assert!((b - 1.0 / 5.0_f64.sqrt()).abs() < 1e-12);
}

#[test]
fn vps_dir_conflicts_with_edges_route() {
    let tmp = tempfile::tempdir().unwrap();
    let h = write_general_h(tmp.path());
    let out = plc(
        &[
            "vps",
            "--homography",
            h.to_str().unwrap(),
            "--route",
            "edges",
            "--dir",
            "2,1",
        ],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = plc(&["pl", "--no-such-flag"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_passes_and_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let run = || {
        plc(
            &["verify", "--trials", "500", "--seed", "7"],
            tmp.path(),
        )
    };
    let out = run();
    let js = stdout_json(&out);
    assert_eq!(js["trials"], 500);
    assert!(js["failures"].as_array().unwrap().is_empty());
    assert!(js["max_discrepancy"].as_f64().unwrap() <= 1e-9);
    assert_eq!(js["mode"], "float");
    assert_eq!(out.stdout, run().stdout);
}

#[test]
fn verify_exact_mode_reports_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let out = plc(
        &["verify", "--trials", "50", "--seed", "3", "--exact"],
        tmp.path(),
    );
    let js = stdout_json(&out);
    assert_eq!(js["mode"], "exact_rational");
    assert_eq!(js["max_discrepancy"].as_f64().unwrap(), 0.0);
}

#[test]
fn verify_fails_with_impossible_tolerance() {
    let tmp = tempfile::tempdir().unwrap();
    let out = plc(
        &[
            "verify",
            "--trials",
            "100",
            "--seed",
            "1",
            "--tolerance",
            "1e-20",
        ],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    let js: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(!js["failures"].as_array().unwrap().is_empty());
}

#[test]
fn tolerance_env_var_is_honored() {
    let tmp = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_plc"))
        .args(["verify", "--trials", "100", "--seed", "1"])
        .env("PLC_TOLERANCE", "1e-20")
        .current_dir(tmp.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    // An explicit flag wins over the environment.
    let out = Command::new(env!("CARGO_BIN_EXE_plc"))
        .args(["verify", "--trials", "100", "--seed", "1", "--tolerance", "1e-9"])
        .env("PLC_TOLERANCE", "1e-20")
        .current_dir(tmp.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn synth_then_calibrate_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let views = tmp.path().join("views.json");
    let out = plc(
        &[
            "synth",
            "--poses",
            "6",
            "--seed",
            "11",
            "--noise",
            "0",
            "--pp",
            "320,240",
            "--focal",
            "800",
            "--grid",
            "7,7,1",
            "--out",
            views.to_str().unwrap(),
        ],
        tmp.path(),
    );
    let spec = stdout_json(&out);
    assert_eq!(spec["poses"], 6);
    assert_eq!(spec["pp"][0], 320.0);

    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&views).unwrap()).unwrap();
    assert_eq!(doc["views"].as_array().unwrap().len(), 6);
    assert_eq!(doc["views"][0]["plane"].as_array().unwrap().len(), 49);

    let out = plc(
        &["calibrate", "--views", views.to_str().unwrap()],
        tmp.path(),
    );
    let js = stdout_json(&out);
    assert!((js["pp"]["u"].as_f64().unwrap() - 320.0).abs() <= 1e-6);
    assert!((js["pp"]["v"].as_f64().unwrap() - 240.0).abs() <= 1e-6);
    assert_eq!(js["n_lines_used"], 6);
    assert_eq!(js["lines"].as_array().unwrap().len(), 6);
}

#[test]
fn calibrate_rejects_planted_outlier_view() {
    // Five clean synthetic views plus one whose image points are shifted,
    // which displaces its principal line away from the common point.
    let tmp = tempfile::tempdir().unwrap();
    let views = tmp.path().join("views.json");
    plc(
        &[
            "synth",
            "--poses",
            "6",
            "--seed",
            "21",
            "--noise",
            "0",
            "--pp",
            "100,80",
            "--focal",
            "500",
            "--grid",
            "6,6,1",
            "--out",
            views.to_str().unwrap(),
        ],
        tmp.path(),
    );
    let mut doc: Value = serde_json::from_str(&std::fs::read_to_string(&views).unwrap()).unwrap();
    // Shift one view's image points by 40 px horizontally: its principal
    // line moves 40 px off the true principal point.
    let image = doc["views"][3]["image"].as_array_mut().unwrap();
    for p in image {
        let u = p[0].as_f64().unwrap();
        p[0] = (u + 40.0).into();
    }
    std::fs::write(&views, serde_json::to_string(&doc).unwrap()).unwrap();

    let out = plc(
        &["calibrate", "--views", views.to_str().unwrap()],
        tmp.path(),
    );
    let js = stdout_json(&out);
    let rejected = js["rejected"].as_array().unwrap();
    assert_eq!(rejected.len(), 1, "rejected: {rejected:?}");
    assert_eq!(rejected[0], 3);
    assert!((js["pp"]["u"].as_f64().unwrap() - 100.0).abs() <= 1e-6);
    assert!((js["pp"]["v"].as_f64().unwrap() - 80.0).abs() <= 1e-6);
}

#[test]
fn calibrate_insufficient_views() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("one.json");
    std::fs::write(
        &path,
        r#"{"views":[{"plane":[[0,0],[1,0],[1,1],[0,1]],"image":[[0,0],[1,0],[1,1],[0,1]]}]}"#,
    )
    .unwrap();
    let out = plc(&["calibrate", "--views", path.to_str().unwrap()], tmp.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("InsufficientViews"));
}
