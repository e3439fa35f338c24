use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn volprod(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_volprod"))
        .args(args)
        .env_remove("VOLPROD_TOL")
        .output()
        .expect("binary runs")
}

fn json_of(args: &[&str]) -> Value {
    let out = volprod(args);
    assert!(
        out.status.success(),
        "{:?}: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

#[test]
fn planar_simplex_volume() {
    let v = json_of(&["body", "--builtin", "simplex:2", "volume"]);
    let exact = 3.0 * 3f64.sqrt() / 4.0;
    assert!(close(v["volume"].as_f64().unwrap(), exact, 1e-14));
}

#[test]
fn cube_volume_is_exactly_eight() {
    let v = json_of(&["body", "--builtin", "cube:3", "volume"]);
    assert_eq!(v["volume"].as_f64().unwrap(), 8.0);
}

#[test]
fn polar_of_simplex_is_minus_n_simplex() {
    let polar = json_of(&["body", "--builtin", "simplex:3", "polar", "--center", "0"]);
    let hull = json_of(&["body", "--builtin", "simplex:3", "hull"]);
    let verts = |v: &Value| -> Vec<Vec<f64>> {
        v["vertices"]
            .as_array()
            .unwrap()
            .iter()
            .map(|p| {
                p.as_array()
                    .unwrap()
                    .iter()
                    .map(|x| x.as_f64().unwrap())
                    .collect()
            })
            .collect()
    };
    let expected: Vec<Vec<f64>> = verts(&hull)
        .into_iter()
        .map(|p| p.into_iter().map(|x| -3.0 * x).collect())
        .collect();
    for p in verts(&polar) {
        assert!(expected
            .iter()
            .any(|e| e.iter().zip(&p).all(|(a, b)| (a - b).abs() < 1e-12)));
    }
}

#[test]
fn volume_products() {
    for (b, exact) in [
        ("simplex:2", 6.75),
        ("cube:2", 8.0),
        ("simplex:4", 3125.0 / 576.0),
    ] {
        let v = json_of(&["vp", "--builtin", b]);
        assert!(close(v["vp"].as_f64().unwrap(), exact, 1e-9), "{b}: {v}");
    }
}

#[test]
fn santalo_and_contains() {
    let s = json_of(&["santalo", "--builtin", "cube:2"]);
    assert!(s["centroid_norm"].as_f64().unwrap() <= 1e-10);
    let inside = json_of(&[
        "body",
        "--builtin",
        "simplex:2",
        "contains",
        "--point",
        "0.1,-0.1",
    ]);
    assert_eq!(inside["contains"], Value::Bool(true));
    let outside = json_of(&[
        "body",
        "--builtin",
        "simplex:2",
        "contains",
        "--point",
        "2,0",
    ]);
    assert_eq!(outside["contains"], Value::Bool(false));
}

#[test]
fn body_file_and_flags_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("body.json");
    std::fs::write(
        &path,
        r#"{"n": 2, "vertices": [[0.98, 0.0], [-0.49, 0.8487048957], [-0.49, -0.8487048957]]}"#,
    )
    .unwrap();
    let p = path.to_str().unwrap();
    let v = json_of(&["flags", "--input", p, "--n", "2"]);
    assert_eq!(v["flag_count"], 6);
    assert_eq!(v["tangency"]["pass"], Value::Bool(true));
    assert!(v["q_product"]["margin"].as_f64().unwrap() >= -1e-9);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.json");
    assert_eq!(
        volprod(&["body", "--input", missing.to_str().unwrap(), "volume"])
            .status
            .code(),
        Some(2)
    );

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    assert_eq!(
        volprod(&["body", "--input", bad.to_str().unwrap(), "volume"])
            .status
            .code(),
        Some(2)
    );

    let flat = dir.path().join("flat.json");
    std::fs::write(&flat, r#"{"n": 2, "vertices": [[0,0],[1,1],[2,2]]}"#).unwrap();
    assert_eq!(
        volprod(&["body", "--input", flat.to_str().unwrap(), "volume"])
            .status
            .code(),
        Some(3)
    );

    // the cube is not inside the simplex
    assert_eq!(
        volprod(&["flags", "--builtin", "cube:2"]).status.code(),
        Some(3)
    );
    assert_eq!(
        volprod(&["vp", "--builtin", "cube:2", "--tol", "0"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        volprod(&["vp", "--builtin", "simplex:2", "--input", "x"])
            .status
            .code(),
        Some(2)
    );

    let out = dir.path().join("no-such-dir").join("s.csv");
    let code = volprod(&[
        "sweep",
        "--family",
        "scaling",
        "--n",
        "2",
        "--deltas",
        "0.04",
        "--samples",
        "1",
        "--out",
        out.to_str().unwrap(),
    ])
    .status
    .code();
    assert_eq!(code, Some(2));
}

#[test]
fn tolerance_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_volprod"))
        .args(["vp", "--builtin", "simplex:2"])
        .env("VOLPROD_TOL", "-1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

fn sweep(dir: &Path, name: &str, family: &str, extra: &[&str]) -> (Vec<u8>, Value) {
    let csv = dir.join(format!("{name}.csv"));
    let mut args = vec![
        "sweep",
        "--family",
        family,
        "--n",
        "2",
        "--deltas",
        "0.04,0.02,0.01",
        "--samples",
        "20",
        "--seed",
        "11",
        "--out",
        csv.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    json_of(&args);
    let summary = std::fs::read(dir.join(format!("{name}.summary.json"))).unwrap();
    (
        std::fs::read(csv).unwrap(),
        serde_json::from_slice(&summary).unwrap(),
    )
}

#[test]
fn sweep_writes_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let (bytes, summary) = sweep(dir.path(), "a", "vertex-shrink", &[]);
    let text = String::from_utf8(bytes.clone()).unwrap();
    let mut lines = text.lines();
    assert!(lines
        .next()
        .unwrap()
        .starts_with("family,n,seed,record_index,delta_spec"));
    assert_eq!(lines.count(), 60);
    assert!(summary["vp_gap_slope"].as_f64().unwrap() > 0.0);

    let (again, _) = sweep(dir.path(), "b", "vertex-shrink", &["--jobs", "1"]);
    assert_eq!(bytes, again);

    let fit = json_of(&["fit", dir.path().join("a.csv").to_str().unwrap()]);
    assert!(fit["vp_gap_slope"].as_f64().unwrap() > 0.0);
    assert!(fit.get("note").is_none());
}

#[test]
fn fit_flags_scaling_family() {
    let dir = tempfile::tempdir().unwrap();
    sweep(dir.path(), "s", "scaling", &[]);
    let fit = json_of(&["fit", dir.path().join("s.csv").to_str().unwrap()]);
    assert_eq!(fit["note"], "affine-trivial family");
    assert!(fit["vp_gap_slope"].as_f64().unwrap().abs() < 1e-9);
}
