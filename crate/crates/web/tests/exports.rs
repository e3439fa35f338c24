use serde_json::Value;
use volprod_web::{flag_cells, polar_at, santalo};

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

const TRIANGLE: &str = "[[1,0],[-0.5,0.8660254037844386],[-0.5,-0.8660254037844386],[0,0]]";

#[test]
fn santalo_of_triangle() {
    let r = parse(santalo(TRIANGLE));
    assert!((r["vp"].as_f64().unwrap() - 6.75).abs() < 1e-9);
    assert_eq!(r["body"].as_array().unwrap().len(), 3);
    assert_eq!(r["polar"].as_array().unwrap().len(), 3);
}

#[test]
fn polar_away_from_santalo_is_larger() {
    let r = parse(polar_at(TRIANGLE, 0.1, 0.05));
    assert_eq!(r["inside"], true);
    assert!(r["ratio_to_minimum"].as_f64().unwrap() > 1.0);
    let out = parse(polar_at(TRIANGLE, 3.0, 0.0));
    assert_eq!(out["inside"], false);
}

#[test]
fn flag_cells_report() {
    let r = parse(flag_cells("vertex-shrink", 0.04, 1));
    assert_eq!(r["p"].as_array().unwrap().len(), 6);
    assert_eq!(r["report"]["tangency"]["pass"], true);
    assert!((r["delta"].as_f64().unwrap() - 0.04).abs() < 1e-9);
}

#[test]
fn errors_are_json() {
    assert!(parse(santalo("[[0,0],[1,1]]"))["error"].is_string());
    assert!(parse(santalo("nonsense"))["error"].is_string());
    assert!(parse(flag_cells("no-such-family", 0.04, 1))["error"].is_string());
    assert!(parse(flag_cells("vertex-shrink", 0.5, 1))["error"].is_string());
}
