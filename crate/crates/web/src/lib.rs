//! Browser bindings for the planar demo page.
//!
//! Every export takes and returns JSON strings; failures come back as
//! `{"error": "..."}`.

use serde::Serialize;
use serde_json::{json, Value};
use volprod::experiments::{generate, Family, GeneratorSpec};
use volprod::polarity::{polar, santalo_point, DEFAULT_TOL};
use volprod::polytope::convex_hull;
use volprod::simplexflags::{
    all_tangent_data, build_flag_polytopes, lemma_report, sandwich_delta, RegularSimplex,
};
use volprod::{Polytope, Vector};
use wasm_bindgen::prelude::*;

type Point = [f64; 2];

fn to_point(v: &Vector) -> Point {
    [v[0], v[1]]
}

/// Polygon vertices in counter-clockwise order.
fn polygon(p: &Polytope) -> Vec<Point> {
    let c =
        p.vertices().iter().fold(Vector::zeros(2), |acc, v| acc + v) / p.vertices().len() as f64;
    let mut pts: Vec<Point> = p.vertices().iter().map(to_point).collect();
    pts.sort_by(|a, b| {
        let ta = (a[1] - c[1]).atan2(a[0] - c[0]);
        let tb = (b[1] - c[1]).atan2(b[0] - c[0]);
        ta.total_cmp(&tb)
    });
    pts
}

fn parse_points(points_json: &str) -> Result<Polytope, String> {
    let pts: Vec<Point> = serde_json::from_str(points_json).map_err(|e| e.to_string())?;
    let vs: Vec<Vector> = pts.iter().map(|p| Vector::from_column_slice(p)).collect();
    convex_hull(&vs).map_err(|e| e.to_string())
}

fn reply<T: Serialize>(r: Result<T, String>) -> String {
    match r {
        Ok(v) => serde_json::to_string(&v)
            .unwrap_or_else(|e| json!({ "error": e.to_string() }).to_string()),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

/// Hull of the given points, its Santaló point and the polar body there.
#[wasm_bindgen]
pub fn santalo(points_json: &str) -> String {
    reply(santalo_inner(points_json))
}

fn santalo_inner(points_json: &str) -> Result<Value, String> {
    let k = parse_points(points_json)?;
    let s = santalo_point(&k, DEFAULT_TOL).map_err(|e| e.to_string())?;
    let area = k.volume().map_err(|e| e.to_string())?;
    // draw the polar translated to the Santaló point
    let shifted = s
        .polar_at_s
        .translate(&s.point)
        .map_err(|e| e.to_string())?;
    Ok(json!({
        "body": polygon(&k),
        "point": to_point(&s.point),
        "polar": polygon(&shifted),
        "body_area": area,
        "polar_area": s.polar_volume,
        "vp": area * s.polar_volume,
        "iterations": s.iterations,
        "residuals": s.residual_history,
    }))
}

/// Polar body of the hull at the centre `(x, y)`.
#[wasm_bindgen]
pub fn polar_at(points_json: &str, x: f64, y: f64) -> String {
    reply(polar_at_inner(points_json, x, y))
}

fn polar_at_inner(points_json: &str, x: f64, y: f64) -> Result<Value, String> {
    let k = parse_points(points_json)?;
    let z = Vector::from_vec(vec![x, y]);
    if k.facet_distance(&z) <= 0.0 {
        return Ok(json!({ "inside": false }));
    }
    let p = polar(&k, &z).map_err(|e| e.to_string())?;
    let area = p.volume().map_err(|e| e.to_string())?;
    let best = santalo_point(&k, DEFAULT_TOL).map_err(|e| e.to_string())?;
    let shifted = p.translate(&z).map_err(|e| e.to_string())?;
    Ok(json!({
        "inside": true,
        "polar": polygon(&shifted),
        "polar_area": area,
        "ratio_to_minimum": area / best.polar_volume,
        "distance_to_santalo": (z - best.point).norm(),
    }))
}

/// Perturbed planar simplex with its flag triangles `P` and `Q`.
#[wasm_bindgen]
pub fn flag_cells(family: &str, delta: f64, seed: u32) -> String {
    reply(flag_cells_inner(family, delta, seed))
}

fn flag_cells_inner(family: &str, delta: f64, seed: u32) -> Result<Value, String> {
    let family: Family = family
        .parse()
        .map_err(|e: volprod::GeomError| e.to_string())?;
    let s = RegularSimplex::new(2).map_err(|e| e.to_string())?;
    let spec = GeneratorSpec::new(family, 2, delta, seed as u64, 0);
    let k = generate(&spec).map_err(|e| e.to_string())?;
    let d = sandwich_delta(&k, &s).map_err(|e| e.to_string())?;
    let data = all_tangent_data(&k, &s).map_err(|e| e.to_string())?;
    let flags = build_flag_polytopes(&k, &s, &data, d).map_err(|e| e.to_string())?;
    let report = lemma_report(&k, &s).map_err(|e| e.to_string())?;
    let triangles = |u: &volprod::simplexflags::FlagUnion| -> Vec<Vec<Point>> {
        u.simplices
            .iter()
            .map(|t| t.iter().map(to_point).collect())
            .collect()
    };
    Ok(json!({
        "body": polygon(&k),
        "simplex": polygon(&s.polytope()),
        "inner": polygon(&s.polytope().scale_by(1.0 - d).map_err(|e| e.to_string())?),
        "delta": d,
        "p": triangles(&flags.p),
        "q": triangles(&flags.q),
        "touch": data.iter().map(|t| to_point(&t.x)).collect::<Vec<_>>(),
        "report": report,
    }))
}
