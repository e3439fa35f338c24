//! Incremental beneath-beyond convex hull in arbitrary (small) dimension.
//!
//! Points are inserted in lexicographic order. The working hull keeps a
//! simplicial boundary; coplanar simplicial facets are merged at the end and
//! points that are not extreme (lying inside an edge or face) are dropped.

use std::collections::HashMap;

use super::{vertex_scale, Polytope};
use crate::error::{GeomError, Result};
use crate::numkit::{affine_rank, hyperplane_normal, Vector, GEOM_TOL};

struct Facet {
    verts: Vec<usize>,
    normal: Vector,
    offset: f64,
    alive: bool,
}

pub fn convex_hull(points: &[Vector]) -> Result<Polytope> {
    let Some(first) = points.first() else {
        return Err(GeomError::TooFew { needed: 1, got: 0 });
    };
    let dim = first.len();
    if dim == 0 {
        return Err(GeomError::InvalidInput("zero-dimensional points".into()));
    }
    for p in points {
        if p.len() != dim {
            return Err(GeomError::DimensionMismatch {
                expected: dim,
                got: p.len(),
            });
        }
        if !crate::numkit::is_finite(p) {
            return Err(GeomError::InvalidInput("non-finite coordinate".into()));
        }
    }
    let scale = vertex_scale(points);
    let tol = GEOM_TOL * scale;

    let mut pts: Vec<Vector> = points.to_vec();
    pts.sort_by(|a, b| {
        a.iter()
            .zip(b.iter())
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut uniq: Vec<Vector> = Vec::with_capacity(pts.len());
    for p in pts {
        if !uniq.iter().any(|q| (&p - q).amax() <= tol) {
            uniq.push(p);
        }
    }
    let pts = uniq;

    if dim == 1 {
        return hull_1d(&pts, tol);
    }

    let initial = initial_simplex(&pts, dim, tol)?;
    let center = initial
        .iter()
        .fold(Vector::zeros(dim), |acc, &i| acc + &pts[i])
        / (dim + 1) as f64;

    let mut facets: Vec<Facet> = Vec::new();
    for skip in 0..=dim {
        let verts: Vec<usize> = initial
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != skip)
            .map(|(_, &i)| i)
            .collect();
        facets.push(make_facet(&pts, verts, &center)?);
    }

    let mut used = vec![false; pts.len()];
    for &i in &initial {
        used[i] = true;
    }
    for (pi, p) in pts.iter().enumerate() {
        if used[pi] {
            continue;
        }
        let visible: Vec<usize> = facets
            .iter()
            .enumerate()
            .filter(|(_, f)| f.alive && f.normal.dot(p) - f.offset > tol)
            .map(|(i, _)| i)
            .collect();
        if visible.is_empty() {
            continue;
        }
        let mut ridges: HashMap<Vec<usize>, usize> = HashMap::new();
        for &fi in &visible {
            let verts = &facets[fi].verts;
            for skip in 0..verts.len() {
                let mut ridge = verts.clone();
                ridge.remove(skip);
                *ridges.entry(ridge).or_insert(0) += 1;
            }
        }
        let mut horizon: Vec<Vec<usize>> = ridges
            .into_iter()
            .filter(|(_, c)| *c == 1)
            .map(|(r, _)| r)
            .collect();
        horizon.sort();
        for &fi in &visible {
            facets[fi].alive = false;
        }
        for ridge in horizon {
            let mut verts = ridge;
            verts.push(pi);
            facets.push(make_facet(&pts, verts, &center)?);
        }
    }

    let live: Vec<&Facet> = facets.iter().filter(|f| f.alive).collect();

    // merge coplanar simplicial facets
    let mut planes: Vec<(Vector, f64)> = Vec::new();
    for f in &live {
        let dup = planes
            .iter()
            .any(|(a, b)| (a - &f.normal).amax() <= GEOM_TOL && (b - f.offset).abs() <= tol);
        if !dup {
            planes.push((f.normal.clone(), f.offset));
        }
    }

    // extreme points: on hull facets whose normals span R^n
    let mut candidates: Vec<usize> = live.iter().flat_map(|f| f.verts.iter().copied()).collect();
    candidates.sort_unstable();
    candidates.dedup();
    let vertices: Vec<Vector> = candidates
        .into_iter()
        .filter(|&i| {
            let normals: Vec<Vector> = planes
                .iter()
                .filter(|(a, b)| (a.dot(&pts[i]) - b).abs() <= tol)
                .map(|(a, _)| a.clone())
                .collect();
            linear_rank(&normals) == dim
        })
        .map(|i| pts[i].clone())
        .collect();

    Polytope::assemble(dim, vertices, planes)
}

fn hull_1d(pts: &[Vector], tol: f64) -> Result<Polytope> {
    let lo = pts.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
    let hi = pts.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
    if hi - lo <= tol {
        return Err(GeomError::DegenerateHull { rank: 0, dim: 1 });
    }
    Polytope::assemble(
        1,
        vec![Vector::from_element(1, lo), Vector::from_element(1, hi)],
        vec![
            (Vector::from_element(1, 1.0), hi),
            (Vector::from_element(1, -1.0), -lo),
        ],
    )
}

/// Greedy choice of `dim + 1` affinely independent points, maximizing the
/// residual at each step (ties resolved by lexicographic order).
fn initial_simplex(pts: &[Vector], dim: usize, tol: f64) -> Result<Vec<usize>> {
    let mut chosen = vec![0usize];
    let mut basis: Vec<Vector> = Vec::new();
    let base = &pts[0];
    while chosen.len() < dim + 1 {
        let mut best: Option<(usize, f64, Vector)> = None;
        for (i, p) in pts.iter().enumerate() {
            if chosen.contains(&i) {
                continue;
            }
            let mut d = p - base;
            for b in &basis {
                let proj = b.dot(&d);
                d -= b * proj;
            }
            let r = d.norm();
            if best.as_ref().is_none_or(|(_, br, _)| r > *br) {
                best = Some((i, r, d));
            }
        }
        match best {
            Some((i, r, d)) if r > tol => {
                chosen.push(i);
                basis.push(d / r);
            }
            _ => {
                return Err(GeomError::DegenerateHull {
                    rank: affine_rank(pts, GEOM_TOL),
                    dim,
                })
            }
        }
    }
    Ok(chosen)
}

fn make_facet(pts: &[Vector], mut verts: Vec<usize>, center: &Vector) -> Result<Facet> {
    verts.sort_unstable();
    let corners: Vec<Vector> = verts.iter().map(|&i| pts[i].clone()).collect();
    let raw = hyperplane_normal(&corners);
    let norm = raw.norm();
    if !(norm > 0.0) {
        return Err(GeomError::Internal("degenerate facet in hull".into()));
    }
    let mut normal = raw / norm;
    let mut offset = normal.dot(&corners[0]);
    if normal.dot(center) > offset {
        normal = -normal;
        offset = -offset;
    }
    Ok(Facet {
        verts,
        normal,
        offset,
        alive: true,
    })
}

fn linear_rank(vectors: &[Vector]) -> usize {
    let mut basis: Vec<Vector> = Vec::new();
    for v in vectors {
        let mut d = v.clone();
        for b in &basis {
            let proj = b.dot(&d);
            d -= b * proj;
        }
        let norm = d.norm();
        if norm > 1e-7 * v.norm().max(1e-300) {
            basis.push(d / norm);
        }
    }
    basis.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::vector;
    use crate::simplexflags::RegularSimplex;
    use proptest::prelude::*;

    #[test]
    fn square_with_center() {
        let pts = vec![
            vector(&[0.0, 0.0]),
            vector(&[1.0, 0.0]),
            vector(&[0.0, 1.0]),
            vector(&[1.0, 1.0]),
            vector(&[0.5, 0.5]),
        ];
        let p = convex_hull(&pts).unwrap();
        assert_eq!(p.vertices().len(), 4);
        assert_eq!(p.halfspaces().len(), 4);
        assert!(!p
            .vertices()
            .iter()
            .any(|v| (v - vector(&[0.5, 0.5])).norm() < 1e-12));
        p.validate().unwrap();
    }

    #[test]
    fn collinear_edge_point_dropped() {
        let pts = vec![
            vector(&[0.0, 0.0]),
            vector(&[1.0, 0.0]),
            vector(&[2.0, 0.0]),
            vector(&[0.0, 2.0]),
        ];
        let p = convex_hull(&pts).unwrap();
        assert_eq!(p.vertices().len(), 3);
        assert_eq!(p.halfspaces().len(), 3);
        p.validate().unwrap();
    }

    #[test]
    fn simplex_facets_are_minus_n_vertices() {
        for n in 2..=5 {
            let s = RegularSimplex::new(n).unwrap();
            let p = convex_hull(s.vertices()).unwrap();
            assert_eq!(p.halfspaces().len(), n + 1);
            for h in p.halfspaces() {
                assert!((h.offset - 1.0).abs() < 1e-12);
                let matched = s
                    .vertices()
                    .iter()
                    .any(|v| (&h.normal + v * n as f64).amax() < 1e-10);
                assert!(matched, "normal {:?}", h.normal);
            }
        }
    }

    #[test]
    fn coplanar_points_in_3d() {
        let pts = vec![
            vector(&[0.0, 0.0, 1.0]),
            vector(&[1.0, 0.0, 1.0]),
            vector(&[0.0, 1.0, 1.0]),
            vector(&[1.0, 1.0, 1.0]),
        ];
        match convex_hull(&pts) {
            Err(GeomError::DegenerateHull { rank, dim }) => {
                assert_eq!(rank, 2);
                assert_eq!(dim, 3);
            }
            other => panic!("expected degenerate hull, got {other:?}"),
        }
    }

    #[test]
    fn cube_vertices_and_facets() {
        let mut pts = Vec::new();
        for mask in 0..8u32 {
            let c = |b: u32| if mask & b != 0 { 1.0 } else { -1.0 };
            pts.push(vector(&[c(1), c(2), c(4)]));
        }
        pts.push(vector(&[0.0, 0.0, 0.0]));
        pts.push(vector(&[1.0, 0.0, 0.0])); // face centre
        pts.push(vector(&[1.0, 1.0, 0.0])); // edge midpoint
        let p = convex_hull(&pts).unwrap();
        assert_eq!(p.vertices().len(), 8);
        assert_eq!(p.halfspaces().len(), 6);
        assert!(p.incidence().iter().all(|f| f.len() == 4));
        p.validate().unwrap();
    }

    #[test]
    fn one_dimensional_interval() {
        let pts = vec![vector(&[0.3]), vector(&[-1.0]), vector(&[2.0])];
        let p = convex_hull(&pts).unwrap();
        assert_eq!(p.vertices().len(), 2);
        assert!((p.volume().unwrap() - 3.0).abs() < 1e-15);
    }

    #[test]
    fn cross_polytopes() {
        for n in 2..=5 {
            let mut pts = Vec::new();
            for i in 0..n {
                for sign in [1.0, -1.0] {
                    let mut a = Vector::zeros(n);
                    a[i] = sign;
                    pts.push(a);
                }
            }
            let p = convex_hull(&pts).unwrap();
            assert_eq!(p.vertices().len(), 2 * n);
            assert_eq!(p.halfspaces().len(), 1 << n);
            let want = 2f64.powi(n as i32) / crate::numkit::factorial(n);
            assert!((p.volume().unwrap() - want).abs() < 1e-12);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn hull_contains_input_and_is_idempotent(
            raw in prop::collection::vec(-1.0f64..1.0, 12..60),
            n in 2usize..5,
        ) {
            let pts: Vec<Vector> = raw.chunks_exact(n).map(Vector::from_column_slice).collect();
            prop_assume!(pts.len() > n + 1);
            let Ok(p) = convex_hull(&pts) else { return Ok(()); };
            for x in &pts {
                prop_assert!(p.contains(x, 1e-9));
            }
            for v in p.vertices() {
                prop_assert!(pts.iter().any(|x| (x - v).amax() == 0.0));
            }
            let again = convex_hull(p.vertices()).unwrap();
            prop_assert_eq!(again.vertices().len(), p.vertices().len());
            prop_assert!((again.volume().unwrap() - p.volume().unwrap()).abs() < 1e-12);
        }
    }
}
