//! Point-to-polytope distance (min-norm point by Frank-Wolfe with away
//! steps) and the Hausdorff distance between polytopes.

use super::Polytope;
use crate::error::{GeomError, Result};
use crate::numkit::Vector;

const GAP_TOL: f64 = 1e-12;
const MAX_ITERS: usize = 200_000;

/// Minimum-norm point of `conv(points)`, returned with its convex weights.
pub fn min_norm_point(points: &[Vector]) -> (Vector, Vec<f64>) {
    let k = points.len();
    let start = (0..k)
        .min_by(|&a, &b| {
            points[a]
                .norm_squared()
                .total_cmp(&points[b].norm_squared())
        })
        .expect("min_norm_point needs at least one point");
    let mut weights = vec![0.0; k];
    weights[start] = 1.0;
    let mut y = points[start].clone();

    for _ in 0..MAX_ITERS {
        let scores: Vec<f64> = points.iter().map(|p| p.dot(&y)).collect();
        let yy = y.norm_squared();
        let s = (0..k)
            .min_by(|&a, &b| scores[a].total_cmp(&scores[b]))
            .unwrap();
        let fw_gap = yy - scores[s];
        if fw_gap <= GAP_TOL {
            break;
        }
        let a = (0..k)
            .filter(|&i| weights[i] > 0.0)
            .max_by(|&i, &j| scores[i].total_cmp(&scores[j]))
            .unwrap();
        let away_gap = scores[a] - yy;

        let (dir, max_step, toward) = if fw_gap >= away_gap {
            (&points[s] - &y, 1.0, true)
        } else {
            let w = weights[a];
            (&y - &points[a], w / (1.0 - w), false)
        };
        let dd = dir.norm_squared();
        if dd == 0.0 {
            break;
        }
        let step = (-y.dot(&dir) / dd).clamp(0.0, max_step);
        if step == 0.0 {
            break;
        }
        if toward {
            for w in weights.iter_mut() {
                *w *= 1.0 - step;
            }
            weights[s] += step;
            if step >= 1.0 {
                weights.iter_mut().for_each(|w| *w = 0.0);
                weights[s] = 1.0;
            }
        } else {
            for w in weights.iter_mut() {
                *w *= 1.0 + step;
            }
            weights[a] -= step;
            if step >= max_step {
                weights[a] = 0.0;
            }
        }
        y += dir * step;
    }
    (y, weights)
}

/// Euclidean distance from `x` to the polytope (0 inside).
pub fn distance_to_polytope(x: &Vector, q: &Polytope) -> f64 {
    if q.contains(x, 0.0) {
        return 0.0;
    }
    let shifted: Vec<Vector> = q.vertices().iter().map(|v| v - x).collect();
    min_norm_point(&shifted).0.norm()
}

/// Hausdorff distance. For convex polytopes the one-sided maxima are attained
/// at vertices.
pub fn hausdorff(p: &Polytope, q: &Polytope) -> Result<f64> {
    if p.dim() != q.dim() {
        return Err(GeomError::DimensionMismatch {
            expected: p.dim(),
            got: q.dim(),
        });
    }
    let one_sided = |a: &Polytope, b: &Polytope| {
        a.vertices()
            .iter()
            .map(|v| distance_to_polytope(v, b))
            .fold(0.0, f64::max)
    };
    Ok(one_sided(p, q).max(one_sided(q, p)))
}

/// `max |h_p(θ) - h_q(θ)|` over a deterministic set of unit directions: the
/// nonzero vectors of `{-1, 0, 1}^n` plus all facet normals of both bodies.
/// Always a lower bound for the Hausdorff distance.
pub fn support_gap(p: &Polytope, q: &Polytope) -> Result<f64> {
    if p.dim() != q.dim() {
        return Err(GeomError::DimensionMismatch {
            expected: p.dim(),
            got: q.dim(),
        });
    }
    let n = p.dim();
    let mut dirs: Vec<Vector> = Vec::new();
    let total = 3usize.pow(n as u32);
    for code in 1..total {
        let mut c = code;
        let v = Vector::from_fn(n, |_, _| {
            let d = (c % 3) as f64 - 1.0;
            c /= 3;
            d
        });
        if v.norm() > 0.0 {
            dirs.push(v.normalize());
        }
    }
    dirs.extend(
        p.halfspaces()
            .iter()
            .chain(q.halfspaces())
            .map(|h| h.normal.normalize()),
    );
    Ok(dirs
        .iter()
        .map(|d| (p.support(d) - q.support(d)).abs())
        .fold(0.0, f64::max))
}
