use serde::Serialize;

use super::{Face, RegularSimplex};
use crate::error::{GeomError, Result};
use crate::numkit::{solve_lp, LinearProgram, Vector, GEOM_TOL};
use crate::polarity::polar;
use crate::polytope::Polytope;

const RECIPROCAL_TOL: f64 = 1e-9;
const ZERO_DELTA: f64 = 1e-12;

/// Sandwich parameter `min{d : (1-d)Δ_n ⊆ K ⊆ Δ_n}`.
pub fn sandwich_delta(k: &Polytope, s: &RegularSimplex) -> Result<f64> {
    check_sandwich(k, s)?;
    let mut tau_min = f64::INFINITY;
    for v in s.vertices() {
        let tau = k
            .halfspaces()
            .iter()
            .filter_map(|h| {
                let a = h.normal.dot(v);
                (a > 0.0).then(|| h.offset / a)
            })
            .fold(f64::INFINITY, f64::min);
        tau_min = tau_min.min(tau);
    }
    let delta = 1.0 - tau_min;
    Ok(if delta.abs() <= ZERO_DELTA {
        0.0
    } else {
        delta.max(0.0)
    })
}

/// `K ⊆ Δ_n` (vertexwise) and `0 ∈ int K`.
pub fn check_sandwich(k: &Polytope, s: &RegularSimplex) -> Result<()> {
    if k.dim() != s.dim() {
        return Err(GeomError::DimensionMismatch {
            expected: s.dim(),
            got: k.dim(),
        });
    }
    let violating: Vec<usize> = k
        .vertices()
        .iter()
        .enumerate()
        .filter(|(_, v)| !s.contains(v, GEOM_TOL))
        .map(|(i, _)| i)
        .collect();
    if !violating.is_empty() {
        return Err(GeomError::NotInSimplex { violating });
    }
    let r = k.facet_distance(&Vector::zeros(k.dim()));
    if r <= GEOM_TOL * k.scale() {
        return Err(GeomError::CenterNotInterior { inradius: r });
    }
    Ok(())
}

/// Result of one tangency problem: the largest `t` with
/// `t c + span(face)^⊥` meeting the body, a touching point and `t c`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Touch {
    pub t: f64,
    #[serde(with = "crate::numkit::serde_la::vector")]
    pub x: Vector,
    #[serde(with = "crate::numkit::serde_la::vector")]
    pub y: Vector,
}

/// Maximize `t` over `x = Σ λ_i u_i` (convex weights) subject to
/// `<x, w> = t <c, w>` for every face vertex `w`.
fn touch(body: &[Vector], face: &[Vector], centroid: &Vector) -> Result<Touch> {
    let m = body.len();
    let mut objective = vec![0.0; m + 1];
    objective[m] = 1.0;
    let mut lp = LinearProgram::maximize(&objective).free(m);
    let mut ones = vec![1.0; m + 1];
    ones[m] = 0.0;
    lp = lp.eq(&ones, 1.0);
    for w in face {
        let mut row: Vec<f64> = body.iter().map(|u| u.dot(w)).collect();
        row.push(-centroid.dot(w));
        lp = lp.eq(&row, 0.0);
    }
    let sol = solve_lp(&lp).map_err(|e| match e {
        GeomError::Infeasible | GeomError::Unbounded => {
            GeomError::Internal(format!("tangency LP failed: {e}"))
        }
        other => other,
    })?;
    let t = sol.x[m];
    let x = body
        .iter()
        .enumerate()
        .fold(Vector::zeros(centroid.len()), |acc, (i, u)| {
            acc + u * sol.x[i]
        });
    Ok(Touch {
        t,
        x,
        y: centroid * t,
    })
}

/// Tangent point of `K` in the direction of the face `F` of `Δ_n`.
pub fn tangent_touch(k: &Polytope, s: &RegularSimplex, face: &Face) -> Result<Touch> {
    check_sandwich(k, s)?;
    primal_touch(k, s, face)
}

fn primal_touch(k: &Polytope, s: &RegularSimplex, face: &Face) -> Result<Touch> {
    let corners: Vec<Vector> = face
        .vertex_set
        .iter()
        .map(|&i| s.vertices()[i].clone())
        .collect();
    touch(k.vertices(), &corners, &face.centroid)
}

fn dual_touch(kpolar: &Polytope, s: &RegularSimplex, face: &Face) -> Result<Touch> {
    let polar_vertices = s.polar_vertices();
    let corners: Vec<Vector> = face
        .dual_vertex_set(s.dim())
        .into_iter()
        .map(|j| polar_vertices[j].clone())
        .collect();
    touch(kpolar.vertices(), &corners, &face.dual_centroid)
}

/// The same construction for `K°`, the dual face `F*` and `Δ_n°`. Fails
/// unless `t* t = 1` within `1e-9`.
pub fn tangent_touch_dual(k: &Polytope, s: &RegularSimplex, face: &Face) -> Result<Touch> {
    check_sandwich(k, s)?;
    let kpolar = polar(k, &Vector::zeros(k.dim()))?;
    let primal = primal_touch(k, s, face)?;
    let dual = dual_touch(&kpolar, s, face)?;
    let product = primal.t * dual.t;
    if (product - 1.0).abs() > RECIPROCAL_TOL {
        return Err(GeomError::Internal(format!(
            "t* t = {product} for face {:?}",
            face.vertex_set
        )));
    }
    Ok(dual)
}

/// Tangency data of one face: `(t, x_F, y_F)` and `(t*, x_F*, y_F*)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TangentData {
    pub face: Vec<usize>,
    pub t: f64,
    #[serde(with = "crate::numkit::serde_la::vector")]
    pub x: Vector,
    #[serde(with = "crate::numkit::serde_la::vector")]
    pub y: Vector,
    pub t_star: f64,
    #[serde(with = "crate::numkit::serde_la::vector")]
    pub x_star: Vector,
    #[serde(with = "crate::numkit::serde_la::vector")]
    pub y_star: Vector,
}

/// Worst deviation of each tangency clause over a set of faces.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TangentResiduals {
    /// `max |<x, x*> - 1|, |<y, y*> - 1|`
    pub pairing: f64,
    /// `max |<x - y, c_F>|, |<x* - y*, c_F>|`
    pub orthogonality: f64,
    /// `max |x - y| / (2δ)` and `max |x* - y*| / (2nδ)`; `None` at `δ = 0`
    pub primal_gap_ratio: Option<f64>,
    pub dual_gap_ratio: Option<f64>,
    pub max_primal_gap: f64,
    pub max_dual_gap: f64,
    /// `max (1 - δ) - t` and `max t - 1` (positive means violated)
    pub t_range_violation: f64,
    /// `max |t t* - 1|`
    pub reciprocity: f64,
    /// `max |y - t c_F|, |y* - c_F*/t|`
    pub centroid_scaling: f64,
}

impl TangentResiduals {
    /// Every clause holds within `tol`; the gap bounds are strict up to `tol`.
    pub fn all_hold(&self, n: usize, delta: f64, tol: f64) -> bool {
        self.pairing <= tol
            && self.orthogonality <= tol
            && self.max_primal_gap < 2.0 * delta + tol
            && self.max_dual_gap < 2.0 * n as f64 * delta + tol
            && self.t_range_violation <= tol
            && self.reciprocity <= tol
            && self.centroid_scaling <= tol
    }

    /// Largest of the equality residuals.
    pub fn max_equality_residual(&self) -> f64 {
        self.pairing
            .max(self.orthogonality)
            .max(self.reciprocity)
            .max(self.centroid_scaling)
            .max(self.t_range_violation.max(0.0))
    }
}

/// Tangency data for every proper face, in face order.
pub fn all_tangent_data(k: &Polytope, s: &RegularSimplex) -> Result<Vec<TangentData>> {
    check_sandwich(k, s)?;
    let kpolar = polar(k, &Vector::zeros(k.dim()))?;
    let faces = s.faces();
    let solve = |face: &Face| -> Result<TangentData> {
        let p = primal_touch(k, s, face)?;
        let d = dual_touch(&kpolar, s, face)?;
        Ok(TangentData {
            face: face.vertex_set.clone(),
            t: p.t,
            x: p.x,
            y: p.y,
            t_star: d.t,
            x_star: d.x,
            y_star: d.y,
        })
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        faces.par_iter().map(solve).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        faces.iter().map(solve).collect()
    }
}

pub fn tangent_residuals(s: &RegularSimplex, data: &[TangentData], delta: f64) -> TangentResiduals {
    let n = s.dim();
    let mut r = TangentResiduals {
        pairing: 0.0,
        orthogonality: 0.0,
        primal_gap_ratio: None,
        dual_gap_ratio: None,
        max_primal_gap: 0.0,
        max_dual_gap: 0.0,
        t_range_violation: f64::NEG_INFINITY,
        reciprocity: 0.0,
        centroid_scaling: 0.0,
    };
    for d in data {
        let face = s.face(&d.face).expect("face from enumeration");
        r.pairing = r
            .pairing
            .max((d.x.dot(&d.x_star) - 1.0).abs())
            .max((d.y.dot(&d.y_star) - 1.0).abs());
        r.orthogonality = r
            .orthogonality
            .max((&d.x - &d.y).dot(&face.centroid).abs())
            .max((&d.x_star - &d.y_star).dot(&face.centroid).abs());
        r.max_primal_gap = r.max_primal_gap.max((&d.x - &d.y).norm());
        r.max_dual_gap = r.max_dual_gap.max((&d.x_star - &d.y_star).norm());
        r.t_range_violation = r.t_range_violation.max((1.0 - delta) - d.t).max(d.t - 1.0);
        r.reciprocity = r.reciprocity.max((d.t * d.t_star - 1.0).abs());
        r.centroid_scaling = r
            .centroid_scaling
            .max((&d.y - &face.centroid * d.t).amax())
            .max((&d.y_star - &face.dual_centroid / d.t).amax());
    }
    if delta > 0.0 {
        r.primal_gap_ratio = Some(r.max_primal_gap / (2.0 * delta));
        r.dual_gap_ratio = Some(r.max_dual_gap / (2.0 * n as f64 * delta));
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::convex_hull;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn vertex_shrink(s: &RegularSimplex, shrinks: &[f64]) -> Polytope {
        let n = s.dim() as f64;
        let mut pts: Vec<Vector> = s.vertices().iter().map(|v| v * (-1.0 / n)).collect();
        pts.extend(s.vertices().iter().zip(shrinks).map(|(v, d)| v * (1.0 - d)));
        convex_hull(&pts).unwrap()
    }

    /// Largest `t` with `t v ∈ K`, by bisection on membership.
    fn ray_oracle(k: &Polytope, v: &Vector) -> f64 {
        let (mut lo, mut hi) = (0.0, 2.0);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if k.contains(&(v * mid), 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    #[test]
    fn delta_of_simplex_and_scaled_simplex() {
        for n in 2..=4 {
            let s = RegularSimplex::new(n).unwrap();
            assert_eq!(sandwich_delta(&s.polytope(), &s).unwrap(), 0.0);
            let k = s.polytope().scale_by(0.97).unwrap();
            assert!((sandwich_delta(&k, &s).unwrap() - 0.03).abs() < 1e-12);
        }
    }

    #[test]
    fn delta_matches_bisection() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 2..=4 {
            let s = RegularSimplex::new(n).unwrap();
            let shrinks: Vec<f64> = (0..=n).map(|_| rng.random_range(0.0..0.04)).collect();
            let k = vertex_shrink(&s, &shrinks);
            let oracle = 1.0
                - s.vertices()
                    .iter()
                    .map(|v| ray_oracle(&k, v))
                    .fold(f64::INFINITY, f64::min);
            let want = shrinks.iter().cloned().fold(0.0, f64::max);
            let got = sandwich_delta(&k, &s).unwrap();
            assert!((got - oracle).abs() < 1e-12);
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn outside_simplex_is_rejected() {
        let s = RegularSimplex::new(2).unwrap();
        let k = s.polytope().scale_by(1.01).unwrap();
        match sandwich_delta(&k, &s) {
            Err(GeomError::NotInSimplex { violating }) => assert_eq!(violating.len(), 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn origin_on_boundary_is_rejected() {
        let s = RegularSimplex::new(2).unwrap();
        let v = s.vertices();
        let k = convex_hull(&[Vector::zeros(2), v[0].clone(), v[1].clone()]).unwrap();
        assert!(matches!(
            sandwich_delta(&k, &s),
            Err(GeomError::CenterNotInterior { .. })
        ));
    }

    #[test]
    fn vertex_face_of_planar_simplex_touches_at_one() {
        // grid search for max <x, v_0> over Δ_2, compared with t |c_F|^2
        let s = RegularSimplex::new(2).unwrap();
        let v = s.vertices();
        let mut best = f64::NEG_INFINITY;
        let m = 400;
        for i in 0..=m {
            for j in 0..=(m - i) {
                let (a, b) = (i as f64 / m as f64, j as f64 / m as f64);
                let x = &v[0] * a + &v[1] * b + &v[2] * (1.0 - a - b);
                best = best.max(x.dot(&v[0]));
            }
        }
        let face = s.face(&[0]).unwrap();
        let touch = tangent_touch(&s.polytope(), &s, &face).unwrap();
        assert!((touch.t - best / face.centroid.norm_squared()).abs() < 1e-12);
        assert!((touch.t - 1.0).abs() < 1e-12);
    }

    #[test]
    fn simplex_touches_at_centroids() {
        for n in 2..=4 {
            let s = RegularSimplex::new(n).unwrap();
            let k = s.polytope();
            for face in s.faces() {
                let p = tangent_touch(&k, &s, &face).unwrap();
                assert!((p.t - 1.0).abs() < 1e-10);
                let d = tangent_touch_dual(&k, &s, &face).unwrap();
                assert!((d.t - 1.0).abs() < 1e-10);
                if face.vertex_set.len() == n {
                    assert!((&p.x - &face.centroid).amax() < 1e-10);
                    assert!((&d.x - &face.dual_centroid).amax() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn scaled_simplex_touches_at_scaled_points() {
        let delta = 0.03;
        for n in 2..=3 {
            let s = RegularSimplex::new(n).unwrap();
            let k = s.polytope().scale_by(1.0 - delta).unwrap();
            for face in s.faces() {
                let p = tangent_touch(&k, &s, &face).unwrap();
                assert!((p.t - (1.0 - delta)).abs() < 1e-10);
                let d = tangent_touch_dual(&k, &s, &face).unwrap();
                assert!((d.t - 1.0 / (1.0 - delta)).abs() < 1e-10);
                if face.vertex_set.len() == n {
                    assert!((&p.x - &face.centroid * (1.0 - delta)).amax() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn random_shrinks_satisfy_every_clause() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 2..=3 {
            let s = RegularSimplex::new(n).unwrap();
            for _ in 0..4 {
                let shrinks: Vec<f64> = (0..=n).map(|_| rng.random_range(0.0..0.04)).collect();
                let k = vertex_shrink(&s, &shrinks);
                let delta = sandwich_delta(&k, &s).unwrap();
                let data = all_tangent_data(&k, &s).unwrap();
                assert_eq!(data.len(), (1 << (n + 1)) - 2);
                let r = tangent_residuals(&s, &data, delta);
                assert!(r.all_hold(n, delta, 1e-9), "{r:?}");
                for d in &data {
                    assert!((d.x.dot(&d.x_star) - 1.0).abs() < 1e-9);
                }
            }
        }
    }
}
