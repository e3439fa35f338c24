//! Convex polytopes in dual description: vertices, facet halfspaces and
//! vertex/facet incidence.

mod distance;
mod halfspace;
mod hull;
mod moments;

pub use distance::{distance_to_polytope, hausdorff, min_norm_point, support_gap};
pub use halfspace::halfspace_intersection;
pub use hull::convex_hull;
pub use moments::{simplex_moments, triangulate, BodyMoments};

use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::numkit::{Matrix, Vector, GEOM_TOL};

/// `{x : <normal, x> <= offset}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Halfspace {
    #[serde(with = "crate::numkit::serde_la::vector")]
    pub normal: Vector,
    pub offset: f64,
}

impl Halfspace {
    pub fn new(normal: Vector, offset: f64) -> Result<Self> {
        if !(normal.norm() > 0.0) || !offset.is_finite() {
            return Err(GeomError::InvalidInput(
                "halfspace needs a nonzero normal".into(),
            ));
        }
        Ok(Halfspace { normal, offset })
    }

    /// `offset - <normal, x>`, positive strictly inside.
    pub fn slack(&self, x: &Vector) -> f64 {
        self.offset - self.normal.dot(x)
    }
}

/// A bounded, full-dimensional convex polytope.
///
/// Facet halfspaces are scaled to `offset == 1` when the origin is interior
/// and to unit normals otherwise. `incidence[f]` lists the vertices lying on
/// facet `f`.
#[derive(Debug, Clone)]
pub struct Polytope {
    dim: usize,
    vertices: Vec<Vector>,
    halfspaces: Vec<Halfspace>,
    incidence: Vec<Vec<usize>>,
    interior: Vector,
}

impl Polytope {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vector] {
        &self.vertices
    }

    pub fn halfspaces(&self) -> &[Halfspace] {
        &self.halfspaces
    }

    pub fn incidence(&self) -> &[Vec<usize>] {
        &self.incidence
    }

    /// A point strictly inside (the vertex average).
    pub fn interior_point(&self) -> &Vector {
        &self.interior
    }

    /// Largest absolute vertex coordinate, at least 1.
    pub fn scale(&self) -> f64 {
        vertex_scale(&self.vertices)
    }

    /// Build from known vertices and irredundant facet hyperplanes; incidence
    /// is recomputed and the facets renormalized.
    pub(crate) fn assemble(
        dim: usize,
        vertices: Vec<Vector>,
        planes: Vec<(Vector, f64)>,
    ) -> Result<Polytope> {
        if vertices.len() < dim + 1 {
            return Err(GeomError::DegenerateHull {
                rank: crate::numkit::affine_rank(&vertices, GEOM_TOL),
                dim,
            });
        }
        let scale = vertex_scale(&vertices);
        let tol = GEOM_TOL * scale;
        let interior =
            vertices.iter().fold(Vector::zeros(dim), |acc, v| acc + v) / vertices.len() as f64;

        let origin_inside = planes.iter().all(|(a, b)| *b / a.norm() > tol);
        let mut halfspaces = Vec::with_capacity(planes.len());
        let mut incidence = Vec::with_capacity(planes.len());
        for (a, b) in planes {
            let norm = a.norm();
            let on: Vec<usize> = vertices
                .iter()
                .enumerate()
                .filter(|(_, v)| ((a.dot(v) - b) / norm).abs() <= tol)
                .map(|(i, _)| i)
                .collect();
            let f = if origin_inside { b } else { norm };
            halfspaces.push(Halfspace {
                normal: a / f,
                offset: b / f,
            });
            incidence.push(on);
        }
        Ok(Polytope {
            dim,
            vertices,
            halfspaces,
            incidence,
            interior,
        })
    }

    /// Check the structural invariants; used by tests and debug paths.
    pub fn validate(&self) -> Result<()> {
        let tol = GEOM_TOL * self.scale() * 10.0;
        for (fi, h) in self.halfspaces.iter().enumerate() {
            let norm = h.normal.norm();
            for (vi, v) in self.vertices.iter().enumerate() {
                let slack = h.slack(v) / norm;
                if slack < -tol {
                    return Err(GeomError::Internal(format!(
                        "vertex {vi} violates facet {fi} by {slack:e}"
                    )));
                }
                let on = slack.abs() <= tol;
                if on != self.incidence[fi].contains(&vi) {
                    return Err(GeomError::Internal(format!(
                        "incidence mismatch for vertex {vi}, facet {fi}"
                    )));
                }
            }
            let pts: Vec<Vector> = self.incidence[fi]
                .iter()
                .map(|&i| self.vertices[i].clone())
                .collect();
            if pts.len() < self.dim || crate::numkit::affine_rank(&pts, GEOM_TOL) != self.dim - 1 {
                return Err(GeomError::Internal(format!(
                    "facet {fi} does not span a hyperplane"
                )));
            }
            if h.slack(&self.interior) <= 0.0 {
                return Err(GeomError::Internal("interior witness not interior".into()));
            }
        }
        Ok(())
    }

    /// Support function `h_P(direction)`.
    pub fn support(&self, direction: &Vector) -> f64 {
        self.vertices
            .iter()
            .map(|v| v.dot(direction))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Membership with tolerance `tol` measured in distance to each facet.
    pub fn contains(&self, x: &Vector, tol: f64) -> bool {
        self.halfspaces
            .iter()
            .all(|h| h.normal.dot(x) <= h.offset + tol * h.normal.norm())
    }

    /// Signed distance from `z` to the nearest facet hyperplane.
    pub fn facet_distance(&self, z: &Vector) -> f64 {
        self.halfspaces
            .iter()
            .map(|h| h.slack(z) / h.normal.norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// Radius of the largest ball centred at `z` inside the polytope.
    pub fn inradius_at(&self, z: &Vector) -> Result<f64> {
        let r = self.facet_distance(z);
        if r > 0.0 {
            Ok(r)
        } else {
            Err(GeomError::CenterNotInterior { inradius: r })
        }
    }

    pub fn moments(&self) -> Result<BodyMoments> {
        moments::moments(self)
    }

    pub fn volume(&self) -> Result<f64> {
        Ok(self.moments()?.volume)
    }

    /// Image under `x -> a x + t` for invertible `a`.
    pub fn map_affine(&self, a: &Matrix, t: &Vector) -> Result<Polytope> {
        let inv_t = a
            .clone()
            .try_inverse()
            .ok_or_else(|| GeomError::InvalidInput("affine map is singular".into()))?
            .transpose();
        let vertices = self.vertices.iter().map(|v| a * v + t).collect();
        let planes = self
            .halfspaces
            .iter()
            .map(|h| {
                let n = &inv_t * &h.normal;
                let b = h.offset + n.dot(t);
                (n, b)
            })
            .collect();
        Polytope::assemble(self.dim, vertices, planes)
    }

    pub fn translate(&self, t: &Vector) -> Result<Polytope> {
        self.map_affine(&Matrix::identity(self.dim, self.dim), t)
    }

    pub fn scale_by(&self, s: f64) -> Result<Polytope> {
        self.map_affine(
            &(Matrix::identity(self.dim, self.dim) * s),
            &Vector::zeros(self.dim),
        )
    }

    /// The cube `[-h, h]^n`.
    pub fn cube(dim: usize, half_width: f64) -> Result<Polytope> {
        let mut halfspaces = Vec::with_capacity(2 * dim);
        for i in 0..dim {
            for sign in [1.0, -1.0] {
                let mut a = Vector::zeros(dim);
                a[i] = sign;
                halfspaces.push(Halfspace {
                    normal: a,
                    offset: half_width,
                });
            }
        }
        halfspace_intersection(&halfspaces, &Vector::zeros(dim))
    }
}

pub(crate) fn vertex_scale(points: &[Vector]) -> f64 {
    points.iter().map(|p| p.amax()).fold(1.0_f64, f64::max)
}

/// Do two vertex lists describe the same set (up to order) within `tol`?
pub fn same_vertex_set(a: &[Vector], b: &[Vector], tol: f64) -> bool {
    let covered =
        |x: &[Vector], y: &[Vector]| x.iter().all(|p| y.iter().any(|q| (p - q).amax() <= tol));
    a.len() == b.len() && covered(a, b) && covered(b, a)
}
