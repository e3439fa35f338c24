//! Exact volume, first and second moments by triangulation.
//!
//! The triangulation is a fan from the vertex average over the facets, each
//! facet being triangulated recursively in an orthonormal frame of its
//! affine hull. Simplicial facets are used as they are.

use serde::{Deserialize, Serialize};

use super::{convex_hull, Polytope};
use crate::error::{GeomError, Result};
use crate::numkit::{factorial, orthonormal_complement, Matrix, Vector};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BodyMoments {
    pub volume: f64,
    /// `∫ y dy`
    #[serde(with = "crate::numkit::serde_la::vector")]
    pub first_moment: Vector,
    /// `∫ y yᵀ dy`
    #[serde(with = "crate::numkit::serde_la::matrix")]
    pub second_moment: Matrix,
}

impl BodyMoments {
    pub fn zeros(dim: usize) -> Self {
        BodyMoments {
            volume: 0.0,
            first_moment: Vector::zeros(dim),
            second_moment: Matrix::zeros(dim, dim),
        }
    }

    pub fn centroid(&self) -> Vector {
        &self.first_moment / self.volume
    }

    fn accumulate(&mut self, other: &BodyMoments) {
        self.volume += other.volume;
        self.first_moment += &other.first_moment;
        self.second_moment += &other.second_moment;
    }
}

/// Moments of the simplex with vertices `p_0..p_n` in R^n.
///
/// With `S = Σ p_i`: first moment `V S / (n+1)`, second moment
/// `V (Σ p_i p_iᵀ + S Sᵀ) / ((n+1)(n+2))`.
pub fn simplex_moments(vertices: &[Vector]) -> BodyMoments {
    let n = vertices.len() - 1;
    let base = &vertices[0];
    let edges = Matrix::from_fn(n, n, |i, j| vertices[j + 1][i] - base[i]);
    let volume = edges.lu().determinant().abs() / factorial(n);
    let sum = vertices.iter().fold(Vector::zeros(n), |acc, v| acc + v);
    let mut outer = &sum * sum.transpose();
    for v in vertices {
        outer += v * v.transpose();
    }
    let k = (n + 1) as f64;
    BodyMoments {
        volume,
        first_moment: &sum * (volume / k),
        second_moment: outer * (volume / (k * (k + 1.0))),
    }
}

/// Triangulate into full-dimensional simplices (`n + 1` points each).
pub fn triangulate(p: &Polytope) -> Result<Vec<Vec<Vector>>> {
    let apex = p.interior_point().clone();
    if p.dim() == 1 {
        return Ok(vec![p.vertices().to_vec()]);
    }
    let mut out = Vec::new();
    for (f, h) in p.halfspaces().iter().enumerate() {
        let on = &p.incidence()[f];
        let corners: Vec<Vector> = on.iter().map(|&i| p.vertices()[i].clone()).collect();
        if corners.len() == p.dim() {
            let mut simplex = Vec::with_capacity(p.dim() + 1);
            simplex.push(apex.clone());
            simplex.extend(corners);
            out.push(simplex);
            continue;
        }
        if corners.len() < p.dim() {
            return Err(GeomError::Internal(format!(
                "facet {f} has only {} vertices",
                corners.len()
            )));
        }
        let origin = corners
            .iter()
            .fold(Vector::zeros(p.dim()), |acc, v| acc + v)
            / corners.len() as f64;
        let frame = orthonormal_complement(&h.normal);
        let local: Vec<Vector> = corners
            .iter()
            .map(|c| frame.transpose() * (c - &origin))
            .collect();
        let facet = convex_hull(&local)?;
        for sub in triangulate(&facet)? {
            let mut simplex = Vec::with_capacity(p.dim() + 1);
            simplex.push(apex.clone());
            simplex.extend(sub.iter().map(|w| &origin + &frame * w));
            out.push(simplex);
        }
    }
    Ok(out)
}

pub(super) fn moments(p: &Polytope) -> Result<BodyMoments> {
    let mut total = BodyMoments::zeros(p.dim());
    for simplex in triangulate(p)? {
        total.accumulate(&simplex_moments(&simplex));
    }
    if !(total.volume > 0.0) {
        return Err(GeomError::DegenerateHull {
            rank: crate::numkit::affine_rank(p.vertices(), crate::numkit::GEOM_TOL),
            dim: p.dim(),
        });
    }
    Ok(total)
}
