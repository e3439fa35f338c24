use super::{convex_hull, Halfspace, Polytope};
use crate::error::{GeomError, Result};
use crate::numkit::{Vector, GEOM_TOL};

/// Intersection of halfspaces around a strictly interior witness point.
///
/// Each halfspace is dualized about the witness to the point
/// `a / (b - <a, w>)`; the hull of those dual points is the polar of the
/// intersection (translated by `-w`), so its facets give back the vertices.
pub fn halfspace_intersection(halfspaces: &[Halfspace], witness: &Vector) -> Result<Polytope> {
    let dim = witness.len();
    if halfspaces.len() < dim + 1 {
        return Err(GeomError::UnboundedIntersection);
    }
    let mut duals = Vec::with_capacity(halfspaces.len());
    for (index, h) in halfspaces.iter().enumerate() {
        if h.normal.len() != dim {
            return Err(GeomError::DimensionMismatch {
                expected: dim,
                got: h.normal.len(),
            });
        }
        let norm = h.normal.norm();
        let slack = h.slack(witness);
        if !(norm > 0.0) || slack <= GEOM_TOL * norm * witness.amax().max(1.0) {
            return Err(GeomError::WitnessViolation { index, slack });
        }
        duals.push(&h.normal / slack);
    }

    let dual_hull = match convex_hull(&duals) {
        Ok(p) => p,
        Err(GeomError::DegenerateHull { .. }) => return Err(GeomError::UnboundedIntersection),
        Err(e) => return Err(e),
    };
    // The intersection is bounded iff the origin is strictly inside the dual hull.
    let dual_tol = GEOM_TOL * dual_hull.scale();
    let mut vertices = Vec::with_capacity(dual_hull.halfspaces().len());
    for h in dual_hull.halfspaces() {
        let unit_offset = h.offset / h.normal.norm();
        if unit_offset <= dual_tol {
            return Err(GeomError::UnboundedIntersection);
        }
        vertices.push(witness + &h.normal / h.offset);
    }

    // Irredundant input halfspaces are exactly those whose dual point is a
    // vertex of the dual hull.
    let mut planes: Vec<(Vector, f64)> = Vec::new();
    for dv in dual_hull.vertices() {
        let k = duals
            .iter()
            .position(|d| (d - dv).amax() <= GEOM_TOL * dual_hull.scale())
            .ok_or_else(|| GeomError::Internal("dual vertex not matched".into()))?;
        planes.push((halfspaces[k].normal.clone(), halfspaces[k].offset));
    }
    Polytope::assemble(dim, vertices, planes)
}
