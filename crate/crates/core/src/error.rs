use thiserror::Error;

use crate::numkit::Vector;

#[derive(Debug, Clone, Error)]
pub enum GeomError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("need at least {needed} items, got {got}")]
    TooFew { needed: usize, got: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("linear program is infeasible")]
    Infeasible,

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("degenerate hull: points span an affine subspace of rank {rank} in dimension {dim}")]
    DegenerateHull { rank: usize, dim: usize },

    #[error("halfspace intersection is unbounded")]
    UnboundedIntersection,

    #[error("witness point violates halfspace {index} (slack {slack:e})")]
    WitnessViolation { index: usize, slack: f64 },

    #[error("center is not interior (inradius {inradius:e})")]
    CenterNotInterior { inradius: f64 },

    #[error("Santalo solver did not converge after {iterations} iterations (gradient norm {gradient_norm:e})")]
    NoConvergence {
        iterations: usize,
        last_iterate: Vector,
        gradient_norm: f64,
    },

    #[error("body is not contained in the reference simplex; violating vertices {violating:?}")]
    NotInSimplex { violating: Vec<usize> },

    #[error("missing tangent data for face {0:?}")]
    MissingTangentData(Vec<usize>),

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T, E = GeomError> = std::result::Result<T, E>;
