//! Small dense linear algebra, a Bland-rule simplex LP solver and
//! least-squares fitting.
//!
//! Dimensions in this crate never exceed 6 and LPs never exceed a few dozen
//! columns, so everything here is dense and allocation-happy.

mod fit;
mod linalg;
mod lp;
pub mod serde_la;

pub use fit::{fit_linear, fit_loglog, FitResult};
pub use linalg::{
    affine_rank, determinant, hyperplane_normal, orthonormal_complement, simplex_volume, solve_spd,
};
pub use lp::{solve_lp, LinearProgram, LpSolution};

/// A point or direction in R^n.
pub type Vector = nalgebra::DVector<f64>;
/// A dense real matrix.
pub type Matrix = nalgebra::DMatrix<f64>;

/// Default tolerance for geometric predicates.
pub const GEOM_TOL: f64 = 1e-9;

pub fn vector(entries: &[f64]) -> Vector {
    Vector::from_column_slice(entries)
}

pub fn is_finite(v: &Vector) -> bool {
    v.iter().all(|x| x.is_finite())
}

/// Stack vectors as the columns of a matrix.
pub fn columns(vectors: &[Vector]) -> Matrix {
    let rows = vectors.first().map_or(0, |v| v.len());
    Matrix::from_fn(rows, vectors.len(), |i, j| vectors[j][i])
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}
