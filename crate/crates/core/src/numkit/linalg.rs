use super::{factorial, Matrix, Vector};
use crate::error::{GeomError, Result};

/// Determinant via LU with partial pivoting.
pub fn determinant(m: &Matrix) -> Result<f64> {
    if m.nrows() != m.ncols() {
        return Err(GeomError::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    if m.nrows() == 0 {
        return Ok(1.0);
    }
    Ok(m.clone().lu().determinant())
}

/// Unsigned volume of the simplex with the given `n + 1` vertices in R^n.
pub fn simplex_volume(vertices: &[Vector]) -> f64 {
    let n = vertices.len() - 1;
    let base = &vertices[0];
    let edges = Matrix::from_fn(n, n, |i, j| vertices[j + 1][i] - base[i]);
    edges.lu().determinant().abs() / factorial(n)
}

/// Solve `h x = rhs` for symmetric positive definite `h`. Returns `None`
/// when the Cholesky factorization fails.
pub fn solve_spd(h: &Matrix, rhs: &Vector) -> Option<Vector> {
    let chol = h.clone().cholesky()?;
    let x = chol.solve(rhs);
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// Normal of the hyperplane through `n` points in R^n (generalized cross
/// product of the edge vectors). The result is not normalized; it is zero
/// when the points are affinely dependent.
pub fn hyperplane_normal(points: &[Vector]) -> Vector {
    let n = points[0].len();
    debug_assert_eq!(points.len(), n);
    if n == 1 {
        return Vector::from_element(1, 1.0);
    }
    let base = &points[0];
    // rows = edge vectors, (n-1) x n
    let edges = Matrix::from_fn(n - 1, n, |i, j| points[i + 1][j] - base[j]);
    let mut normal = Vector::zeros(n);
    for col in 0..n {
        let minor = edges.clone().remove_column(col);
        let sign = if col % 2 == 0 { 1.0 } else { -1.0 };
        normal[col] = sign * minor.lu().determinant();
    }
    normal
}

/// Orthonormal basis (as columns) of the orthogonal complement of `u`.
pub fn orthonormal_complement(u: &Vector) -> Matrix {
    let n = u.len();
    let unit = u.normalize();
    let mut basis: Vec<Vector> = Vec::with_capacity(n - 1);
    // Gram-Schmidt over the standard basis, skipping the axis most aligned with u.
    let skip = unit.iamax();
    for axis in (0..n).filter(|&k| k != skip) {
        let mut e = Vector::zeros(n);
        e[axis] = 1.0;
        e -= &unit * unit[axis];
        for b in &basis {
            let proj = b.dot(&e);
            e -= b * proj;
        }
        // second pass keeps the frame orthonormal to ~1 ulp
        for b in &basis {
            let proj = b.dot(&e);
            e -= b * proj;
        }
        let proj = unit.dot(&e);
        e -= &unit * proj;
        basis.push(e.normalize());
    }
    super::columns(&basis)
}

/// Affine rank of a point set: dimension of the smallest flat containing it.
pub fn affine_rank(points: &[Vector], tol: f64) -> usize {
    if points.len() < 2 {
        return 0;
    }
    let base = &points[0];
    let scale = points.iter().map(|p| p.amax()).fold(1.0_f64, f64::max);
    let mut basis: Vec<Vector> = Vec::new();
    for p in &points[1..] {
        let mut d = p - base;
        for b in &basis {
            let proj = b.dot(&d);
            d -= b * proj;
        }
        let norm = d.norm();
        if norm > tol * scale {
            basis.push(d / norm);
        }
    }
    basis.len()
}
