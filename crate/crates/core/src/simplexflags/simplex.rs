use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::numkit::{orthonormal_complement, simplex_volume, Vector};
use crate::polytope::Polytope;

/// The regular simplex inscribed in the unit sphere, with
/// `<v_i, v_j> = 1` for `i == j` and `-1/n` otherwise.
#[derive(Debug, Clone)]
pub struct RegularSimplex {
    dim: usize,
    vertices: Vec<Vector>,
}

impl RegularSimplex {
    pub const MIN_DIM: usize = 2;
    pub const MAX_DIM: usize = 6;

    /// Centre the standard basis of R^(n+1) at its mean, normalize, and map
    /// isometrically onto R^n through an orthonormal basis of the sum-zero
    /// hyperplane.
    pub fn new(n: usize) -> Result<Self> {
        if !(Self::MIN_DIM..=Self::MAX_DIM).contains(&n) {
            return Err(GeomError::InvalidInput(format!(
                "simplex dimension must be in {}..={}, got {n}",
                Self::MIN_DIM,
                Self::MAX_DIM
            )));
        }
        let ones = Vector::from_element(n + 1, 1.0);
        let frame = orthonormal_complement(&ones); // (n+1) x n
        let vertices = (0..=n)
            .map(|i| {
                let mut u = Vector::from_element(n + 1, -1.0 / (n + 1) as f64);
                u[i] += 1.0;
                let v = frame.transpose() * u;
                v.normalize()
            })
            .collect();
        Ok(RegularSimplex { dim: n, vertices })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vector] {
        &self.vertices
    }

    /// `Δ_n` as a polytope; its facets are `<-n v_j, x> <= 1`.
    pub fn polytope(&self) -> Polytope {
        let n = self.dim as f64;
        let planes = self.vertices.iter().map(|v| (v * -n, 1.0)).collect();
        Polytope::assemble(self.dim, self.vertices.clone(), planes)
            .expect("regular simplex is full-dimensional")
    }

    /// Vertices of the polar simplex, `-n v_j`.
    pub fn polar_vertices(&self) -> Vec<Vector> {
        let n = self.dim as f64;
        self.vertices.iter().map(|v| v * -n).collect()
    }

    /// `Δ_n° = -n Δ_n` as a polytope; its facets are `<v_j, y> <= 1`.
    pub fn polar_polytope(&self) -> Polytope {
        let planes = self.vertices.iter().map(|v| (v.clone(), 1.0)).collect();
        Polytope::assemble(self.dim, self.polar_vertices(), planes)
            .expect("polar simplex is full-dimensional")
    }

    pub fn volume(&self) -> f64 {
        simplex_volume(&self.vertices)
    }

    pub fn polar_volume(&self) -> f64 {
        self.volume() * (self.dim as f64).powi(self.dim as i32)
    }

    /// Centroid of the facet opposite `v_j`, which equals `-v_j / n`.
    pub fn facet_centroid(&self, j: usize) -> Vector {
        let others: Vec<usize> = (0..=self.dim).filter(|&i| i != j).collect();
        self.centroid_of(&others)
    }

    pub fn facet_centroids(&self) -> Vec<Vector> {
        (0..=self.dim).map(|j| self.facet_centroid(j)).collect()
    }

    fn centroid_of(&self, idx: &[usize]) -> Vector {
        idx.iter()
            .fold(Vector::zeros(self.dim), |acc, &i| acc + &self.vertices[i])
            / idx.len() as f64
    }

    /// The face spanned by `vertex_set` (a proper, nonempty subset).
    pub fn face(&self, vertex_set: &[usize]) -> Result<Face> {
        let mut set = vertex_set.to_vec();
        set.sort_unstable();
        set.dedup();
        if set.is_empty() || set.len() > self.dim || set.iter().any(|&i| i > self.dim) {
            return Err(GeomError::InvalidInput(format!(
                "{vertex_set:?} is not a proper face of the {}-simplex",
                self.dim
            )));
        }
        let centroid = self.centroid_of(&set);
        let dual_centroid = &centroid / centroid.norm_squared();
        Ok(Face {
            vertex_set: set,
            centroid,
            dual_centroid,
        })
    }

    /// All proper faces ordered by dimension, then lexicographically.
    pub fn faces(&self) -> Vec<Face> {
        let n = self.dim;
        let mut sets: Vec<Vec<usize>> = (1u32..(1 << (n + 1)) - 1)
            .map(|mask| (0..=n).filter(|&i| mask & (1 << i) != 0).collect())
            .collect();
        sets.sort_by(|a: &Vec<usize>, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        sets.iter()
            .map(|s| self.face(s).expect("proper face"))
            .collect()
    }

    /// All flags in lexicographic order of their vertex sequences.
    pub fn flags(&self) -> Vec<Flag> {
        let n = self.dim;
        let mut out = Vec::new();
        let mut current = Vec::with_capacity(n);
        let mut used = vec![false; n + 1];
        fn rec(n: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Flag>) {
            if cur.len() == n {
                out.push(Flag { order: cur.clone() });
                return;
            }
            for j in 0..=n {
                if !used[j] {
                    used[j] = true;
                    cur.push(j);
                    rec(n, cur, used, out);
                    cur.pop();
                    used[j] = false;
                }
            }
        }
        rec(n, &mut current, &mut used, &mut out);
        out
    }

    /// Is `x` inside `Δ_n` (within `tol`)?
    pub fn contains(&self, x: &Vector, tol: f64) -> bool {
        let n = self.dim as f64;
        self.vertices.iter().all(|v| -n * v.dot(x) <= 1.0 + tol * n)
    }
}

/// A proper face `F` of `Δ_n` with centroid `c_F` and dual-face centroid
/// `c_F* = c_F / |c_F|^2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Face {
    pub vertex_set: Vec<usize>,
    #[serde(with = "crate::numkit::serde_la::vector")]
    pub centroid: Vector,
    #[serde(with = "crate::numkit::serde_la::vector")]
    pub dual_centroid: Vector,
}

impl Face {
    pub fn face_dim(&self) -> usize {
        self.vertex_set.len() - 1
    }

    /// Vertex indices of the dual face `F*` (the complement).
    pub fn dual_vertex_set(&self, n: usize) -> Vec<usize> {
        (0..=n).filter(|i| !self.vertex_set.contains(i)).collect()
    }
}

/// A maximal chain of faces `F_0 ⊂ … ⊂ F_{n-1}` with
/// `F_k = {order[0], …, order[k]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Flag {
    pub order: Vec<usize>,
}

impl Flag {
    pub fn face_set(&self, k: usize) -> Vec<usize> {
        let mut s = self.order[..=k].to_vec();
        s.sort_unstable();
        s
    }

    /// Sign of the permutation `(order..., missing index)` of `0..=n`.
    pub fn parity(&self) -> f64 {
        let n = self.order.len();
        let mut perm = self.order.clone();
        let missing = (0..=n)
            .find(|i| !perm.contains(i))
            .expect("flag misses one index");
        perm.push(missing);
        let mut sign = 1.0;
        for i in 0..perm.len() {
            for j in i + 1..perm.len() {
                if perm[i] > perm[j] {
                    sign = -sign;
                }
            }
        }
        sign
    }
}
