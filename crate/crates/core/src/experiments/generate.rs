use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::numkit::{Vector, GEOM_TOL};
use crate::polytope::{convex_hull, halfspace_intersection, Halfspace, Polytope};
use crate::simplexflags::RegularSimplex;

/// Largest admissible sandwich parameter.
pub const DELTA_MAX: f64 = 0.05;
/// Largest dimension for sweeps.
pub const SWEEP_MAX_DIM: usize = 4;

const CUT_TILT: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// `conv({-v_j/n} ∪ {(1-δ_j) v_j})`
    VertexShrink,
    /// `Δ_n` cut by one tilted halfspace near each vertex
    FacetCut,
    /// hull of a seeded cloud between `(1-δ)Δ_n` and `Δ_n`
    RandomSupport,
    /// `(1-δ)Δ_n`, affinely equivalent to `Δ_n`
    Scaling,
}

impl Family {
    pub const ALL: [Family; 4] = [
        Family::VertexShrink,
        Family::FacetCut,
        Family::RandomSupport,
        Family::Scaling,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::VertexShrink => "vertex-shrink",
            Family::FacetCut => "facet-cut",
            Family::RandomSupport => "random-support",
            Family::Scaling => "scaling",
        }
    }

    /// Bodies affinely equivalent to the simplex, excluded from slope fits.
    pub fn affine_trivial(self) -> bool {
        self == Family::Scaling
    }

    /// Facet centroids of `Δ_n` lie in every body of the family.
    pub fn keeps_facet_centroids(self) -> bool {
        self == Family::VertexShrink
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = GeomError;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| GeomError::InvalidInput(format!("unknown family {s:?}")))
    }
}

/// Everything needed to rebuild one body bit for bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub family: Family,
    pub n: usize,
    pub delta: f64,
    pub seed: u64,
    /// Stream of the seeded generator; bodies with the same stream share
    /// their shape across `delta`.
    pub stream: u64,
    /// Per-vertex fractions of `delta` in `[0, 1]`; drawn when absent.
    pub fractions: Option<Vec<f64>>,
    /// Depth multiplier for `facet-cut`.
    pub epsilon: f64,
}

impl GeneratorSpec {
    pub fn new(family: Family, n: usize, delta: f64, seed: u64, stream: u64) -> Self {
        GeneratorSpec {
            family,
            n,
            delta,
            seed,
            stream,
            fractions: None,
            epsilon: 1.0,
        }
    }

    pub fn with_fractions(mut self, fractions: Vec<f64>) -> Self {
        self.fractions = Some(fractions);
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(RegularSimplex::MIN_DIM..=RegularSimplex::MAX_DIM).contains(&self.n) {
            return Err(GeomError::InvalidInput(format!(
                "dimension {} out of range",
                self.n
            )));
        }
        if !(0.0..=DELTA_MAX).contains(&self.delta) {
            return Err(GeomError::InvalidInput(format!(
                "delta {} outside [0, {DELTA_MAX}]",
                self.delta
            )));
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(GeomError::InvalidInput(format!(
                "epsilon {} outside [0, 1]",
                self.epsilon
            )));
        }
        if let Some(f) = &self.fractions {
            if f.len() != self.n + 1 || f.iter().any(|x| !(0.0..=1.0).contains(x)) {
                return Err(GeomError::InvalidInput(
                    "fractions need n + 1 entries in [0, 1]".into(),
                ));
            }
        }
        Ok(())
    }

    fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }

    /// Drawn fractions: uniform in `[0, 1]` with one entry raised to 1.
    fn draw_fractions(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let mut f: Vec<f64> = (0..=self.n).map(|_| rng.random::<f64>()).collect();
        let top = rng.random_range(0..=self.n);
        f[top] = 1.0;
        match &self.fractions {
            Some(given) => given.clone(),
            None => f,
        }
    }
}

/// Build the body described by `spec`.
pub fn generate(spec: &GeneratorSpec) -> Result<Polytope> {
    spec.validate()?;
    let s = RegularSimplex::new(spec.n)?;
    let mut rng = spec.rng();
    let fractions = spec.draw_fractions(&mut rng);
    let nf = spec.n as f64;
    match spec.family {
        Family::Scaling => s.polytope().scale_by(1.0 - spec.delta),
        Family::VertexShrink => {
            let mut pts: Vec<Vector> = s.vertices().iter().map(|v| v * (-1.0 / nf)).collect();
            pts.extend(
                s.vertices()
                    .iter()
                    .zip(&fractions)
                    .map(|(v, f)| v * (1.0 - spec.delta * f)),
            );
            convex_hull(&pts)
        }
        Family::FacetCut => {
            let mut hs: Vec<Halfspace> = s.polytope().halfspaces().to_vec();
            for (j, v) in s.vertices().iter().enumerate() {
                let mut g = Vector::from_fn(spec.n, |_, _| rng.random_range(-1.0..1.0));
                g -= v * v.dot(&g);
                let a = (v + g * CUT_TILT).normalize();
                let support = s
                    .vertices()
                    .iter()
                    .map(|u| u.dot(&a))
                    .fold(f64::MIN, f64::max);
                // depth chosen so that the ray through v_j leaves K at 1 - εδf_j
                let depth = spec.epsilon * spec.delta * fractions[j] * a.dot(v);
                if depth > GEOM_TOL {
                    hs.push(Halfspace::new(a, support - depth)?);
                }
            }
            halfspace_intersection(&hs, &Vector::zeros(spec.n))
        }
        Family::RandomSupport => {
            let mut pts: Vec<Vector> = s
                .vertices()
                .iter()
                .zip(&fractions)
                .map(|(v, f)| v * (1.0 - spec.delta * f))
                .collect();
            for _ in 0..4 * spec.n {
                let w: Vec<f64> = (0..=spec.n)
                    .map(|_| -(1.0 - rng.random::<f64>()).ln())
                    .collect();
                let total: f64 = w.iter().sum();
                let shrink = 1.0 - spec.delta * rng.random::<f64>();
                let x = s
                    .vertices()
                    .iter()
                    .zip(&w)
                    .fold(Vector::zeros(spec.n), |acc, (v, wi)| acc + v * (wi / total));
                pts.push(x * shrink);
            }
            convex_hull(&pts)
        }
    }
}
