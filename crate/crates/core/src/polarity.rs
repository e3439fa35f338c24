//! Polar bodies about interior centers, the Santaló point and the volume
//! product.
//!
//! For a polytope `K` and interior `z`, the polar `K^z` has one vertex per
//! facet `<a, x> <= b` of `K`, namely `a / (b - <a, z>)`, and one facet
//! `<y, v - z> <= 1` per vertex `v` of `K`. The map `z -> |K^z|` is convex
//! with gradient `(n+1) ∫_{K^z} y dy` and Hessian `(n+1)(n+2) ∫_{K^z} y yᵀ dy`,
//! so its minimizer is where the centroid of `K^z` is the origin.

use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::numkit::{factorial, solve_spd, Matrix, Vector, GEOM_TOL};
use crate::polytope::{BodyMoments, Polytope};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITERS: usize = 100;

/// Environment variable overriding the default Santaló tolerance in the CLI.
pub const TOL_ENV_VAR: &str = "VOLPROD_TOL";

pub fn polar(k: &Polytope, z: &Vector) -> Result<Polytope> {
    if z.len() != k.dim() {
        return Err(GeomError::DimensionMismatch {
            expected: k.dim(),
            got: z.len(),
        });
    }
    let inradius = k.facet_distance(z);
    if inradius <= GEOM_TOL * k.scale() {
        return Err(GeomError::CenterNotInterior { inradius });
    }
    let vertices = k
        .halfspaces()
        .iter()
        .map(|h| &h.normal / h.slack(z))
        .collect();
    let planes = k.vertices().iter().map(|v| (v - z, 1.0)).collect();
    Polytope::assemble(k.dim(), vertices, planes)
}

#[derive(Debug, Clone)]
pub struct PolarVolume {
    pub value: f64,
    pub gradient: Vector,
    pub hessian: Matrix,
    pub polar: Polytope,
    pub moments: BodyMoments,
}

impl PolarVolume {
    /// Norm of the centroid of `K^z`.
    pub fn centroid_norm(&self) -> f64 {
        self.moments.centroid().norm()
    }
}

/// `|K^z|` with its gradient and Hessian in `z`.
pub fn polar_volume_gradient(k: &Polytope, z: &Vector) -> Result<PolarVolume> {
    let polar = polar(k, z)?;
    let moments = polar.moments()?;
    let n = k.dim() as f64;
    Ok(PolarVolume {
        value: moments.volume,
        gradient: &moments.first_moment * (n + 1.0),
        hessian: &moments.second_moment * ((n + 1.0) * (n + 2.0)),
        polar,
        moments,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SantaloResult {
    #[serde(with = "crate::numkit::serde_la::vector")]
    pub point: Vector,
    #[serde(skip)]
    pub polar_at_s: Polytope,
    pub polar_volume: f64,
    pub centroid_norm: f64,
    pub iterations: usize,
    /// `‖centroid(K^z)‖` at every iterate, starting with the initial point.
    pub residual_history: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
pub struct SantaloOptions {
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for SantaloOptions {
    fn default() -> Self {
        SantaloOptions {
            tol: DEFAULT_TOL,
            max_iters: DEFAULT_MAX_ITERS,
        }
    }
}

pub fn santalo_point(k: &Polytope, tol: f64) -> Result<SantaloResult> {
    santalo_point_with(
        k,
        SantaloOptions {
            tol,
            ..Default::default()
        },
    )
}

/// Damped Newton on `z -> |K^z|` from the centroid of `K`.
pub fn santalo_point_with(k: &Polytope, opts: SantaloOptions) -> Result<SantaloResult> {
    if !(opts.tol > 0.0) {
        return Err(GeomError::InvalidInput("tolerance must be positive".into()));
    }
    let mut z = k.moments()?.centroid();
    let mut cur = polar_volume_gradient(k, &z)?;
    let mut history = vec![cur.centroid_norm()];
    let interior_margin = GEOM_TOL * k.scale();

    for iter in 0..opts.max_iters {
        if cur.centroid_norm() <= opts.tol {
            return Ok(finish(z, cur, iter, history));
        }
        let g = &cur.gradient;
        let (dir, newton) = match solve_spd(&cur.hessian, &(-g)) {
            Some(d) if d.dot(g) < 0.0 => (d, true),
            _ => (-g.clone(), false),
        };
        let slope = g.dot(&dir);
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let trial = &z + &dir * step;
            if k.facet_distance(&trial) > interior_margin {
                let next = polar_volume_gradient(k, &trial)?;
                let armijo = next.value <= cur.value + 1e-4 * step * slope;
                // Below rounding level the value test is meaningless; a Newton
                // step that shrinks the centroid is accepted instead.
                let flat = newton
                    && step == 1.0
                    && -slope <= 1e-10 * cur.value
                    && next.centroid_norm() < cur.centroid_norm();
                if armijo || flat {
                    accepted = Some((trial, next));
                    break;
                }
            }
            step *= 0.5;
        }
        let Some((trial, next)) = accepted else {
            return Err(GeomError::NoConvergence {
                iterations: iter,
                gradient_norm: cur.gradient.norm(),
                last_iterate: z,
            });
        };
        z = trial;
        cur = next;
        history.push(cur.centroid_norm());
    }
    if cur.centroid_norm() <= opts.tol {
        let iters = opts.max_iters;
        return Ok(finish(z, cur, iters, history));
    }
    Err(GeomError::NoConvergence {
        iterations: opts.max_iters,
        gradient_norm: cur.gradient.norm(),
        last_iterate: z,
    })
}

fn finish(z: Vector, cur: PolarVolume, iterations: usize, history: Vec<f64>) -> SantaloResult {
    SantaloResult {
        centroid_norm: cur.centroid_norm(),
        point: z,
        polar_volume: cur.value,
        polar_at_s: cur.polar,
        iterations,
        residual_history: history,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VolumeProductResult {
    pub vp: f64,
    pub body_volume: f64,
    pub polar_volume: f64,
    pub santalo: SantaloResult,
}

pub fn volume_product(k: &Polytope) -> Result<VolumeProductResult> {
    volume_product_with(k, SantaloOptions::default())
}

pub fn volume_product_with(k: &Polytope, opts: SantaloOptions) -> Result<VolumeProductResult> {
    let body_volume = k.volume()?;
    let santalo = santalo_point_with(k, opts)?;
    Ok(VolumeProductResult {
        vp: body_volume * santalo.polar_volume,
        body_volume,
        polar_volume: santalo.polar_volume,
        santalo,
    })
}

/// Volume product of an n-simplex, `(n+1)^(n+1) / (n!)^2`.
pub fn simplex_volume_product(n: usize) -> f64 {
    ((n + 1) as f64).powi(n as i32 + 1) / factorial(n).powi(2)
}

/// Volume of the Euclidean unit ball in R^n.
pub fn unit_ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => unit_ball_volume(n - 2) * 2.0 * std::f64::consts::PI / n as f64,
    }
}

/// Volume product of the Euclidean ball (the Blaschke-Santaló maximum).
pub fn ball_volume_product(n: usize) -> f64 {
    unit_ball_volume(n).powi(2)
}
