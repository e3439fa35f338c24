use serde::Serialize;

use super::{check_sandwich, Flag, RegularSimplex, TangentData};
use crate::error::{GeomError, Result};
use crate::numkit::{columns, factorial, Vector, GEOM_TOL};
use crate::polarity::polar;
use crate::polytope::Polytope;

const OVERLAP_TOL: f64 = 1e-9;

/// One union of flag simplices `conv(0, p_{F_0}, …, p_{F_{n-1}})`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlagUnion {
    pub name: String,
    /// `Σ |det| / n!`
    pub absolute_volume: f64,
    /// `|Σ ε(flag) det| / n!`
    pub signed_volume: f64,
    pub overlap: bool,
    #[serde(skip)]
    pub simplices: Vec<Vec<Vector>>,
}

impl FlagUnion {
    fn new(name: &str, simplices: Vec<Vec<Vector>>, signs: &[f64]) -> Self {
        let n = simplices.first().map_or(0, |s| s.len());
        let dets: Vec<f64> = simplices
            .iter()
            .map(|s| columns(s).lu().determinant())
            .collect();
        let scale = factorial(n);
        let absolute_volume = dets.iter().map(|d| d.abs()).sum::<f64>() / scale;
        let signed_volume = dets
            .iter()
            .zip(signs)
            .map(|(d, e)| d * e)
            .sum::<f64>()
            .abs()
            / scale;
        FlagUnion {
            name: name.to_string(),
            absolute_volume,
            signed_volume,
            overlap: (absolute_volume - signed_volume).abs() > OVERLAP_TOL,
            simplices,
        }
    }

    /// Every simplex vertex other than the origin.
    pub fn points(&self) -> impl Iterator<Item = &Vector> {
        self.simplices.iter().flatten()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Containment {
    pub p_in_k: bool,
    pub p_dual_in_k_polar: bool,
    pub q_sandwiched: bool,
    pub q_dual_sandwiched: bool,
}

impl Containment {
    pub fn all(&self) -> bool {
        self.p_in_k && self.p_dual_in_k_polar && self.q_sandwiched && self.q_dual_sandwiched
    }
}

/// The four flag unions `P, Q, P′, Q′` built from `x, y, x*, y*`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlagPolytopes {
    pub flag_count: usize,
    pub delta: f64,
    pub p: FlagUnion,
    pub q: FlagUnion,
    pub p_dual: FlagUnion,
    pub q_dual: FlagUnion,
    pub containment: Containment,
}

impl FlagPolytopes {
    pub fn any_overlap(&self) -> bool {
        self.p.overlap || self.q.overlap || self.p_dual.overlap || self.q_dual.overlap
    }
}

/// Assemble the flag polytopes from precomputed tangency data, which must
/// cover every proper face of `s`.
pub fn build_flag_polytopes(
    k: &Polytope,
    s: &RegularSimplex,
    data: &[TangentData],
    delta: f64,
) -> Result<FlagPolytopes> {
    check_sandwich(k, s)?;
    let n = s.dim();
    let faces = s.faces();
    let lookup = |set: &[usize]| data.iter().find(|d| d.face == set);
    let missing: Vec<usize> = faces
        .iter()
        .enumerate()
        .filter(|(_, f)| lookup(&f.vertex_set).is_none())
        .map(|(i, _)| i)
        .collect();
    if !missing.is_empty() {
        return Err(GeomError::MissingTangentData(missing));
    }

    let flags: Vec<Flag> = s.flags();
    let signs: Vec<f64> = flags.iter().map(Flag::parity).collect();
    let mut lists: [Vec<Vec<Vector>>; 4] = Default::default();
    for flag in &flags {
        let chain: Vec<&TangentData> = (0..n)
            .map(|j| lookup(&flag.face_set(j)).expect("checked above"))
            .collect();
        lists[0].push(chain.iter().map(|d| d.x.clone()).collect());
        lists[1].push(chain.iter().map(|d| d.y.clone()).collect());
        lists[2].push(chain.iter().map(|d| d.x_star.clone()).collect());
        lists[3].push(chain.iter().map(|d| d.y_star.clone()).collect());
    }
    let [lp, lq, lpd, lqd] = lists;
    let p = FlagUnion::new("P", lp, &signs);
    let q = FlagUnion::new("Q", lq, &signs);
    let p_dual = FlagUnion::new("P'", lpd, &signs);
    let q_dual = FlagUnion::new("Q'", lqd, &signs);

    let kpolar = polar(k, &Vector::zeros(n))?;
    let tol = GEOM_TOL;
    let simplex = s.polytope();
    let dual_simplex = s.polar_polytope();
    let outer_dual = dual_simplex.scale_by(1.0 / (1.0 - delta))?;
    // Each flag cell of Q contains the matching cell of (1-δ)Δ iff t ≥ 1-δ
    // on its chain; for Q′ and Δ° the condition is t* ≥ 1.
    let containment = Containment {
        p_in_k: p.points().all(|x| k.contains(x, tol)),
        p_dual_in_k_polar: p_dual.points().all(|x| kpolar.contains(x, tol)),
        q_sandwiched: q.points().all(|y| simplex.contains(y, tol))
            && data.iter().all(|d| d.t >= 1.0 - delta - tol),
        q_dual_sandwiched: q_dual.points().all(|y| outer_dual.contains(y, tol))
            && data.iter().all(|d| d.t_star >= 1.0 - tol),
    };

    Ok(FlagPolytopes {
        flag_count: flags.len(),
        delta,
        p,
        q,
        p_dual,
        q_dual,
        containment,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplexflags::{all_tangent_data, sandwich_delta};

    fn flags_of(k: &Polytope, s: &RegularSimplex) -> FlagPolytopes {
        let delta = sandwich_delta(k, s).unwrap();
        let data = all_tangent_data(k, s).unwrap();
        build_flag_polytopes(k, s, &data, delta).unwrap()
    }

    #[test]
    fn simplex_flags_subdivide_simplex() {
        for n in 2..=4 {
            let s = RegularSimplex::new(n).unwrap();
            let f = flags_of(&s.polytope(), &s);
            let (vol, pvol) = (s.volume(), s.polar_volume());
            for (u, want) in [
                (&f.p, vol),
                (&f.q, vol),
                (&f.p_dual, pvol),
                (&f.q_dual, pvol),
            ] {
                assert!((u.absolute_volume - want).abs() < 1e-9, "{} n={n}", u.name);
                assert!(!u.overlap, "{} n={n}", u.name);
            }
            assert!(f.containment.all());
        }
    }

    #[test]
    fn planar_values() {
        let s = RegularSimplex::new(2).unwrap();
        let f = flags_of(&s.polytope(), &s);
        let r3 = 3f64.sqrt();
        assert!((f.p.absolute_volume - 3.0 * r3 / 4.0).abs() < 1e-12);
        assert!((f.q_dual.absolute_volume - 3.0 * r3).abs() < 1e-12);
    }

    #[test]
    fn scaled_simplex_meets_product_bound() {
        let s = RegularSimplex::new(2).unwrap();
        let k = s.polytope().scale_by(0.96).unwrap();
        let f = flags_of(&k, &s);
        let product = f.q.absolute_volume * f.q_dual.absolute_volume;
        assert!(product >= 6.75 - 1e-9);
        assert!(f.containment.all());
    }

    #[test]
    fn flag_count_three() {
        let s = RegularSimplex::new(3).unwrap();
        assert_eq!(flags_of(&s.polytope(), &s).flag_count, 24);
    }

    #[test]
    fn missing_data_is_an_error() {
        let s = RegularSimplex::new(2).unwrap();
        let k = s.polytope();
        let mut data = all_tangent_data(&k, &s).unwrap();
        data.pop();
        assert!(matches!(
            build_flag_polytopes(&k, &s, &data, 0.0),
            Err(GeomError::MissingTangentData(_))
        ));
    }
}
