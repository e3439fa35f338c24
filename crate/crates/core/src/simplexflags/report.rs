use serde::Serialize;

use super::{
    all_tangent_data, build_flag_polytopes, sandwich_delta, tangent_residuals, RegularSimplex,
    TangentResiduals,
};
use crate::error::Result;
use crate::numkit::{Vector, GEOM_TOL};
use crate::polarity::polar;
use crate::polytope::Polytope;

/// Residual budget for the tangency clauses.
pub const CLAUSE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TangencyCheck {
    pub pass: bool,
    pub max_residual: f64,
    pub residuals: TangentResiduals,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProductCheck {
    pub pass: bool,
    pub q_volume: f64,
    pub q_dual_volume: f64,
    pub reference: f64,
    /// `|Q||Q′| - |Δ||Δ°|`
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SecondOrderCheck {
    pub p_minus_q: f64,
    pub p_dual_minus_q_dual: f64,
    /// `||P| - |Q|| / δ²`
    pub p_ratio: Option<f64>,
    /// `||P′| - |Q′|| / δ²`
    pub p_dual_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DichotomyCheck {
    pub pass: Option<bool>,
    pub k_volume: f64,
    pub k_polar_volume: f64,
    pub p_volume: f64,
    pub p_dual_volume: f64,
    /// `max((|K| - |P|)/δ, (|K°| - |P′|)/δ)`
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProductGainCheck {
    pub pass: Option<bool>,
    /// `|K||K°|`
    pub product: f64,
    /// `(|K||K°| - |Δ||Δ°|) / δ`
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VolumeSummary {
    pub absolute: [f64; 4],
    pub signed: [f64; 4],
    pub overlap: [bool; 4],
}

/// Outcome of the flag construction on one body. Failures are data.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaReport {
    pub n: usize,
    pub delta: f64,
    pub facet_centroids_in_k: bool,
    pub flag_count: usize,
    pub tangency: TangencyCheck,
    pub q_product: ProductCheck,
    pub second_order: SecondOrderCheck,
    pub dichotomy: DichotomyCheck,
    pub product_gain: ProductGainCheck,
    pub containment: super::Containment,
    /// Flag-union volumes in the order `P, Q, P′, Q′`.
    pub flag_volumes: VolumeSummary,
}

impl LemmaReport {
    pub fn overlap(&self) -> bool {
        self.flag_volumes.overlap.iter().any(|&o| o)
    }
}

/// Build the flag polytopes of `k` and evaluate every check on them.
pub fn lemma_report(k: &Polytope, s: &RegularSimplex) -> Result<LemmaReport> {
    let n = s.dim();
    let delta = sandwich_delta(k, s)?;
    let facet_centroids_in_k = s.facet_centroids().iter().all(|c| k.contains(c, GEOM_TOL));
    let data = all_tangent_data(k, s)?;
    let residuals = tangent_residuals(s, &data, delta);
    let flags = build_flag_polytopes(k, s, &data, delta)?;

    let k_volume = k.volume()?;
    let k_polar_volume = polar(k, &Vector::zeros(n))?.volume()?;
    let reference = s.volume() * s.polar_volume();
    let ratio = |x: f64, d: f64| (delta > 0.0).then(|| x / d);

    let q_volume = flags.q.absolute_volume;
    let q_dual_volume = flags.q_dual.absolute_volume;
    let margin = q_volume * q_dual_volume - reference;

    let p_minus_q = (flags.p.absolute_volume - q_volume).abs();
    let p_dual_minus_q_dual = (flags.p_dual.absolute_volume - q_dual_volume).abs();

    let dichotomy_ratio = ratio(
        (k_volume - flags.p.absolute_volume).max(k_polar_volume - flags.p_dual.absolute_volume),
        delta,
    );
    let product = k_volume * k_polar_volume;
    let gain_ratio = ratio(product - reference, delta);

    let unions = [&flags.p, &flags.q, &flags.p_dual, &flags.q_dual];
    Ok(LemmaReport {
        n,
        delta,
        facet_centroids_in_k,
        flag_count: flags.flag_count,
        tangency: TangencyCheck {
            pass: residuals.all_hold(n, delta, CLAUSE_TOL),
            max_residual: residuals.max_equality_residual(),
            residuals,
        },
        q_product: ProductCheck {
            pass: margin >= -CLAUSE_TOL,
            q_volume,
            q_dual_volume,
            reference,
            margin,
        },
        second_order: SecondOrderCheck {
            p_minus_q,
            p_dual_minus_q_dual,
            p_ratio: ratio(p_minus_q, delta * delta),
            p_dual_ratio: ratio(p_dual_minus_q_dual, delta * delta),
        },
        dichotomy: DichotomyCheck {
            pass: dichotomy_ratio.map(|r| r > 0.0),
            k_volume,
            k_polar_volume,
            p_volume: flags.p.absolute_volume,
            p_dual_volume: flags.p_dual.absolute_volume,
            ratio: dichotomy_ratio,
        },
        product_gain: ProductGainCheck {
            pass: gain_ratio.map(|r| r > 0.0),
            product,
            ratio: gain_ratio,
        },
        containment: flags.containment,
        flag_volumes: VolumeSummary {
            absolute: unions.map(|u| u.absolute_volume),
            signed: unions.map(|u| u.signed_volume),
            overlap: unions.map(|u| u.overlap),
        },
    })
}
