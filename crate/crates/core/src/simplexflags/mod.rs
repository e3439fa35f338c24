//! The regular simplex, its faces and flags, and the flag polytopes built
//! from tangent points of a body squeezed between `(1-δ)Δ_n` and `Δ_n`.

mod flagpoly;
mod report;
mod simplex;
mod tangent;

pub use flagpoly::{build_flag_polytopes, Containment, FlagPolytopes, FlagUnion};
pub use report::{
    lemma_report, DichotomyCheck, LemmaReport, ProductCheck, ProductGainCheck, SecondOrderCheck,
    TangencyCheck, VolumeSummary, CLAUSE_TOL,
};
pub use simplex::{Face, Flag, RegularSimplex};
pub use tangent::{
    all_tangent_data, check_sandwich, sandwich_delta, tangent_residuals, tangent_touch,
    tangent_touch_dual, TangentData, TangentResiduals, Touch,
};
