//! Multivariate stability and hyperbolicity: certified refutation by line
//! restrictions, certificates by construction, and operator symbols.

mod construct;
mod refute;
mod symbol;
mod verdict;

pub use construct::{certify_product_of_linear, det_stable_construct, DetConstruction, DET_MAX_N};
pub use refute::{
    bivariate_ma_stable, cone_membership, hyperbolicity_refute, nonhomogeneous_hyperbolicity_probe,
    rayleigh_gap, rayleigh_refute, refute_stability, refute_stability_with, ProbeOutcome, RefuteConfig,
    DEFAULT_BOX, DEFAULT_TRIALS,
};
pub use symbol::{
    lieb_sokal_step, nonneg_multiple_of_square, operator_symbol, partial_symmetrization_table,
    partial_symmetrize_poly, LiebSokal, OperatorTable,
};
pub use verdict::{restriction_certifies, Provenance, Verdict, Witness, WitnessStage};
