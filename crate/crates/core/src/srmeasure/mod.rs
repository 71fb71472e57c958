//! Probability measures on the Boolean cube `{0,1}^d`, their strong-Rayleigh
//! closure operations, generators, couplings and negative-dependence audits.
//!
//! States are bitmasks: bit `j` is coordinate `j`. In JSON a state is a
//! bitstring whose `j`-th character is coordinate `j`.

mod audit;
mod coupling;
mod exclusion;
mod generators;
mod measure;

pub use audit::{na_audit, sr_battery, BatteryReport, NaAudit, NaCounterexample, TierResult, NA_MAX_D};
pub use coupling::{
    coupling_check, increasing_levels_check, sc_property_check, CouplingOutcome, CouplingProblem, LevelsOutcome,
    Relation, ScOutcome,
};
pub use exclusion::{exclusion_evolve, exclusion_oracle, total_variation, Exclusion, DEFAULT_STEPS, ORACLE_MAX_D};
pub use generators::{
    conditioned_bernoulli, determinantal, spanning_tree_measure, KernelMatrix, DETERMINANTAL_MAX_D, SPANNING_MAX_EDGES,
};
pub use measure::{AugmentedLaw, CubeMeasure, RankWeights, MEASURE_MAX_D};
