//! Univariate real-rootedness, coefficient inequalities, multiplier
//! sequences and combinatorial generating polynomials.

mod coeffs;
mod combinatorics;
mod multiplier;
mod sturm;

pub use coeffs::{gurvits_a1_bound_check, newton_ulc_check, pf_check, A1Report, CoeffSeq, UlcReport};
pub use combinatorics::{
    forest_polynomial, hermite, matching_polynomial, MatchingResult, FOREST_MAX_N, MATCHING_MAX_N,
};
pub use multiplier::{
    apply_multiplier, basis_transform, polya_schur_refute, BasisMode, MultiplierSeq, PolyaSchurOutcome,
};
pub use sturm::{
    count_real_roots, interlace_check, is_real_rooted, isolate_real_roots, real_root_count_with_multiplicity,
    roots_all_negative, roots_all_nonpositive, Bound, Interval, RootInterval, SturmChain,
};

pub use crate::uni::UniPolyQ;
