use num_traits::{Signed, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::Result;
use crate::poly::{PolyQ, RealVector};
use crate::rational::rat_strs;
use crate::realroot::is_real_rooted;
use crate::uni::UniPolyQ;

/// How a refuting line was found.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessStage {
    /// Deterministic coordinate probes tried before sampling.
    Canonical,
    /// Uniformly sampled line.
    Random,
    /// Line built from a negative Rayleigh gap of a multi-affine polynomial.
    Rayleigh,
}

/// A line `t -> p(v + t u)` whose restriction is not real-rooted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub v: RealVector,
    pub u: RealVector,
    pub restriction: UniPolyQ,
    pub stage: WitnessStage,
    /// Zero-based trial index for sampled stages.
    pub trial: Option<usize>,
}

/// True if a restriction along a direction `u >= 0` rules out stability.
///
/// A nonzero restriction must have a non-real root; the zero restriction only
/// counts when every entry of `u` is positive.
pub fn restriction_certifies(restriction: &UniPolyQ, u: &[crate::Rational]) -> bool {
    if u.iter().any(|x| x.is_negative()) {
        return false;
    }
    if restriction.is_zero() {
        return u.iter().all(|x| x.is_positive());
    }
    !is_real_rooted(restriction).expect("nonzero")
}

impl Witness {
    /// Recomputes the restriction from scratch and re-checks it.
    pub fn replay(&self, p: &PolyQ) -> Result<bool> {
        let r = p.restrict_line(&self.v, &self.u)?;
        Ok(r == self.restriction && restriction_certifies(&r, &self.u))
    }

    /// Re-checks a hyperbolicity witness, where `u` is the direction and may have any sign.
    pub fn replay_hyperbolicity(&self, p: &PolyQ) -> Result<bool> {
        let r = p.restrict_line(&self.v, &self.u)?;
        Ok(r == self.restriction && !r.is_zero() && !is_real_rooted(&r)?)
    }
}

impl Serialize for Witness {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Witness", 5)?;
        st.serialize_field("v", &rat_strs(&self.v))?;
        st.serialize_field("u", &rat_strs(&self.u))?;
        st.serialize_field("restriction", &self.restriction)?;
        st.serialize_field("stage", &self.stage)?;
        st.serialize_field("trial", &self.trial)?;
        st.end()
    }
}

/// Replayable origin of a certified verdict.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    /// Product of real affine forms with nonnegative linear coefficients.
    ProductOfNonnegLinear,
    /// `det(sum z_i A_i + B)` with PSD `A_i` and symmetric `B`.
    Determinantal,
    /// Stable-preserving operations applied to a certified input; the string names the chain.
    ClosureDerived(String),
    /// The zero polynomial, stable by convention.
    TrivialZero,
}

impl Provenance {
    pub fn tag(&self) -> String {
        match self {
            Provenance::ProductOfNonnegLinear => "product-of-nonneg-linear".into(),
            Provenance::Determinantal => "determinantal".into(),
            Provenance::ClosureDerived(chain) => format!("closure-derived:{chain}"),
            Provenance::TrivialZero => "trivial-zero".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Refuted { witness: Witness, seed: Option<u64> },
    NotRefuted { trials: usize, seed: u64 },
    Certified { provenance: Provenance },
}

impl Verdict {
    pub fn kind(&self) -> &'static str {
        match self {
            Verdict::Refuted { .. } => "refuted",
            Verdict::NotRefuted { .. } => "not_refuted",
            Verdict::Certified { .. } => "certified",
        }
    }

    pub fn is_refuted(&self) -> bool {
        matches!(self, Verdict::Refuted { .. })
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Verdict::Refuted { witness, .. } => Some(witness),
            _ => None,
        }
    }
}

impl Serialize for Verdict {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Verdict", 5)?;
        st.serialize_field("kind", self.kind())?;
        match self {
            Verdict::Refuted { witness, seed } => {
                st.serialize_field("witness", witness)?;
                st.serialize_field("trials", &Option::<usize>::None)?;
                st.serialize_field("seed", seed)?;
                st.serialize_field("provenance", &Option::<String>::None)?;
            }
            Verdict::NotRefuted { trials, seed } => {
                st.serialize_field("witness", &Option::<Witness>::None)?;
                st.serialize_field("trials", trials)?;
                st.serialize_field("seed", seed)?;
                st.serialize_field("provenance", &Option::<String>::None)?;
            }
            Verdict::Certified { provenance } => {
                st.serialize_field("witness", &Option::<Witness>::None)?;
                st.serialize_field("trials", &Option::<usize>::None)?;
                st.serialize_field("seed", &Option::<u64>::None)?;
                st.serialize_field("provenance", &provenance.tag())?;
            }
        }
        st.end()
    }
}

impl Witness {
    pub(crate) fn new(v: RealVector, u: RealVector, restriction: UniPolyQ, stage: WitnessStage, trial: Option<usize>) -> Self {
        debug_assert!(!restriction.is_zero() || u.iter().all(|x| !x.is_zero()));
        Witness {
            v,
            u,
            restriction,
            stage,
            trial,
        }
    }
}
