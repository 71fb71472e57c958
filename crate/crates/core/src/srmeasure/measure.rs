use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{check_dim, check_index, guard, Error, Result};
use crate::poly::PolyQ;
use crate::rational::{binomial, format_rational, Rational};
use crate::realroot::{newton_ulc_check, CoeffSeq};

/// Hard cap on the cube dimension (dense tables of `2^d` entries).
pub const MEASURE_MAX_D: usize = 20;

/// Exact probability table on `{0,1}^d`; entries are nonnegative and sum to 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CubeMeasure {
    d: usize,
    probs: Vec<Rational>,
}

fn check_theta(theta: &Rational) -> Result<()> {
    if theta.is_negative() || theta > &Rational::one() {
        return Err(Error::precondition(format!("theta = {theta} must lie in [0, 1]")));
    }
    Ok(())
}

/// `x` with bits `i` and `j` exchanged.
pub(crate) fn swap_bits(x: usize, i: usize, j: usize) -> usize {
    if ((x >> i) ^ (x >> j)) & 1 == 1 {
        x ^ ((1 << i) | (1 << j))
    } else {
        x
    }
}

impl CubeMeasure {
    pub fn new(d: usize, probs: Vec<Rational>) -> Result<Self> {
        guard("cube dimension", d, MEASURE_MAX_D)?;
        check_dim(1 << d, probs.len())?;
        if let Some(p) = probs.iter().find(|p| p.is_negative()) {
            return Err(Error::Negative(format!("probability {p}")));
        }
        let total: Rational = probs.iter().sum();
        if !total.is_one() {
            return Err(Error::precondition(format!("total mass is {total}, expected 1")));
        }
        Ok(CubeMeasure { d, probs })
    }

    /// Normalizes nonnegative weights with positive total.
    pub fn from_weights(d: usize, weights: Vec<Rational>) -> Result<Self> {
        guard("cube dimension", d, MEASURE_MAX_D)?;
        check_dim(1 << d, weights.len())?;
        if let Some(p) = weights.iter().find(|p| p.is_negative()) {
            return Err(Error::Negative(format!("weight {p}")));
        }
        let z: Rational = weights.iter().sum();
        if !z.is_positive() {
            return Err(Error::precondition("normalizing constant is zero"));
        }
        Ok(CubeMeasure {
            d,
            probs: weights.into_iter().map(|w| w / &z).collect(),
        })
    }

    pub fn point_mass(d: usize, state: usize) -> Result<Self> {
        guard("cube dimension", d, MEASURE_MAX_D)?;
        check_index(state, 1 << d)?;
        let mut probs = vec![Rational::zero(); 1 << d];
        probs[state] = Rational::one();
        Ok(CubeMeasure { d, probs })
    }

    /// Uniform measure on the given distinct states.
    pub fn uniform_on(d: usize, states: &[usize]) -> Result<Self> {
        guard("cube dimension", d, MEASURE_MAX_D)?;
        let mut w = vec![Rational::zero(); 1 << d];
        for &s in states {
            check_index(s, 1 << d)?;
            w[s] = Rational::one();
        }
        Self::from_weights(d, w)
    }

    /// Independent coordinates with `P(X_j = 1) = p[j]`.
    pub fn product_bernoulli(p: &[Rational]) -> Result<Self> {
        let d = p.len();
        guard("cube dimension", d, MEASURE_MAX_D)?;
        for q in p {
            if q.is_negative() || q > &Rational::one() {
                return Err(Error::precondition(format!("Bernoulli parameter {q} outside [0, 1]")));
            }
        }
        let probs = (0..1usize << d)
            .map(|x| {
                (0..d)
                    .map(|j| if (x >> j) & 1 == 1 { p[j].clone() } else { Rational::one() - &p[j] })
                    .product()
            })
            .collect();
        Ok(CubeMeasure { d, probs })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn probs(&self) -> &[Rational] {
        &self.probs
    }

    pub fn prob(&self, state: usize) -> &Rational {
        &self.probs[state]
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.probs.iter().enumerate().filter(|(_, p)| !p.is_zero()).map(|(x, _)| x)
    }

    /// `P(X_j = 1)` for each `j`.
    pub fn marginals(&self) -> Vec<Rational> {
        (0..self.d)
            .map(|j| self.probs.iter().enumerate().filter(|(x, _)| (x >> j) & 1 == 1).map(|(_, p)| p).sum())
            .collect()
    }

    /// Mass of a set of states given as a predicate.
    pub fn mass_where(&self, pred: impl Fn(usize) -> bool) -> Rational {
        self.probs.iter().enumerate().filter(|(x, _)| pred(*x)).map(|(_, p)| p).sum()
    }

    /// Integer numerators over the least common denominator.
    pub fn to_integers(&self) -> (Vec<BigInt>, BigInt) {
        crate::rational::to_integers(&self.probs)
    }

    pub fn genpoly(&self) -> PolyQ {
        let terms = self
            .probs
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_zero())
            .map(|(x, p)| ((0..self.d).map(|j| ((x >> j) & 1) as u32).collect(), p.clone()));
        PolyQ::from_terms(self.d, terms).expect("exponent lengths match")
    }

    pub fn from_genpoly(f: &PolyQ) -> Result<Self> {
        guard("cube dimension", f.d(), MEASURE_MAX_D)?;
        if !f.is_multi_affine() {
            return Err(Error::NotMultiAffine);
        }
        let mut probs = vec![Rational::zero(); 1 << f.d()];
        for (e, c) in f.terms() {
            let x = e.iter().enumerate().fold(0usize, |m, (j, &b)| m | ((b as usize) << j));
            probs[x] = c.clone();
        }
        Self::new(f.d(), probs)
    }

    /// Independent product; `other` occupies coordinates `d..d + other.d`.
    pub fn product(&self, other: &Self) -> Result<Self> {
        let d = self.d + other.d;
        guard("cube dimension", d, MEASURE_MAX_D)?;
        let mut probs = vec![Rational::zero(); 1 << d];
        for (b, q) in other.probs.iter().enumerate() {
            for (a, p) in self.probs.iter().enumerate() {
                probs[a | (b << self.d)] = p * q;
            }
        }
        Ok(CubeMeasure { d, probs })
    }

    /// Marginal law of the coordinates in `keep`, which become `0..keep.len()` in order.
    pub fn project(&self, keep: &[usize]) -> Result<Self> {
        let mut seen = 0usize;
        for &j in keep {
            check_index(j, self.d)?;
            if (seen >> j) & 1 == 1 {
                return Err(Error::precondition(format!("coordinate {j} repeated")));
            }
            seen |= 1 << j;
        }
        let mut probs = vec![Rational::zero(); 1 << keep.len()];
        for (x, p) in self.probs.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let y = keep.iter().enumerate().fold(0usize, |m, (k, &j)| m | (((x >> j) & 1) << k));
            probs[y] += p;
        }
        Ok(CubeMeasure { d: keep.len(), probs })
    }

    /// Law of the remaining coordinates given `X_j = value`; coordinate `j` is dropped.
    pub fn condition_var(&self, j: usize, value: bool) -> Result<Self> {
        check_index(j, self.d)?;
        let v = value as usize;
        let w: Vec<Rational> = (0..1usize << (self.d - 1))
            .map(|y| {
                let low = y & ((1 << j) - 1);
                let high = (y >> j) << (j + 1);
                self.probs[low | high | (v << j)].clone()
            })
            .collect();
        if w.iter().all(|p| p.is_zero()) {
            return Err(Error::precondition(format!("conditioning on the null event X_{j} = {v}")));
        }
        Self::from_weights(self.d - 1, w)
    }

    /// Reweights by `prod_j lambda_j^{x_j}`; every `lambda_j` must be positive.
    pub fn external_field(&self, lambda: &[Rational]) -> Result<Self> {
        check_dim(self.d, lambda.len())?;
        if let Some(l) = lambda.iter().find(|l| !l.is_positive()) {
            return Err(Error::precondition(format!("external field {l} must be positive")));
        }
        let w = self
            .probs
            .iter()
            .enumerate()
            .map(|(x, p)| {
                let mut w = p.clone();
                for (j, l) in lambda.iter().enumerate() {
                    if (x >> j) & 1 == 1 {
                        w *= l;
                    }
                }
                w
            })
            .collect();
        Self::from_weights(self.d, w)
    }

    /// Reweights state `x` by `b[|x|]` and renormalizes.
    pub fn rank_rescale(&self, b: &RankWeights) -> Result<Self> {
        check_dim(self.d + 1, b.0.len())?;
        let w: Vec<Rational> = self
            .probs
            .iter()
            .enumerate()
            .map(|(x, p)| p * &b.0[x.count_ones() as usize])
            .collect();
        if w.iter().all(|p| p.is_zero()) {
            return Err(Error::precondition("rank rescaling normalizer Z is zero"));
        }
        Self::from_weights(self.d, w)
    }

    /// `a_k = mu{N = k}` for `k = 0..=d`.
    pub fn rank_sequence(&self) -> CoeffSeq {
        let mut a = vec![Rational::zero(); self.d + 1];
        for (x, p) in self.probs.iter().enumerate() {
            a[x.count_ones() as usize] += p;
        }
        CoeffSeq::new(a).expect("masses are nonnegative")
    }

    /// `(1 - theta) mu + theta (mu after exchanging coordinates i and j)`.
    pub fn partial_symmetrize(&self, i: usize, j: usize, theta: &Rational) -> Result<Self> {
        check_theta(theta)?;
        check_index(i, self.d)?;
        check_index(j, self.d)?;
        let keep = Rational::one() - theta;
        let probs = (0..self.probs.len())
            .map(|x| &keep * &self.probs[x] + theta * &self.probs[swap_bits(x, i, j)])
            .collect();
        Ok(CubeMeasure { d: self.d, probs })
    }

    /// Average over all coordinate permutations, i.e. the law whose generating
    /// polynomial is the polarization of the rank polynomial: `x -> a_|x| / C(d, |x|)`.
    pub fn total_symmetrize(&self) -> Self {
        let a = self.rank_sequence();
        let share: Vec<Rational> = (0..=self.d)
            .map(|k| &a.as_slice()[k] / Rational::from_integer(binomial(self.d as u64, k as u64)))
            .collect();
        let probs = (0..1usize << self.d).map(|x| share[x.count_ones() as usize].clone()).collect();
        CubeMeasure { d: self.d, probs }
    }

    /// Law of `(X_1, ..., X_d, d - N)`.
    pub fn homogenize_measure(&self) -> AugmentedLaw {
        let atoms = self
            .support()
            .map(|x| {
                let mut v: Vec<u32> = (0..self.d).map(|j| ((x >> j) & 1) as u32).collect();
                v.push((self.d as u32) - x.count_ones());
                (v, self.probs[x].clone())
            })
            .collect();
        AugmentedLaw { d: self.d, atoms }
    }

    /// Homogeneous measure on `{0,1}^{2d}` whose first `d` coordinates have law `mu`:
    /// the homogenizing variable is polarized into `d` clones.
    pub fn phsr_embed(&self) -> Result<Self> {
        guard("cube dimension", 2 * self.d, MEASURE_MAX_D)?;
        if self.d == 0 {
            return Ok(self.clone());
        }
        let h = self.genpoly().homogenize_to(self.d as u32)?;
        let mut counts = vec![1u32; self.d];
        counts.push(self.d as u32);
        let pol = h.polarize_with(&counts)?;
        Self::from_genpoly(&pol.poly)
    }

    /// Law conditioned on `N = k`, or `None` if that level is null.
    pub fn level(&self, k: usize) -> Option<Self> {
        let w: Vec<Rational> = self
            .probs
            .iter()
            .enumerate()
            .map(|(x, p)| if x.count_ones() as usize == k { p.clone() } else { Rational::zero() })
            .collect();
        Self::from_weights(self.d, w).ok()
    }

    /// Relabels coordinates: coordinate `j` moves to `perm[j]`.
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        check_dim(self.d, perm.len())?;
        let mut seen = vec![false; self.d];
        for &t in perm {
            check_index(t, self.d)?;
            if std::mem::replace(&mut seen[t], true) {
                return Err(Error::precondition("not a permutation"));
            }
        }
        let mut probs = vec![Rational::zero(); self.probs.len()];
        for (x, p) in self.probs.iter().enumerate() {
            let y = (0..self.d).fold(0usize, |m, j| m | (((x >> j) & 1) << perm[j]));
            probs[y] = p.clone();
        }
        Ok(CubeMeasure { d: self.d, probs })
    }

    pub fn state_to_bits(&self, x: usize) -> String {
        state_bits(self.d, x)
    }
}

pub(crate) fn state_bits(d: usize, x: usize) -> String {
    (0..d).map(|j| if (x >> j) & 1 == 1 { '1' } else { '0' }).collect()
}

pub(crate) fn parse_state(d: usize, s: &str) -> Result<usize> {
    if s.len() != d || !s.chars().all(|c| c == '0' || c == '1') {
        return Err(Error::Parse(format!("state {s:?} is not a bitstring of length {d}")));
    }
    Ok(s.chars().enumerate().fold(0usize, |m, (j, c)| m | (((c == '1') as usize) << j)))
}

impl Serialize for CubeMeasure {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let probs: BTreeMap<String, String> = self
            .support()
            .map(|x| (state_bits(self.d, x), format_rational(&self.probs[x])))
            .collect();
        let mut st = s.serialize_struct("CubeMeasure", 2)?;
        st.serialize_field("d", &self.d)?;
        st.serialize_field("probs", &probs)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for CubeMeasure {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            d: usize,
            probs: BTreeMap<String, crate::rational::RatStr>,
        }
        let raw = Raw::deserialize(de)?;
        let err = |e: Error| serde::de::Error::custom(e.to_string());
        guard("cube dimension", raw.d, MEASURE_MAX_D).map_err(err)?;
        let mut probs = vec![Rational::zero(); 1 << raw.d];
        for (k, v) in raw.probs {
            probs[parse_state(raw.d, &k).map_err(err)?] = v.0;
        }
        CubeMeasure::new(raw.d, probs).map_err(err)
    }
}

/// Nonnegative rank weights `b_0..b_d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankWeights(pub(crate) Vec<Rational>);

impl RankWeights {
    pub fn new(b: Vec<Rational>) -> Result<Self> {
        if let Some(x) = b.iter().find(|x| x.is_negative()) {
            return Err(Error::Negative(format!("rank weight {x}")));
        }
        Ok(RankWeights(b))
    }

    /// Indicator of the levels `lo..=hi` among `0..=d`.
    pub fn interval(d: usize, lo: usize, hi: usize) -> Self {
        RankWeights((0..=d).map(|k| if lo <= k && k <= hi { Rational::one() } else { Rational::zero() }).collect())
    }

    pub fn as_slice(&self) -> &[Rational] {
        &self.0
    }

    /// Nonzero entries form an interval and pass the ULC check, the condition
    /// under which rescaling is claimed to preserve strong Rayleigh.
    pub fn preserves_sr(&self) -> bool {
        CoeffSeq::new(self.0.clone()).map(|s| newton_ulc_check(&s).passes()).unwrap_or(false)
    }
}

/// Law of `(X, d - N)` as integer vectors with their probabilities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AugmentedLaw {
    pub d: usize,
    pub atoms: Vec<(Vec<u32>, Rational)>,
}

impl AugmentedLaw {
    /// `sum_atoms p * z^atom`, homogeneous of degree `d` in `d + 1` variables.
    pub fn genpoly(&self) -> PolyQ {
        PolyQ::from_terms(self.d + 1, self.atoms.iter().cloned()).expect("atom lengths match")
    }
}

/// Reduces a measure to lowest terms after integer-scaled computation.
pub(crate) fn measure_from_numerators(d: usize, nums: Vec<BigInt>, den: &BigInt) -> CubeMeasure {
    debug_assert!(nums.iter().fold(BigInt::zero(), |a, b| a + b) == *den);
    let g = nums.iter().fold(den.clone(), |g, n| crate::rational::big_gcd(&g, n));
    let probs = nums.into_iter().map(|n| Rational::new(n / &g, den / &g)).collect();
    CubeMeasure { d, probs }
}
