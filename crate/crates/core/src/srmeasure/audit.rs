//! Exact negative-dependence audits and the strong-Rayleigh consequence battery.

use std::ops::{AddAssign, Mul};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use super::coupling::{increasing_levels_check, sc_property_check, LevelsOutcome, ScOutcome};
use super::measure::{state_bits, CubeMeasure};
use crate::error::{guard, Result};
use crate::rational::{format_rational, to_f64, Rational};
use crate::realroot::{newton_ulc_check, CoeffSeq, UlcReport};

/// Largest dimension for the up-set tier.
pub const NA_MAX_D: usize = 6;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NaCounterexample {
    /// `P(X_i = X_j = 1) > P(X_i = 1) P(X_j = 1)`.
    Pairwise { i: usize, j: usize, joint: Rational, product: Rational },
    /// `P(X_S = value) > prod_{j in S} P(X_j = value)`.
    Cylinder { set: Vec<usize>, value: bool, joint: Rational, product: Rational },
    /// Up-sets `A` of the `S`-coordinates and `B` of the rest with `P(A and B) > P(A) P(B)`;
    /// states are listed in the full cube.
    UpSets { s: Vec<usize>, a: Vec<usize>, b: Vec<usize>, joint: Rational, product: Rational },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TierResult {
    Pass,
    Fail(NaCounterexample),
}

impl TierResult {
    pub fn passes(&self) -> bool {
        matches!(self, TierResult::Pass)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NaAudit {
    pub pairwise: TierResult,
    pub cylinder: TierResult,
    pub na: TierResult,
}

impl NaAudit {
    pub fn passes(&self) -> bool {
        self.pairwise.passes() && self.cylinder.passes() && self.na.passes()
    }
}

/// Pairwise, cylinder and full negative association (over up-set indicator
/// pairs of complementary coordinate sets); all exact.
pub fn na_audit(mu: &CubeMeasure) -> Result<NaAudit> {
    guard("dimension for the negative association tier", mu.d(), NA_MAX_D)?;
    Ok(NaAudit {
        pairwise: pairwise_tier(mu),
        cylinder: cylinder_tier(mu),
        na: upset_tier(mu),
    })
}

fn pairwise_tier(mu: &CubeMeasure) -> TierResult {
    let (n, den) = mu.to_integers();
    let mass = |pred: &dyn Fn(usize) -> bool| -> BigInt { n.iter().enumerate().filter(|(x, _)| pred(*x)).map(|(_, v)| v).sum() };
    let m: Vec<BigInt> = (0..mu.d()).map(|j| mass(&|x| (x >> j) & 1 == 1)).collect();
    for i in 0..mu.d() {
        for j in i + 1..mu.d() {
            let both = (1 << i) | (1 << j);
            let joint = mass(&|x| x & both == both);
            if &joint * &den > &m[i] * &m[j] {
                return TierResult::Fail(NaCounterexample::Pairwise {
                    i,
                    j,
                    joint: Rational::new(joint, den.clone()),
                    product: Rational::new(&m[i] * &m[j], &den * &den),
                });
            }
        }
    }
    TierResult::Pass
}

fn cylinder_tier(mu: &CubeMeasure) -> TierResult {
    let d = mu.d();
    let full = (1usize << d) - 1;
    let (n, den) = mu.to_integers();
    // up[s] = P(X_j = 1 for j in s), down[s] = P(X_j = 0 for j in s), as numerators over `den`
    let mut up: Vec<BigInt> = n.clone();
    let mut down: Vec<BigInt> = (0..=full).map(|s| n[full ^ s].clone()).collect();
    for j in 0..d {
        for s in 0..=full {
            if (s >> j) & 1 == 0 {
                let hi = up[s | (1 << j)].clone();
                up[s] += hi;
                let hi = down[s | (1 << j)].clone();
                down[s] += hi;
            }
        }
    }
    for s in (0..=full).filter(|s| s.count_ones() >= 2) {
        let set: Vec<usize> = (0..d).filter(|j| (s >> j) & 1 == 1).collect();
        let scale = num_traits::pow(den.clone(), set.len() - 1);
        for (value, table) in [(true, &up), (false, &down)] {
            let product: BigInt = set.iter().map(|&j| &table[1 << j]).product();
            if &table[s] * &scale > product {
                return TierResult::Fail(NaCounterexample::Cylinder {
                    set: set.clone(),
                    value,
                    joint: Rational::new(table[s].clone(), den.clone()),
                    product: Rational::new(product, &scale * &den),
                });
            }
        }
    }
    TierResult::Pass
}

/// All up-sets of `{0,1}^k` as bitmasks over the `2^k` states, `k <= 5`.
pub(crate) fn upsets(k: usize) -> &'static [u64] {
    static CACHE: OnceLock<Vec<Vec<u64>>> = OnceLock::new();
    let all = CACHE.get_or_init(|| {
        let mut out: Vec<Vec<u64>> = vec![vec![0, 1]];
        for k in 1..=NA_MAX_D - 1 {
            let prev = &out[k - 1];
            let half = 1u32 << (k - 1);
            let mut next = Vec::new();
            for &lo in prev {
                for &hi in prev {
                    if lo & !hi == 0 {
                        next.push(lo | (hi << half));
                    }
                }
            }
            out.push(next);
        }
        out
    });
    &all[k]
}

trait Exact: Clone + Zero + Ord + for<'a> AddAssign<&'a Self> + for<'a> Mul<&'a Self, Output = Self> {}
impl Exact for i128 {}
impl Exact for BigInt {}

struct Split<T> {
    s: Vec<usize>,
    c: Vec<usize>,
    /// `f[a][b]` in floating point and `n[a][b]` as integer numerators.
    f: Vec<Vec<f64>>,
    n: Vec<Vec<T>>,
}

/// Joint and marginal numerators of `(A, B)`: returns whether `den * joint <= pa * pb`.
fn exact_le<T: Exact>(sp: &Split<T>, den: &T, a: u64, b: u64) -> bool {
    let (mut joint, mut pa, mut pb) = (T::zero(), T::zero(), T::zero());
    for (ia, row) in sp.n.iter().enumerate() {
        let in_a = (a >> ia) & 1 == 1;
        for (ib, v) in row.iter().enumerate() {
            let in_b = (b >> ib) & 1 == 1;
            if in_a {
                pa += v;
                if in_b {
                    joint += v;
                }
            }
            if in_b {
                pb += v;
            }
        }
    }
    den.clone() * &joint <= pa * &pb
}

/// Margin beyond which the float comparison is trusted; all quantities are at most 1
/// and accumulate at most 64 rounding errors of relative size `2^-53`.
const FLOAT_MARGIN: f64 = 1e-12;

fn scan_split<T: Exact + Send + Sync>(sp: &Split<T>, den: &T) -> Option<(u64, u64)> {
    let (ka, kb) = (sp.s.len(), sp.c.len());
    // events differing only on null rows (columns) have equal masses, so one
    // representative per trace on the support suffices; null and sure events are skipped
    let row_supp = (0..1usize << ka).filter(|&ia| sp.n[ia].iter().any(|v| !v.is_zero())).fold(0u64, |m, ia| m | 1 << ia);
    let col_supp = (0..1usize << kb).filter(|&ib| sp.n.iter().any(|r| !r[ib].is_zero())).fold(0u64, |m, ib| m | 1 << ib);
    let distinct = |k: usize, supp: u64| -> Vec<u64> {
        let mut seen = std::collections::HashSet::new();
        upsets(k)
            .iter()
            .copied()
            .filter(|&u| u & supp != 0 && u & supp != supp && seen.insert(u & supp))
            .collect()
    };
    let ups_a = distinct(ka, row_supp);
    let ups_b = distinct(kb, col_supp);
    let col_f: Vec<f64> = (0..1usize << kb).map(|ib| sp.f.iter().map(|r| r[ib]).sum()).collect();
    ups_a.par_iter().find_map_first(|&a| {
        let mut v = vec![0f64; 1 << kb];
        for (ia, row) in sp.f.iter().enumerate() {
            if (a >> ia) & 1 == 1 {
                for (ib, x) in row.iter().enumerate() {
                    v[ib] += x;
                }
            }
        }
        let pa: f64 = v.iter().sum();
        ups_b.iter().find_map(|&b| {
            let (mut joint, mut pb) = (0f64, 0f64);
            for ib in 0..1usize << kb {
                if (b >> ib) & 1 == 1 {
                    joint += v[ib];
                    pb += col_f[ib];
                }
            }
            let gap = pa * pb - joint;
            if gap > FLOAT_MARGIN {
                return None;
            }
            (!exact_le(sp, den, a, b)).then_some((a, b))
        })
    })
}

fn upset_tier(mu: &CubeMeasure) -> TierResult {
    let d = mu.d();
    if d < 2 {
        return TierResult::Pass;
    }
    let (nums, den) = mu.to_integers();
    let small = den.bits() < 62;
    let floats: Vec<f64> = mu.probs().iter().map(to_f64).collect();
    // partitions with coordinate 0 on the S side cover every unordered pair
    for smask in (1usize..(1 << d) - 1).filter(|m| m & 1 == 1) {
        let s: Vec<usize> = (0..d).filter(|j| (smask >> j) & 1 == 1).collect();
        let c: Vec<usize> = (0..d).filter(|j| (smask >> j) & 1 == 0).collect();
        let compose = |ia: usize, ib: usize| -> usize {
            let x = s.iter().enumerate().fold(0, |m, (k, &j)| m | (((ia >> k) & 1) << j));
            c.iter().enumerate().fold(x, |m, (k, &j)| m | (((ib >> k) & 1) << j))
        };
        let f: Vec<Vec<f64>> = (0..1 << s.len())
            .map(|ia| (0..1 << c.len()).map(|ib| floats[compose(ia, ib)]).collect())
            .collect();
        let found = if small {
            let n: Vec<Vec<i128>> = (0..1 << s.len())
                .map(|ia| (0..1 << c.len()).map(|ib| nums[compose(ia, ib)].to_i128().unwrap()).collect())
                .collect();
            let sp = Split { s: s.clone(), c: c.clone(), f, n };
            scan_split(&sp, &den.to_i128().unwrap())
        } else {
            let n: Vec<Vec<BigInt>> = (0..1 << s.len())
                .map(|ia| (0..1 << c.len()).map(|ib| nums[compose(ia, ib)].clone()).collect())
                .collect();
            let sp = Split { s: s.clone(), c: c.clone(), f, n };
            scan_split(&sp, &den)
        };
        if let Some((a, b)) = found {
            let in_a = |x: usize| (0..1usize << s.len()).any(|ia| (a >> ia) & 1 == 1 && s.iter().enumerate().all(|(k, &j)| (x >> j) & 1 == (ia >> k) & 1));
            let in_b = |x: usize| (0..1usize << c.len()).any(|ib| (b >> ib) & 1 == 1 && c.iter().enumerate().all(|(k, &j)| (x >> j) & 1 == (ib >> k) & 1));
            let joint = mu.mass_where(|x| in_a(x) && in_b(x));
            let product = mu.mass_where(in_a) * mu.mass_where(in_b);
            let list = |set: u64, coords: &[usize]| -> Vec<usize> {
                (0..1usize << coords.len())
                    .filter(|i| (set >> i) & 1 == 1)
                    .map(|i| coords.iter().enumerate().fold(0, |m, (k, &j)| m | (((i >> k) & 1) << j)))
                    .collect()
            };
            return TierResult::Fail(NaCounterexample::UpSets {
                a: list(a, &s),
                b: list(b, &c),
                s,
                joint,
                product,
            });
        }
    }
    TierResult::Pass
}

/// Every exact consequence of the strong Rayleigh property checked together.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BatteryReport {
    pub na: NaAudit,
    pub sc: ScOutcome,
    pub levels: LevelsOutcome,
    pub rank_ulc: UlcReport,
}

impl BatteryReport {
    pub fn passes(&self) -> bool {
        self.na.passes()
            && matches!(self.sc, ScOutcome::Pass { .. })
            && self.levels == LevelsOutcome::Pass
            && self.rank_ulc.passes()
    }

    pub fn to_json(&self, d: usize) -> Value {
        json!({
            "pass": self.passes(),
            "na": self.na.to_json(d),
            "sc": match &self.sc {
                ScOutcome::Pass { skipped } => json!({"pass": true, "skipped": skipped}),
                ScOutcome::Fail { j, certificate } => json!({"pass": false, "j": j, "certificate": certificate.to_json(d - 1)}),
            },
            "levels": match &self.levels {
                LevelsOutcome::Pass => json!({"pass": true}),
                LevelsOutcome::Fail { k, next, certificate } => json!({"pass": false, "k": k, "next": next, "certificate": certificate.to_json(d)}),
            },
            "rank_ulc": serde_json::to_value(&self.rank_ulc).expect("serializable"),
        })
    }
}

/// Level masses scaled by the common denominator; the ULC verdict is scale invariant.
fn rank_numerators(mu: &CubeMeasure) -> CoeffSeq {
    let (n, _) = mu.to_integers();
    let mut a = vec![BigInt::zero(); mu.d() + 1];
    for (x, v) in n.iter().enumerate() {
        a[x.count_ones() as usize] += v;
    }
    CoeffSeq::new(a.into_iter().map(Rational::from_integer).collect()).expect("masses are nonnegative")
}

pub fn sr_battery(mu: &CubeMeasure) -> Result<BatteryReport> {
    Ok(BatteryReport {
        na: na_audit(mu)?,
        sc: sc_property_check(mu)?,
        levels: increasing_levels_check(mu)?,
        rank_ulc: newton_ulc_check(&rank_numerators(mu)),
    })
}

impl TierResult {
    pub fn to_json(&self, d: usize) -> Value {
        match self {
            TierResult::Pass => json!({"pass": true}),
            TierResult::Fail(c) => {
                let body = match c {
                    NaCounterexample::Pairwise { i, j, joint, product } => {
                        json!({"tier": "pairwise", "i": i, "j": j, "joint": format_rational(joint), "product": format_rational(product)})
                    }
                    NaCounterexample::Cylinder { set, value, joint, product } => json!({
                        "tier": "cylinder", "set": set, "value": *value as u8,
                        "joint": format_rational(joint), "product": format_rational(product)
                    }),
                    NaCounterexample::UpSets { s, a, b, joint, product } => json!({
                        "tier": "na", "s": s,
                        "a": a.iter().map(|&x| state_bits(d, x)).collect::<Vec<_>>(),
                        "b": b.iter().map(|&x| state_bits(d, x)).collect::<Vec<_>>(),
                        "joint": format_rational(joint), "product": format_rational(product)
                    }),
                };
                json!({"pass": false, "counterexample": body})
            }
        }
    }
}

impl NaAudit {
    pub fn to_json(&self, d: usize) -> Value {
        json!({
            "pass": self.passes(),
            "pairwise": self.pairwise.to_json(d),
            "cylinder": self.cylinder.to_json(d),
            "na": self.na.to_json(d),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn dedekind_counts() {
        let counts: Vec<usize> = (0..=5).map(|k| upsets(k).len()).collect();
        assert_eq!(counts, vec![2, 3, 6, 20, 168, 7581]);
    }

    #[test]
    fn audit_examples() {
        let u = CubeMeasure::uniform_on(2, &[1, 2]).unwrap();
        assert!(na_audit(&u).unwrap().passes());
        let pos = CubeMeasure::uniform_on(2, &[0, 3]).unwrap();
        let a = na_audit(&pos).unwrap();
        assert!(matches!(a.pairwise, TierResult::Fail(NaCounterexample::Pairwise { .. })));
        assert!(!a.na.passes());
        let b = CubeMeasure::product_bernoulli(&[rat(1, 3), rat(1, 2), rat(2, 5), rat(3, 7)]).unwrap();
        assert!(na_audit(&b).unwrap().passes());
        assert!(na_audit(&CubeMeasure::point_mass(7, 0).unwrap()).is_err());
    }

    #[test]
    fn upset_tier_catches_hidden_positive_dependence() {
        // pairwise negative but X_0 and (X_1 or X_2) positively correlated
        let w = [4, 0, 0, 3, 0, 3, 2, 0].iter().map(|&x| crate::rational::int(x)).collect();
        let mu = CubeMeasure::from_weights(3, w).unwrap();
        let audit = na_audit(&mu).unwrap();
        assert!(!audit.passes());
    }

    #[test]
    fn battery_on_uniform_pair() {
        let u = CubeMeasure::uniform_on(2, &[1, 2]).unwrap();
        assert!(sr_battery(&u).unwrap().passes());
    }
}
