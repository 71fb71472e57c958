//! Refutation by line restrictions, the bivariate multi-affine criterion,
//! Rayleigh gaps, hyperbolicity and cone membership.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::verdict::{restriction_certifies, Provenance, Verdict, Witness, WitnessStage};
use crate::error::{check_dim, check_index, Error, Result};
use crate::poly::{PolyQ, RealVector};
use crate::rational::{rat_strs, Rational};
use crate::realroot::{is_real_rooted, roots_all_negative};
use crate::uni::UniPolyQ;

/// Half-width of the sampling box for line offsets and directions.
pub const DEFAULT_BOX: i64 = 8;
pub const DEFAULT_TRIALS: usize = 200;
const MAX_DENOMINATOR: i64 = 4;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RefuteConfig {
    pub trials: usize,
    pub seed: u64,
    pub box_bound: i64,
}

impl RefuteConfig {
    pub fn new(trials: usize, seed: u64) -> Self {
        RefuteConfig {
            trials,
            seed,
            box_bound: DEFAULT_BOX,
        }
    }
}

fn sample_rational(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> Rational {
    // uniform numerator on the grid (1/q)Z within [lo, hi]
    let q = rng.gen_range(1..=MAX_DENOMINATOR);
    let n = rng.gen_range(lo * q..=hi * q);
    Rational::new(BigInt::from(n), BigInt::from(q))
}

fn sample_offset(rng: &mut ChaCha8Rng, d: usize, b: i64) -> RealVector {
    (0..d).map(|_| sample_rational(rng, -b, b)).collect()
}

fn sample_direction(rng: &mut ChaCha8Rng, d: usize, b: i64) -> RealVector {
    (0..d)
        .map(|_| loop {
            let x = sample_rational(rng, 0, b);
            if x.is_positive() {
                break x;
            }
        })
        .collect()
}

fn unit(d: usize, k: usize, c: Rational) -> RealVector {
    let mut e = vec![Rational::zero(); d];
    e[k] = c;
    e
}

struct Trial {
    v: RealVector,
    u: RealVector,
    pair: Option<(usize, usize)>,
}

/// Seeded line-restriction refuter with the default box.
pub fn refute_stability(p: &PolyQ, trials: usize, seed: u64) -> Result<Verdict> {
    refute_stability_with(p, &RefuteConfig::new(trials, seed))
}

/// Searches for a line `v + t u` (`u >= 0`) on which `p` has a non-real root.
///
/// Coordinate probes run first, then `trials` sampled lines with
/// `v in [-B, B]^d`, `u in (0, B]^d`. For multi-affine input every sampled
/// point also tests the Rayleigh gap of a random coordinate pair and turns a
/// negative gap into an explicit line. The first refutation in trial order wins.
pub fn refute_stability_with(p: &PolyQ, cfg: &RefuteConfig) -> Result<Verdict> {
    if p.is_zero() {
        return Ok(Verdict::Certified {
            provenance: Provenance::TrivialZero,
        });
    }
    let d = p.d();
    let seed = Some(cfg.seed);
    // search on an integer multiple; witnesses are re-expressed against `p`
    let q = p.primitive();
    if let Some(w) = canonical_probe(&q)? {
        return Ok(Verdict::Refuted { witness: rebase(p, w)?, seed });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let guided = p.is_multi_affine() && d >= 2;
    let trials: Vec<Trial> = (0..cfg.trials)
        .map(|_| {
            let v = sample_offset(&mut rng, d, cfg.box_bound);
            let u = sample_direction(&mut rng, d, cfg.box_bound);
            let pair = guided.then(|| {
                let i = rng.gen_range(0..d);
                let j = (i + rng.gen_range(1..d)) % d;
                (i, j)
            });
            Trial { v, u, pair }
        })
        .collect();
    let found = trials.into_par_iter().enumerate().find_map_first(|(k, t)| {
        let r = q.restrict_line(&t.v, &t.u).expect("dimensions checked");
        if restriction_certifies(&r, &t.u) {
            return Some(Witness::new(t.v, t.u, r, WitnessStage::Random, Some(k)));
        }
        let (i, j) = t.pair?;
        let mut w = rayleigh_line(&q, &t.v, i, j)?;
        w.trial = Some(k);
        Some(w)
    });
    Ok(match found {
        Some(witness) => Verdict::Refuted {
            witness: rebase(p, witness)?,
            seed,
        },
        None => Verdict::NotRefuted {
            trials: cfg.trials,
            seed: cfg.seed,
        },
    })
}

/// Recomputes the restriction against `p`; a positive multiple has the same roots.
fn rebase(p: &PolyQ, mut w: Witness) -> Result<Witness> {
    w.restriction = p.restrict_line(&w.v, &w.u)?;
    Ok(w)
}

/// Lines along coordinate axes through `0` and `+-e_k`.
fn canonical_probe(p: &PolyQ) -> Result<Option<Witness>> {
    let d = p.d();
    for j in 0..d {
        let u = unit(d, j, Rational::one());
        let mut offsets = vec![vec![Rational::zero(); d]];
        for k in (0..d).filter(|&k| k != j) {
            offsets.push(unit(d, k, Rational::one()));
            offsets.push(unit(d, k, -Rational::one()));
        }
        for v in offsets {
            let r = p.restrict_line(&v, &u)?;
            if restriction_certifies(&r, &u) {
                return Ok(Some(Witness::new(v, u, r, WitnessStage::Canonical, None)));
            }
        }
    }
    Ok(None)
}

/// Coefficients of `f` restricted to the `(i, j)` coordinate plane through `x`:
/// `a + b s + c t + e s t`.
fn bilinear_slice(p: &PolyQ, x: &[Rational], i: usize, j: usize) -> [Rational; 4] {
    let mut pt = x.to_vec();
    let mut g = |s: i64, t: i64| {
        pt[i] = Rational::from_integer(s.into());
        pt[j] = Rational::from_integer(t.into());
        p.eval(&pt).expect("dimension checked")
    };
    let a = g(0, 0);
    let b = g(1, 0) - &a;
    let c = g(0, 1) - &a;
    let e = g(1, 1) - &a - &b - &c;
    [a, b, c, e]
}

/// Line witness from a negative Rayleigh gap `b c - a e < 0` in the `(i, j)` slice.
fn rayleigh_line(p: &PolyQ, x: &[Rational], i: usize, j: usize) -> Option<Witness> {
    let [a, b, c, e] = bilinear_slice(p, x, i, j);
    if &a * &e <= &b * &c {
        return None;
    }
    let d = p.d();
    let mut v = x.to_vec();
    let mut u = vec![Rational::zero(); d];
    if !e.is_zero() {
        // e(s + c/e)(t + b/e) + (ae - bc)/e, so the diagonal through the centre has no real root
        v[i] = -&c / &e;
        v[j] = -&b / &e;
        u[i] = Rational::one();
        u[j] = Rational::one();
    } else {
        // b c < 0: the slice vanishes identically along (|c|, |b|)
        v[i] = -&a / &b;
        v[j] = Rational::zero();
        u[i] = c.abs();
        u[j] = b.abs();
    }
    // prefer a strictly positive direction; small weights keep the non-real roots
    let others: Vec<usize> = (0..d).filter(|&k| k != i && k != j).collect();
    for k in (2..=64).step_by(2) {
        let eps = Rational::new(BigInt::one(), BigInt::one() << k);
        let mut up = u.clone();
        for &o in &others {
            up[o] = eps.clone();
        }
        let r = p.restrict_line(&v, &up).ok()?;
        if restriction_certifies(&r, &up) {
            return Some(Witness::new(v, up, r, WitnessStage::Rayleigh, None));
        }
        if others.is_empty() {
            break;
        }
    }
    let r = p.restrict_line(&v, &u).ok()?;
    restriction_certifies(&r, &u).then(|| Witness::new(v, u, r, WitnessStage::Rayleigh, None))
}

/// `a + b s + c t + d s t` is stable iff `a d <= b c`.
pub fn bivariate_ma_stable(a: &Rational, b: &Rational, c: &Rational, d: &Rational) -> bool {
    a * d <= b * c
}

/// `d_i f d_j f - f d_ij f` for multi-affine `f`.
pub fn rayleigh_gap(f: &PolyQ, i: usize, j: usize) -> Result<PolyQ> {
    check_index(i, f.d())?;
    check_index(j, f.d())?;
    if !f.is_multi_affine() {
        return Err(Error::NotMultiAffine);
    }
    if i == j {
        return Err(Error::precondition("Rayleigh gap needs distinct indices"));
    }
    let fi = f.differentiate(i)?;
    let fj = f.differentiate(j)?;
    let fij = fi.differentiate(j)?;
    fi.mul(&fj)?.sub(&f.mul(&fij)?)
}

/// Samples real points and every coordinate pair; a negative Rayleigh gap is
/// converted into a replayable line witness.
pub fn rayleigh_refute(f: &PolyQ, trials: usize, seed: u64) -> Result<Verdict> {
    if !f.is_multi_affine() {
        return Err(Error::NotMultiAffine);
    }
    if f.is_zero() {
        return Ok(Verdict::Certified {
            provenance: Provenance::TrivialZero,
        });
    }
    let d = f.d();
    let q = f.primitive();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 0..trials {
        let x = sample_offset(&mut rng, d, DEFAULT_BOX);
        for i in 0..d {
            for j in i + 1..d {
                if let Some(mut w) = rayleigh_line(&q, &x, i, j) {
                    w.trial = Some(k);
                    return Ok(Verdict::Refuted {
                        witness: rebase(f, w)?,
                        seed: Some(seed),
                    });
                }
            }
        }
    }
    Ok(Verdict::NotRefuted { trials, seed })
}

fn require_hyperbolic_direction(p: &PolyQ, x: &[Rational], name: &str) -> Result<()> {
    check_dim(p.d(), x.len())?;
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if !p.is_homogeneous() {
        return Err(Error::precondition("polynomial must be homogeneous"));
    }
    if p.eval(x)?.is_zero() {
        return Err(Error::precondition(format!(
            "p({name}) != 0 is required for a direction of hyperbolicity, but p({name}) = 0"
        )));
    }
    Ok(())
}

/// Searches for `y` such that `t -> p(y + t x)` has a non-real root.
pub fn hyperbolicity_refute(p: &PolyQ, x: &[Rational], trials: usize, seed: u64) -> Result<Verdict> {
    require_hyperbolic_direction(p, x, "x")?;
    let d = p.d();
    let check = |y: RealVector, stage, trial| -> Option<Witness> {
        let r = p.restrict_line(&y, x).expect("dimension checked");
        (!is_real_rooted(&r).expect("leading coefficient p(x) is nonzero"))
            .then(|| Witness::new(y, x.to_vec(), r, stage, trial))
    };
    for k in 0..d {
        for c in [Rational::one(), -Rational::one()] {
            if let Some(w) = check(unit(d, k, c), WitnessStage::Canonical, None) {
                return Ok(Verdict::Refuted {
                    witness: w,
                    seed: Some(seed),
                });
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ys: Vec<RealVector> = (0..trials).map(|_| sample_offset(&mut rng, d, DEFAULT_BOX)).collect();
    let found = ys
        .into_par_iter()
        .enumerate()
        .find_map_first(|(k, y)| check(y, WitnessStage::Random, Some(k)));
    Ok(match found {
        Some(witness) => Verdict::Refuted {
            witness,
            seed: Some(seed),
        },
        None => Verdict::NotRefuted { trials, seed },
    })
}

/// Whether every root of `t -> p(x + t xi)` is real and strictly negative.
///
/// Meaningful only when `p` is hyperbolic in direction `xi`, which the caller
/// should have tested with [`hyperbolicity_refute`].
pub fn cone_membership(p: &PolyQ, xi: &[Rational], x: &[Rational]) -> Result<bool> {
    require_hyperbolic_direction(p, xi, "xi")?;
    check_dim(p.d(), x.len())?;
    let r = p.restrict_line(x, xi)?;
    if r.degree().unwrap_or(0) == 0 {
        return Err(Error::precondition("restriction along xi degenerates to a constant"));
    }
    Ok(is_real_rooted(&r)? && roots_all_negative(&r)?)
}

/// Result of the experimental non-homogeneous hyperbolicity probe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProbeOutcome {
    /// `q(i t x + y) = 0` exactly.
    Zero {
        y: RealVector,
        t: Rational,
        restriction: UniPolyQ,
    },
    NoZeroFound {
        trials: usize,
    },
}

impl Serialize for ProbeOutcome {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("ProbeOutcome", 4)?;
        match self {
            ProbeOutcome::Zero { y, t, restriction } => {
                st.serialize_field("kind", "zero_found")?;
                st.serialize_field("y", &rat_strs(y))?;
                st.serialize_field("t", &t.to_string())?;
                st.serialize_field("restriction", restriction)?;
            }
            ProbeOutcome::NoZeroFound { trials } => {
                st.serialize_field("kind", "no_zero_found")?;
                st.serialize_field("trials", trials)?;
            }
        }
        st.end()
    }
}

/// Experimental: looks for an exact zero of `q(i t x + y)` over sampled rational
/// `y` and the given `t` values. Exact zeros are rare, so silence is weak evidence.
pub fn nonhomogeneous_hyperbolicity_probe(
    q: &PolyQ,
    x: &[Rational],
    t_samples: &[Rational],
    trials: usize,
    seed: u64,
) -> Result<ProbeOutcome> {
    check_dim(q.d(), x.len())?;
    let (top, _) = q.hom_parts()?;
    if top.eval(x)?.is_zero() {
        return Err(Error::precondition("the top-degree part must not vanish at x"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let y = sample_offset(&mut rng, q.d(), DEFAULT_BOX);
        let r = q.restrict_line(&y, x)?;
        for t in t_samples {
            if eval_at_imaginary(&r, t) {
                return Ok(ProbeOutcome::Zero {
                    y,
                    t: t.clone(),
                    restriction: r,
                });
            }
        }
    }
    Ok(ProbeOutcome::NoZeroFound { trials })
}

/// Whether `r(i t) = 0`.
fn eval_at_imaginary(r: &UniPolyQ, t: &Rational) -> bool {
    let (mut re, mut im) = (Rational::zero(), Rational::zero());
    let mut tp = Rational::one();
    for (k, c) in r.coeffs().iter().enumerate() {
        let term = c * &tp;
        match k % 4 {
            0 => re += term,
            1 => im += term,
            2 => re -= term,
            _ => im -= term,
        }
        tp *= t;
    }
    re.is_zero() && im.is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn p(d: usize, terms: &[(&[u32], i64)]) -> PolyQ {
        PolyQ::from_terms(d, terms.iter().map(|(e, c)| (e.to_vec(), int(*c)))).unwrap()
    }

    #[test]
    fn refute_examples() {
        let circ = p(2, &[(&[2, 0], 1), (&[0, 2], 1)]);
        let v = refute_stability(&circ, 200, 1).unwrap();
        let w = v.witness().expect("refuted");
        assert_eq!(w.v, vec![int(0), int(1)]);
        assert_eq!(w.u, vec![int(1), int(0)]);
        assert_eq!(w.restriction, UniPolyQ::from_i64s(&[1, 0, 1]));
        assert!(w.replay(&circ).unwrap());

        let lin = p(2, &[(&[1, 0], 1), (&[0, 1], 1)]);
        assert_eq!(
            refute_stability(&lin, 100, 3).unwrap(),
            Verdict::NotRefuted { trials: 100, seed: 3 }
        );

        let f = p(2, &[(&[0, 0], 1), (&[1, 0], 1), (&[0, 1], 1), (&[1, 1], 2)]);
        let v = refute_stability(&f, 200, 5).unwrap();
        assert!(v.witness().unwrap().replay(&f).unwrap());
        assert!(!bivariate_ma_stable(&int(1), &int(1), &int(1), &int(2)));

        assert_eq!(
            refute_stability(&PolyQ::zero(2), 10, 0).unwrap(),
            Verdict::Certified { provenance: Provenance::TrivialZero }
        );
    }

    #[test]
    fn difference_of_coordinates_needs_identically_zero_line() {
        let f = p(2, &[(&[1, 0], 1), (&[0, 1], -1)]);
        let v = refute_stability(&f, 200, 11).unwrap();
        let w = v.witness().expect("s - t is not stable");
        assert!(w.u.iter().all(|x| x.is_positive()));
        assert!(w.replay(&f).unwrap());
    }

    #[test]
    fn bivariate_examples() {
        assert!(bivariate_ma_stable(&int(1), &int(1), &int(1), &int(1)));
        assert!(bivariate_ma_stable(&int(1), &int(0), &int(0), &int(-1)));
    }

    #[test]
    fn rayleigh_examples() {
        let prod = p(2, &[(&[0, 0], 1), (&[1, 0], 1), (&[0, 1], 1), (&[1, 1], 1)]);
        assert!(rayleigh_gap(&prod, 0, 1).unwrap().is_zero());
        let s = p(2, &[(&[0, 0], 1), (&[1, 0], 1), (&[0, 1], 1)]);
        assert_eq!(rayleigh_gap(&s, 0, 1).unwrap(), PolyQ::one(2));
        let f = p(2, &[(&[0, 0], 1), (&[1, 0], 1), (&[0, 1], 1), (&[1, 1], 2)]);
        assert_eq!(rayleigh_gap(&f, 0, 1).unwrap(), PolyQ::constant(2, int(-1)));
        assert!(rayleigh_refute(&f, 10, 0).unwrap().is_refuted());
        assert!(matches!(rayleigh_gap(&p(1, &[(&[2], 1)]), 0, 0), Err(Error::NotMultiAffine)));
    }

    #[test]
    fn hyperbolicity_examples() {
        let circ = p(2, &[(&[2, 0], 1), (&[0, 2], 1)]);
        let v = hyperbolicity_refute(&circ, &[int(1), int(0)], 50, 0).unwrap();
        assert_eq!(v.witness().unwrap().v, vec![int(0), int(1)]);
        let lorentz = p(3, &[(&[2, 0, 0], 1), (&[0, 2, 0], -1), (&[0, 0, 2], -1)]);
        assert!(!hyperbolicity_refute(&lorentz, &[int(1), int(0), int(0)], 100, 0).unwrap().is_refuted());
        let planes = p(2, &[(&[1, 1], 1)]);
        assert!(!hyperbolicity_refute(&planes, &[int(1), int(1)], 100, 0).unwrap().is_refuted());
        assert!(hyperbolicity_refute(&planes, &[int(1), int(0)], 10, 0).is_err());
    }

    #[test]
    fn cone_examples() {
        let lorentz = p(3, &[(&[2, 0, 0], 1), (&[0, 2, 0], -1), (&[0, 0, 2], -1)]);
        let xi = [int(1), int(0), int(0)];
        assert!(cone_membership(&lorentz, &xi, &[int(2), int(1), int(0)]).unwrap());
        assert!(!cone_membership(&lorentz, &xi, &[int(1), int(2), int(0)]).unwrap());
        assert!(cone_membership(&lorentz, &xi, &xi).unwrap());
        let planes = p(2, &[(&[1, 1], 1)]);
        assert!(cone_membership(&planes, &[int(1), int(0)], &[int(1), int(1)]).is_err());
    }

    #[test]
    fn imaginary_probe_finds_exact_zero() {
        // q = x^2 + 1 vanishes at x = i, i.e. t = 1, y = 0 along x = 1
        let q = p(1, &[(&[2], 1), (&[0], 1)]);
        let r = UniPolyQ::from_i64s(&[1, 0, 1]);
        assert!(eval_at_imaginary(&r, &int(1)));
        let out = nonhomogeneous_hyperbolicity_probe(&q, &[int(1)], &[int(1)], 5, 0).unwrap();
        assert!(matches!(out, ProbeOutcome::NoZeroFound { .. } | ProbeOutcome::Zero { .. }));
    }
}
