//! Dense univariate polynomials over the rationals.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::rational::{big_gcd, from_rat_strs, rat_strs, RatStr, Rational};

/// `a_0 + a_1 z + ... + a_n z^n`; trailing zeros are always trimmed, so the
/// zero polynomial has no coefficients.
#[derive(Clone, PartialEq, Eq, Default, Hash)]
pub struct UniPolyQ {
    coeffs: Vec<Rational>,
}

impl UniPolyQ {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPolyQ { coeffs }
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Rational::from_integer(c.into())).collect())
    }

    pub fn zero() -> Self {
        UniPolyQ { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `c z^k`.
    pub fn monomial(k: usize, c: Rational) -> Self {
        let mut v = vec![Rational::zero(); k + 1];
        v[k] = c;
        Self::new(v)
    }

    /// `z - r`.
    pub fn linear_root(r: Rational) -> Self {
        Self::new(vec![-r, Rational::one()])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Rational> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + crate::rational::to_f64(c);
        }
        acc
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        UniPolyQ {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * Rational::from_integer(BigInt::from(k)))
                .collect(),
        )
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// `self(z + s)`.
    pub fn shift(&self, s: &Rational) -> Self {
        let lin = UniPolyQ::new(vec![s.clone(), Rational::one()]);
        self.compose(&lin)
    }

    /// `self(g(z))`.
    pub fn compose(&self, g: &Self) -> Self {
        let mut acc = Self::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * g) + &Self::constant(c.clone());
        }
        acc
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead_inv = divisor.coeffs[dd].recip();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![Rational::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let q = &rem[k + dd] * &lead_inv;
            if q.is_zero() {
                continue;
            }
            for (i, c) in divisor.coeffs.iter().enumerate() {
                rem[k + i] -= &q * c;
            }
            quot[k] = q;
        }
        rem.truncate(dd);
        (Self::new(quot), Self::new(rem))
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            Some(l) => self.scale(&l.recip()),
            None => Self::zero(),
        }
    }

    /// Monic greatest common divisor (zero if both inputs are zero).
    pub fn gcd(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return if self.is_zero() { other.monic() } else { self.monic() };
        }
        let (mut a, mut b) = (self.integer_coeffs().0, other.integer_coeffs().0);
        if a.len() < b.len() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_empty() {
            let r = primitive_prem(&a, &b);
            a = b;
            b = r;
        }
        Self::new(a.into_iter().map(Rational::from_integer).collect()).monic()
    }

    /// Positive multiple with coprime integer coefficients; the sign pattern is unchanged.
    pub fn primitive(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let (ints, _) = self.integer_coeffs();
        Self::new(ints.into_iter().map(Rational::from_integer).collect())
    }

    /// Coefficients scaled by a positive rational to coprime integers, with that scale.
    pub fn integer_coeffs(&self) -> (Vec<BigInt>, Rational) {
        let (ints, l) = crate::rational::to_integers(&self.coeffs);
        let g = ints.iter().fold(BigInt::zero(), |acc, c| big_gcd(&acc, c));
        if g.is_zero() {
            return (ints, Rational::one());
        }
        let ints = ints.into_iter().map(|c| c / &g).collect();
        (ints, Rational::new(l, g))
    }

    /// Removes repeated factors: `f / gcd(f, f')`.
    pub fn squarefree_part(&self) -> Self {
        if self.degree().unwrap_or(0) == 0 {
            return self.clone();
        }
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0
    }

    /// Reverses the coefficient list over the given length (`z^n f(1/z)`).
    pub fn reversed(&self, n: usize) -> Self {
        let mut c: Vec<Rational> = (0..=n).map(|k| self.coeff(k)).collect();
        c.reverse();
        Self::new(c)
    }

    /// Unique polynomial of degree `< xs.len()` through the points (Newton form).
    pub fn interpolate(xs: &[Rational], ys: &[Rational]) -> Self {
        assert_eq!(xs.len(), ys.len());
        let n = xs.len();
        let mut dd = ys.to_vec();
        for level in 1..n {
            for i in (level..n).rev() {
                dd[i] = (&dd[i] - &dd[i - 1]) / (&xs[i] - &xs[i - level]);
            }
        }
        let mut acc = Self::zero();
        for i in (0..n).rev() {
            acc = &(&acc * &Self::linear_root(xs[i].clone())) + &Self::constant(dd[i].clone());
        }
        acc
    }

    pub fn has_nonneg_coeffs(&self) -> bool {
        self.coeffs.iter().all(|c| !c.is_negative())
    }
}

impl Add for &UniPolyQ {
    type Output = UniPolyQ;
    fn add(self, rhs: &UniPolyQ) -> UniPolyQ {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UniPolyQ::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &UniPolyQ {
    type Output = UniPolyQ;
    fn sub(self, rhs: &UniPolyQ) -> UniPolyQ {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UniPolyQ::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &UniPolyQ {
    type Output = UniPolyQ;
    fn mul(self, rhs: &UniPolyQ) -> UniPolyQ {
        if self.is_zero() || rhs.is_zero() {
            return UniPolyQ::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UniPolyQ::new(out)
    }
}

impl Neg for &UniPolyQ {
    type Output = UniPolyQ;
    fn neg(self) -> UniPolyQ {
        UniPolyQ {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl fmt::Debug for UniPolyQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for UniPolyQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})z")?,
                _ => write!(f, "({c})z^{k}")?,
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct UniJson {
    coeffs: Vec<RatStr>,
}

impl Serialize for UniPolyQ {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        UniJson {
            coeffs: rat_strs(&self.coeffs),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for UniPolyQ {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = UniJson::deserialize(d)?;
        Ok(UniPolyQ::new(from_rat_strs(j.coeffs)))
    }
}

/// Positive multiple of `rem(a, b)` with coprime integer coefficients; empty
/// when the remainder vanishes. Both inputs are trimmed and `b` is nonzero.
pub(crate) fn primitive_prem(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let db = b.len() - 1;
    let lc = &b[db];
    let (lc_abs, neg) = (lc.abs(), lc.is_negative());
    let mut r = a.to_vec();
    // each step scales r by |lc| > 0, so signs of the true remainder are kept
    while r.len() > db && !r.is_empty() {
        let top = r.pop().expect("nonempty");
        let shift = r.len() - db;
        for c in r.iter_mut() {
            *c *= &lc_abs;
        }
        if !top.is_zero() {
            let t = if neg { -top } else { top };
            for (i, bc) in b[..db].iter().enumerate() {
                r[shift + i] -= &t * bc;
            }
        }
        while r.last().is_some_and(|c| c.is_zero()) {
            r.pop();
        }
    }
    let g = r.iter().fold(BigInt::zero(), |acc, c| big_gcd(&acc, c));
    if !g.is_one() && !g.is_zero() {
        for c in r.iter_mut() {
            *c /= &g;
        }
    }
    r
}
