//! Sparse multivariate polynomials with exact rational coefficients.

mod json;
mod transform;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, Zero};

use crate::error::{check_dim, Error, Result};
use crate::rational::{reduced, to_f64, to_integers, Rational};

pub use transform::{Polarized, SubstTarget};
pub(crate) use transform::k_subsets;

/// Exponent vector; its length is the ambient variable count.
pub type Monomial = Vec<u32>;

/// A point or direction in `R^d` with rational entries.
pub type RealVector = Vec<Rational>;

/// Finite double-precision complex number, used only for evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexF {
    re: f64,
    im: f64,
}

impl ComplexF {
    pub fn new(re: f64, im: f64) -> Result<Self> {
        if re.is_finite() && im.is_finite() {
            Ok(ComplexF { re, im })
        } else {
            Err(Error::precondition("complex value must be finite"))
        }
    }

    pub fn re(&self) -> f64 {
        self.re
    }

    pub fn im(&self) -> f64 {
        self.im
    }

    pub fn norm(&self) -> f64 {
        self.re.hypot(self.im)
    }

    fn to_c64(self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

/// Sparse polynomial in `d` variables. Terms are kept in lexicographic order
/// of exponents and no stored coefficient is zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PolyQ {
    d: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl PolyQ {
    pub fn zero(d: usize) -> Self {
        PolyQ {
            d,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(d: usize, c: Rational) -> Self {
        let mut p = Self::zero(d);
        p.add_term(vec![0; d], c);
        p
    }

    pub fn one(d: usize) -> Self {
        Self::constant(d, Rational::one())
    }

    /// The coordinate `z_j` (0-based); panics if `j >= d`.
    pub fn var(d: usize, j: usize) -> Self {
        assert!(j < d, "variable index {j} out of range for {d} variables");
        let mut e = vec![0; d];
        e[j] = 1;
        Self::monomial(e, Rational::one())
    }

    pub fn monomial(exp: Monomial, c: Rational) -> Self {
        let mut p = Self::zero(exp.len());
        p.add_term(exp, c);
        p
    }

    /// Sums duplicate monomials and drops zeros.
    pub fn from_terms(d: usize, terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Result<Self> {
        let mut p = Self::zero(d);
        for (e, c) in terms {
            check_dim(d, e.len())?;
            p.add_term(e, c);
        }
        Ok(p)
    }

    /// Linear form `c_0 + sum_j w_j z_j`.
    pub fn affine(constant: Rational, weights: &[Rational]) -> Self {
        let d = weights.len();
        let mut p = Self::constant(d, constant);
        for (j, w) in weights.iter().enumerate() {
            let mut e = vec![0; d];
            e[j] = 1;
            p.add_term(e, w.clone());
        }
        p
    }

    pub(crate) fn add_term(&mut self, exp: Monomial, c: Rational) {
        debug_assert_eq!(exp.len(), self.d);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exp) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, exp: &[u32]) -> Rational {
        self.terms.get(exp).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Maximum total degree; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn min_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).min()
    }

    pub fn degree_in(&self, j: usize) -> u32 {
        self.terms.keys().map(|e| e[j]).max().unwrap_or(0)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.total_degree() == self.min_degree()
    }

    pub fn is_multi_affine(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x <= 1))
    }

    pub fn has_nonneg_coeffs(&self) -> bool {
        self.terms.values().all(|c| !c.is_negative())
    }

    /// Variables that actually occur.
    pub fn support_vars(&self) -> Vec<usize> {
        (0..self.d).filter(|&j| self.degree_in(j) > 0).collect()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_dim(self.d, other.d)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rational::one())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.d);
        }
        PolyQ {
            d: self.d,
            terms: self.terms.iter().map(|(e, a)| (e.clone(), a * c)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        check_dim(self.d, other.d)?;
        let mut out = Self::zero(self.d);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Monomial = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.d);
        for _ in 0..k {
            acc = acc.mul(self).expect("same dimension");
        }
        acc
    }

    /// Exact evaluation at a rational point, over integers with one final reduction.
    pub fn eval(&self, x: &[Rational]) -> Result<Rational> {
        check_dim(self.d, x.len())?;
        let Some(deg) = self.total_degree() else {
            return Ok(Rational::zero());
        };
        let coeffs: Vec<Rational> = self.terms.values().cloned().collect();
        let (cs, l) = to_integers(&coeffs);
        let (xs, b) = to_integers(x);
        let powers = power_table(&xs, |j| self.degree_in(j), BigInt::one);
        let bpow = power_table(std::slice::from_ref(&b), |_| deg, BigInt::one).pop().expect("one row");
        let mut acc = BigInt::zero();
        for ((e, _), c) in self.terms.iter().zip(cs) {
            let mut t = c * &bpow[(deg - e.iter().sum::<u32>()) as usize];
            for (j, &k) in e.iter().enumerate() {
                if k > 0 {
                    t *= &powers[j][k as usize];
                }
            }
            acc += t;
        }
        Ok(reduced(acc, l * &bpow[deg as usize]))
    }

    /// Floating evaluation; each coefficient is rounded once.
    pub fn eval_complex(&self, z: &[ComplexF]) -> Result<ComplexF> {
        check_dim(self.d, z.len())?;
        let pts: Vec<Complex64> = z.iter().map(|c| c.to_c64()).collect();
        let powers = power_table(&pts, |j| self.degree_in(j), || Complex64::new(1.0, 0.0));
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let mut t = Complex64::new(to_f64(c), 0.0);
            for (j, &k) in e.iter().enumerate() {
                if k > 0 {
                    t *= powers[j][k as usize];
                }
            }
            acc += t;
        }
        ComplexF::new(acc.re, acc.im)
            .map_err(|_| Error::precondition("complex evaluation overflowed"))
    }

    /// Positive multiple with coprime integer coefficients; zero stays zero.
    pub fn primitive(&self) -> PolyQ {
        let coeffs: Vec<Rational> = self.terms.values().cloned().collect();
        let (ints, _) = crate::rational::to_integers(&coeffs);
        let g = ints.iter().fold(BigInt::zero(), |acc, c| crate::rational::big_gcd(&acc, c));
        let mut out = PolyQ::zero(self.d);
        for ((e, _), c) in self.terms.iter().zip(ints) {
            out.add_term(e.clone(), Rational::from_integer(c / &g));
        }
        out
    }

    /// Evaluation at the all-ones point.
    pub fn coefficient_sum(&self) -> Rational {
        self.terms.values().fold(Rational::zero(), |a, c| a + c)
    }
}

fn power_table<T: Clone + for<'a> std::ops::Mul<&'a T, Output = T>>(
    x: &[T],
    deg: impl Fn(usize) -> u32,
    one: impl Fn() -> T,
) -> Vec<Vec<T>> {
    x.iter()
        .enumerate()
        .map(|(j, xj)| {
            let mut row = vec![one()];
            for k in 0..deg(j) as usize {
                let next = row[k].clone() * xj;
                row.push(next);
            }
            row
        })
        .collect()
}

impl fmt::Debug for PolyQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for PolyQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            for (j, &k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => write!(f, "*z{}", j + 1)?,
                    _ => write!(f, "*z{}^{k}", j + 1)?,
                }
            }
        }
        Ok(())
    }
}
