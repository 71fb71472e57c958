use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{guard, Error, Result};
use crate::matrix::RationalMatrix;
use crate::poly::PolyQ;
use crate::rational::{factorial, to_integers, Rational};

pub const RYSER_MAX_N: usize = 14;
pub const NAIVE_MAX_N: usize = 8;
pub const PRODUCT_POLY_MAX_N: usize = 10;

fn require_square(a: &RationalMatrix) -> Result<usize> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            got: a.ncols(),
        });
    }
    Ok(a.nrows())
}

/// Ryser inclusion-exclusion over column subsets in Gray-code order, on rows
/// scaled to integers.
pub fn permanent_ryser(a: &RationalMatrix) -> Result<Rational> {
    let n = require_square(a)?;
    guard("permanent order", n, RYSER_MAX_N)?;
    if n == 0 {
        return Ok(Rational::one());
    }
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    let mut scale = BigInt::one();
    for i in 0..n {
        let (nums, den) = to_integers(a.row(i));
        scale *= den;
        rows.push(nums);
    }
    let mut sums = vec![BigInt::zero(); n];
    let mut total = BigInt::zero();
    let mut gray = 0usize;
    for k in 1usize..1 << n {
        let bit = k.trailing_zeros() as usize;
        gray ^= 1 << bit;
        let adding = (gray >> bit) & 1 == 1;
        for (s, row) in sums.iter_mut().zip(&rows) {
            if adding {
                *s += &row[bit];
            } else {
                *s -= &row[bit];
            }
        }
        if sums.iter().any(|s| s.is_zero()) {
            continue;
        }
        let prod: BigInt = sums.iter().product();
        if (n - gray.count_ones() as usize).is_multiple_of(2) {
            total += prod;
        } else {
            total -= prod;
        }
    }
    Ok(Rational::new(total, scale))
}

/// Sum over all permutations; test oracle for small orders.
pub fn permanent_naive(a: &RationalMatrix) -> Result<Rational> {
    let n = require_square(a)?;
    guard("naive permanent order", n, NAIVE_MAX_N)?;
    fn rec(a: &RationalMatrix, i: usize, used: usize, acc: &Rational, out: &mut Rational) {
        if i == a.nrows() {
            *out += acc;
            return;
        }
        for j in 0..a.ncols() {
            if (used >> j) & 1 == 0 && !a.get(i, j).is_zero() {
                rec(a, i + 1, used | (1 << j), &(acc * a.get(i, j)), out);
            }
        }
    }
    let mut out = Rational::zero();
    rec(a, 0, 0, &Rational::one(), &mut out);
    Ok(out)
}

/// `prod_i sum_j a_ij x_j`, whose coefficient of `x_1 ... x_n` is `Per(A)`.
pub fn product_poly(a: &RationalMatrix) -> Result<PolyQ> {
    let n = require_square(a)?;
    guard("product polynomial order", n, PRODUCT_POLY_MAX_N)?;
    if !a.is_nonnegative() {
        return Err(Error::Negative("matrix entry".into()));
    }
    let mut p = PolyQ::one(n);
    for i in 0..n {
        p = p.mul(&PolyQ::affine(Rational::zero(), a.row(i)))?;
    }
    debug_assert_eq!(p.coeff(&vec![1; n]), permanent_ryser(a)?);
    Ok(p)
}

/// All first partials equal 1 at the all-ones point, for `p` homogeneous of
/// degree `n` in `n` variables with nonnegative coefficients.
pub fn doubly_stochastic_check(p: &PolyQ) -> Result<bool> {
    let n = p.d();
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if !p.is_homogeneous() || p.total_degree() != Some(n as u32) || !p.has_nonneg_coeffs() {
        return Err(Error::precondition(format!(
            "polynomial must be homogeneous of degree {n} with nonnegative coefficients"
        )));
    }
    let mut partials = vec![Rational::zero(); n];
    for (e, c) in p.terms() {
        for (j, &k) in e.iter().enumerate() {
            if k > 0 {
                partials[j] += c * Rational::from_integer(k.into());
            }
        }
    }
    Ok(partials.iter().all(|v| v.is_one()))
}

/// `n! / n^n`.
pub fn vdw_bound(n: usize) -> Rational {
    Rational::new(factorial(n as u64), BigInt::from(n).pow(n as u32))
}

/// Exactly doubly stochastic matrix near the Sinkhorn scaling of a positive matrix.
///
/// Sinkhorn runs in floating point; the leading `(n-1) x (n-1)` block is then
/// rounded to multiples of `1/den` and the last row and column are solved
/// exactly so every line sums to 1. Fails if the border goes negative.
pub fn sinkhorn_doubly_stochastic(a: &RationalMatrix, iterations: usize, den: u32) -> Result<RationalMatrix> {
    let n = require_square(a)?;
    if n == 0 {
        return Ok(RationalMatrix::zeros(0, 0));
    }
    if a.entries().iter().any(|x| !x.is_positive()) {
        return Err(Error::precondition("Sinkhorn input must be entrywise positive"));
    }
    let mut m: Vec<Vec<f64>> = (0..n).map(|i| a.row(i).iter().map(crate::rational::to_f64).collect()).collect();
    for _ in 0..iterations {
        for row in m.iter_mut() {
            let s: f64 = row.iter().sum();
            row.iter_mut().for_each(|x| *x /= s);
        }
        for j in 0..n {
            let s: f64 = m.iter().map(|r| r[j]).sum();
            m.iter_mut().for_each(|r| r[j] /= s);
        }
    }
    let q = BigInt::from(den);
    let mut out = RationalMatrix::zeros(n, n);
    for (i, row) in m.iter().enumerate().take(n - 1) {
        for (j, x) in row.iter().enumerate().take(n - 1) {
            let k = (x * den as f64).round().to_i64().unwrap_or(0).max(1);
            out.set(i, j, Rational::new(BigInt::from(k), q.clone()));
        }
    }
    let one = Rational::one();
    for i in 0..n - 1 {
        let s: Rational = (0..n - 1).map(|j| out.get(i, j)).sum();
        out.set(i, n - 1, &one - s);
    }
    for j in 0..n {
        let s: Rational = (0..n - 1).map(|i| out.get(i, j)).sum();
        out.set(n - 1, j, &one - s);
    }
    if !out.is_nonnegative() {
        return Err(Error::precondition("exact renormalization produced a negative border entry"));
    }
    debug_assert!(out.is_doubly_stochastic());
    Ok(out)
}

/// Convex combination of `k` random permutation matrices with random positive rational weights.
pub fn birkhoff_mixture<R: Rng>(n: usize, k: usize, rng: &mut R) -> RationalMatrix {
    let weights: Vec<i64> = (0..k.max(1)).map(|_| rng.gen_range(1..=9)).collect();
    let total: i64 = weights.iter().sum();
    let mut out = RationalMatrix::zeros(n, n);
    let mut perm: Vec<usize> = (0..n).collect();
    for w in weights {
        perm.shuffle(rng);
        for (i, &j) in perm.iter().enumerate() {
            let v = out.get(i, j) + Rational::new(w.into(), total.into());
            out.set(i, j, v);
        }
    }
    out
}
