//! Van der Waerden / Gurvits, Brégman, monotone-column permanents and
//! trace-power coefficients.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::capacity::{capacity_of_matrix, DEFAULT_CAPACITY_TOL};
use super::permanent::{permanent_ryser, vdw_bound};
use crate::error::{guard, Error, Result};
use crate::matrix::RationalMatrix;
use crate::poly::PolyQ;
use crate::polymat::poly_perm;
use crate::rational::{factorial, from_f64, to_f64, Rational};
use crate::realroot::is_real_rooted;
use crate::stability::{refute_stability, Verdict};
use crate::uni::UniPolyQ;

pub const GURVITS_MAX_N: usize = 10;
pub const BREGMAN_MAX_N: usize = 12;
pub const MMCPT_MAX_N: usize = 6;
pub const MMCPT_MULTI_MAX_N: usize = 4;
pub const BMV_MAX_SIZE: usize = 5;
pub const BMV_MAX_N: usize = 10;

fn square(a: &RationalMatrix, what: &'static str, limit: usize) -> Result<usize> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            got: a.ncols(),
        });
    }
    guard(what, a.nrows(), limit)?;
    Ok(a.nrows())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GurvitsReport {
    pub n: usize,
    #[serde(serialize_with = "crate::rational::ser_rational")]
    pub per: Rational,
    /// `n! / n^n`.
    #[serde(serialize_with = "crate::rational::ser_rational")]
    pub vdw: Rational,
    pub cap_upper: f64,
    /// `cap_upper * n! / n^n`; reporting only, since `cap_upper` overestimates.
    pub bound: f64,
    pub slack: f64,
    pub doubly_stochastic: bool,
    /// Exact `Per(A) >= n!/n^n`, decided only for doubly stochastic `A` where `Cap = 1`.
    pub exact_holds: Option<bool>,
    /// Exact equality `Per(A) = n!/n^n` for doubly stochastic `A`.
    pub equality: Option<bool>,
}

pub fn gurvits_bound(a: &RationalMatrix) -> Result<GurvitsReport> {
    let n = square(a, "Gurvits order", GURVITS_MAX_N)?;
    if !a.is_nonnegative() {
        return Err(Error::Negative("matrix entry".into()));
    }
    let per = permanent_ryser(a)?;
    let vdw = vdw_bound(n);
    let cap_upper = if n == 0 { 1.0 } else { capacity_of_matrix(a, DEFAULT_CAPACITY_TOL).map(|c| c.upper).unwrap_or(0.0) };
    let bound = cap_upper * to_f64(&vdw);
    let ds = a.is_doubly_stochastic();
    Ok(GurvitsReport {
        n,
        slack: to_f64(&per) - bound,
        exact_holds: ds.then(|| per >= vdw),
        equality: ds.then(|| per == vdw),
        per,
        vdw,
        cap_upper,
        bound,
        doubly_stochastic: ds,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BregmanReport {
    #[serde(serialize_with = "crate::rational::ser_rational")]
    pub per: Rational,
    pub row_sums: Vec<u32>,
    /// A float at least `prod_j (r_j!)^(1/r_j)`; zero if some row is zero.
    pub bound_upper: f64,
    pub holds: bool,
}

/// Smallest float `u` found with `u^r >= r!`, checked exactly.
fn root_factorial_upper(r: u32) -> f64 {
    let target = Rational::from_integer(factorial(r as u64));
    let mut u = ((1..=r).map(|k| (k as f64).ln()).sum::<f64>() / r as f64).exp();
    loop {
        let exact = from_f64(u).expect("finite");
        if num_traits::pow(exact, r as usize) >= target {
            return u;
        }
        u = u.next_up();
    }
}

/// `Per(A) <= prod_j (r_j!)^(1/r_j)` for a zero-one matrix with row sums `r_j`,
/// comparing the exact permanent against an upward-rounded bound.
pub fn bregman_bound(a: &RationalMatrix) -> Result<BregmanReport> {
    let n = square(a, "Brégman order", BREGMAN_MAX_N)?;
    if !a.is_zero_one() {
        return Err(Error::precondition("Brégman's bound needs a zero-one matrix"));
    }
    let row_sums: Vec<u32> = (0..n).map(|i| a.row(i).iter().filter(|x| x.is_one()).count() as u32).collect();
    let per = permanent_ryser(a)?;
    let bound_upper = if row_sums.contains(&0) {
        0.0
    } else {
        // each rounded product is at most half an ulp low, so stepping up restores an upper bound
        row_sums.iter().fold(1.0f64, |acc, &r| (acc * root_factorial_upper(r)).next_up())
    };
    let holds = per <= from_f64(bound_upper).expect("finite");
    Ok(BregmanReport {
        per,
        row_sums,
        bound_upper,
        holds,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MmcptReport {
    /// `Per(zJ + A)`.
    pub poly: UniPolyQ,
    pub real_rooted: bool,
}

fn require_monotone(a: &RationalMatrix) -> Result<usize> {
    let n = square(a, "monotone-column permanent order", MMCPT_MAX_N)?;
    if let Some((i, j)) = a.monotone_column_violation() {
        return Err(Error::precondition(format!(
            "column {j} increases downward between rows {i} and {}",
            i + 1
        )));
    }
    Ok(n)
}

/// `Per(zJ + A)` for a matrix whose columns weakly decrease downward, with an
/// exact real-rootedness verdict.
pub fn mmcpt_poly(a: &RationalMatrix) -> Result<MmcptReport> {
    let n = require_monotone(a)?;
    let entries: Vec<Vec<PolyQ>> = (0..n)
        .map(|i| (0..n).map(|j| PolyQ::affine(a.get(i, j).clone(), &[Rational::one()])).collect())
        .collect();
    let poly = poly_perm(&entries, 1)?.diagonal();
    let real_rooted = poly.is_zero() || is_real_rooted(&poly)?;
    Ok(MmcptReport { poly, real_rooted })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MmcptCheck {
    pub univariate: MmcptReport,
    /// `Per(JZ + A)` with entry `(i, j)` equal to `z_j + a_ij`, built for `n <= 4`.
    pub multivariate: Option<PolyQ>,
    pub verdict: Option<Verdict>,
}

/// Univariate check plus the multivariate polynomial handed to the stability refuter.
pub fn mmcpt_check(a: &RationalMatrix, trials: usize, seed: u64) -> Result<MmcptCheck> {
    let univariate = mmcpt_poly(a)?;
    let n = a.nrows();
    if n > MMCPT_MULTI_MAX_N {
        return Ok(MmcptCheck {
            univariate,
            multivariate: None,
            verdict: None,
        });
    }
    let entries: Vec<Vec<PolyQ>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut w = vec![Rational::zero(); n];
                    w[j] = Rational::one();
                    PolyQ::affine(a.get(i, j).clone(), &w)
                })
                .collect()
        })
        .collect();
    let multi = poly_perm(&entries, n)?;
    let verdict = refute_stability(&multi, trials, seed)?;
    Ok(MmcptCheck {
        univariate,
        multivariate: Some(multi),
        verdict: Some(verdict),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BmvReport {
    /// Coefficients of `lambda^k` in `Tr((A + lambda B)^n)`.
    #[serde(serialize_with = "crate::rational::ser_rationals")]
    pub coeffs: Vec<Rational>,
    pub nonnegative: bool,
}

/// Expands `Tr((A + lambda B)^n)` exactly. The coefficient of `lambda^k` is the
/// sum of traces over all words with `k` letters `B` and `n - k` letters `A`;
/// words are grouped by prefix through the recurrence `C'_k = C_k A + C_{k-1} B`.
pub fn bmv_coeffs(a: &RationalMatrix, b: &RationalMatrix, n: usize) -> Result<BmvReport> {
    let m = square(a, "trace-power matrix size", BMV_MAX_SIZE)?;
    if b.nrows() != m || b.ncols() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: b.nrows(),
        });
    }
    guard("trace power", n, BMV_MAX_N)?;
    if n == 0 {
        return Err(Error::precondition("power must be at least 1"));
    }
    if !a.is_psd() || !b.is_psd() {
        return Err(Error::precondition("A and B must be positive semidefinite"));
    }
    let mut c: Vec<RationalMatrix> = vec![a.clone(), b.clone()];
    for _ in 1..n {
        let mut next = Vec::with_capacity(c.len() + 1);
        for k in 0..=c.len() {
            let mut acc = RationalMatrix::zeros(m, m);
            if k < c.len() {
                acc = acc.add(&c[k].mul(a)?)?;
            }
            if k > 0 {
                acc = acc.add(&c[k - 1].mul(b)?)?;
            }
            next.push(acc);
        }
        c = next;
    }
    let mut coeffs: Vec<Rational> = c.iter().map(|x| x.trace()).collect();
    while coeffs.len() > 1 && coeffs.last().is_some_and(|x| x.is_zero()) {
        coeffs.pop();
    }
    let nonnegative = coeffs.iter().all(|x| !x.is_negative());
    Ok(BmvReport { coeffs, nonnegative })
}
