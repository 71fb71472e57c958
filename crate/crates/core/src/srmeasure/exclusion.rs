//! Symmetric exclusion dynamics: exact Trotterized partial symmetrization and
//! a floating-point uniformization oracle.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use super::measure::{measure_from_numerators, swap_bits, CubeMeasure};
use crate::error::{check_dim, guard, Error, Result};
use crate::matrix::RationalMatrix;
use crate::rational::{dyadic_round, to_f64, Rational};

pub const DEFAULT_STEPS: usize = 64;
pub const ORACLE_MAX_D: usize = 10;
/// Swap probabilities are rounded to multiples of `2^-THETA_BITS`.
const THETA_BITS: u32 = 63;

/// Evolved measure together with the rounded swap probability of each half-step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Exclusion {
    pub measure: CubeMeasure,
    /// `(i, j, theta_ij)` applied twice per step.
    pub thetas: Vec<(usize, usize, Rational)>,
    pub steps: usize,
}

fn rate_pairs(d: usize, rates: &RationalMatrix) -> Result<Vec<(usize, usize, Rational)>> {
    if rates.nrows() != d || rates.ncols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: rates.nrows().max(rates.ncols()),
        });
    }
    if !rates.is_symmetric() {
        return Err(Error::precondition("rate matrix must be symmetric"));
    }
    if (0..d).any(|i| !rates.get(i, i).is_zero()) {
        return Err(Error::precondition("rate matrix must have zero diagonal"));
    }
    if !rates.is_nonnegative() {
        return Err(Error::Negative("rate".into()));
    }
    Ok((0..d)
        .flat_map(|i| (i + 1..d).map(move |j| (i, j)))
        .filter(|&(i, j)| rates.get(i, j).is_positive())
        .map(|(i, j)| (i, j, rates.get(i, j).clone()))
        .collect())
}

/// Runs `steps` symmetric Trotter steps of length `t / steps`. Each step sweeps
/// the pairs forward and then backward, each with half the step length, so the
/// splitting error is second order. A pair swapped at rate `lambda` for time `s`
/// has odd swap parity with probability `(1 - exp(-2 lambda s)) / 2`.
pub fn exclusion_evolve(mu: &CubeMeasure, rates: &RationalMatrix, t: &Rational, steps: usize) -> Result<Exclusion> {
    let d = mu.d();
    let pairs = rate_pairs(d, rates)?;
    if steps == 0 {
        return Err(Error::precondition("steps must be at least 1"));
    }
    if t.is_negative() {
        return Err(Error::precondition("time must be nonnegative"));
    }
    let half = to_f64(t) / (2.0 * steps as f64);
    let thetas: Vec<(usize, usize, Rational)> = pairs
        .iter()
        .map(|(i, j, l)| (*i, *j, dyadic_round(-(-2.0 * to_f64(l) * half).exp_m1() / 2.0, THETA_BITS)))
        .filter(|(_, _, th)| !th.is_zero())
        .collect();
    if thetas.is_empty() {
        return Ok(Exclusion {
            measure: mu.clone(),
            thetas,
            steps,
        });
    }
    let one = BigInt::from(1u64) << THETA_BITS;
    // theta = n / 2^63 with n <= 2^62
    let coeffs: Vec<(usize, usize, BigInt, BigInt)> = thetas
        .iter()
        .map(|(i, j, th)| {
            let n = (th * Rational::from_integer(one.clone())).to_integer();
            (*i, *j, &one - &n, n)
        })
        .collect();
    let (mut nums, den0) = mu.to_integers();
    let mut shift = 0usize;
    let mut next = vec![BigInt::zero(); nums.len()];
    let sweep: Vec<&(usize, usize, BigInt, BigInt)> = coeffs.iter().chain(coeffs.iter().rev()).collect();
    for _ in 0..steps {
        for &(i, j, keep, swap) in &sweep {
            for x in 0..nums.len() {
                let y = swap_bits(x, *i, *j);
                next[x] = if y == x {
                    &nums[x] << THETA_BITS
                } else {
                    keep * &nums[x] + swap * &nums[y]
                };
            }
            std::mem::swap(&mut nums, &mut next);
            shift += THETA_BITS as usize;
        }
        // drop common factors of two to keep numerators short
        let tz = nums.iter().filter(|n| !n.is_zero()).filter_map(|n| n.trailing_zeros()).min().unwrap_or(0);
        let tz = tz.min(shift as u64) as usize;
        if tz > 0 {
            for n in nums.iter_mut() {
                *n >>= tz;
            }
            shift -= tz;
        }
    }
    let den = den0 << shift;
    Ok(Exclusion {
        measure: measure_from_numerators(d, nums, &den),
        thetas,
        steps,
    })
}

/// `mu exp(t Q)` in floating point by uniformization, where `Q` swaps coordinates
/// `i, j` at rate `rates[i][j]`.
pub fn exclusion_oracle(mu: &CubeMeasure, rates: &RationalMatrix, t: f64) -> Result<Vec<f64>> {
    let d = mu.d();
    guard("oracle dimension", d, ORACLE_MAX_D)?;
    let pairs: Vec<(usize, usize, f64)> = rate_pairs(d, rates)?.into_iter().map(|(i, j, l)| (i, j, to_f64(&l))).collect();
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::precondition("time must be finite and nonnegative"));
    }
    let mut v: Vec<f64> = mu.probs().iter().map(to_f64).collect();
    let total: f64 = pairs.iter().map(|p| p.2).sum();
    if total == 0.0 || t == 0.0 {
        return Ok(v);
    }
    // split time so each piece has a moderate Poisson mean
    let pieces = (total * t / 8.0).ceil().max(1.0) as usize;
    let a = total * t / pieces as f64;
    let apply = |v: &[f64]| -> Vec<f64> {
        let mut out = v.to_vec();
        for &(i, j, l) in &pairs {
            let w = l / total;
            for x in 0..v.len() {
                out[x] += w * (v[swap_bits(x, i, j)] - v[x]);
            }
        }
        out
    };
    for _ in 0..pieces {
        let mut term = v.clone();
        let mut weight = (-a).exp();
        let mut acc: Vec<f64> = term.iter().map(|x| weight * x).collect();
        let mut covered = weight;
        let mut k = 0usize;
        while 1.0 - covered > 1e-17 && k < 200 {
            k += 1;
            term = apply(&term);
            weight *= a / k as f64;
            covered += weight;
            for (s, x) in acc.iter_mut().zip(&term) {
                *s += weight * x;
            }
        }
        v = acc;
    }
    Ok(v)
}

/// `(1/2) sum |mu(x) - q(x)|`.
pub fn total_variation(mu: &CubeMeasure, q: &[f64]) -> Result<f64> {
    check_dim(mu.probs().len(), q.len())?;
    Ok(mu.probs().iter().zip(q).map(|(p, x)| (p.to_f64().unwrap_or(f64::NAN) - x).abs()).sum::<f64>() / 2.0)
}
