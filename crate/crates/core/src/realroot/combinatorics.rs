//! Matching, spanning-forest and Hermite polynomials.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{guard, Error, Result};
use crate::graph::Graph;
use crate::matrix::RationalMatrix;
use crate::rational::{factorial, Rational};
use crate::uni::UniPolyQ;

pub const MATCHING_MAX_N: usize = 16;
pub const FOREST_MAX_N: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchingResult {
    /// `a_j`: total weight of matchings with `j` edges (trailing zeros trimmed).
    pub counts: Vec<Rational>,
    /// `sum_j (-1)^j a_j z^(n-2j)`.
    pub q: UniPolyQ,
}

/// Weighted matching counts of `K_n` by size, memoized over vertex subsets.
pub fn matching_polynomial(w: &RationalMatrix) -> Result<MatchingResult> {
    if !w.is_square() {
        return Err(Error::precondition("weight matrix must be square"));
    }
    let n = w.nrows();
    guard("matching vertices", n, MATCHING_MAX_N)?;
    if !w.is_symmetric() {
        return Err(Error::precondition("weight matrix must be symmetric"));
    }
    if (0..n).any(|i| !w.get(i, i).is_zero()) {
        return Err(Error::precondition("weight matrix must have zero diagonal"));
    }
    if let Some(x) = w.entries().iter().find(|x| x.is_negative()) {
        return Err(Error::Negative(format!("edge weight {x}")));
    }
    let mut memo: HashMap<u32, Vec<Rational>> = HashMap::new();
    let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let mut counts = match_rec(w, full, &mut memo);
    while counts.len() > 1 && counts.last().is_some_and(|c| c.is_zero()) {
        counts.pop();
    }
    let mut q = vec![Rational::zero(); n + 1];
    for (j, a) in counts.iter().enumerate() {
        q[n - 2 * j] = if j % 2 == 0 { a.clone() } else { -a.clone() };
    }
    Ok(MatchingResult {
        counts,
        q: UniPolyQ::new(q),
    })
}

fn match_rec(w: &RationalMatrix, s: u32, memo: &mut HashMap<u32, Vec<Rational>>) -> Vec<Rational> {
    if s == 0 {
        return vec![Rational::one()];
    }
    if let Some(v) = memo.get(&s) {
        return v.clone();
    }
    // either the lowest vertex u is unmatched, or it is matched to some v
    let u = s.trailing_zeros() as usize;
    let rest = s & !(1 << u);
    let mut out = match_rec(w, rest, memo);
    let mut bits = rest;
    while bits != 0 {
        let v = bits.trailing_zeros() as usize;
        bits &= bits - 1;
        let wt = w.get(u, v);
        if wt.is_zero() {
            continue;
        }
        let sub = match_rec(w, rest & !(1 << v), memo);
        if out.len() < sub.len() + 1 {
            out.resize(sub.len() + 1, Rational::zero());
        }
        for (j, a) in sub.iter().enumerate() {
            out[j + 1] += a * wt;
        }
    }
    memo.insert(s, out.clone());
    out
}

/// `det(L + zI)` with `L` the weighted Laplacian, by exact interpolation at `z = 0..=n`.
pub fn forest_polynomial(g: &Graph) -> Result<UniPolyQ> {
    let n = g.n();
    guard("forest vertices", n, FOREST_MAX_N)?;
    let l = g.laplacian();
    let mut xs = Vec::with_capacity(n + 1);
    let mut ys = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let z = Rational::from_integer(BigInt::from(k));
        let shifted = l.add(&RationalMatrix::identity(n).scale(&z))?;
        ys.push(if n == 0 { Rational::one() } else { shifted.det()? });
        xs.push(z);
    }
    Ok(UniPolyQ::interpolate(&xs, &ys))
}

/// Physicists' Hermite polynomial from its explicit sum.
pub fn hermite(n: usize) -> UniPolyQ {
    let mut c = vec![Rational::zero(); n + 1];
    for k in 0..=n / 2 {
        let num = factorial(n as u64) * (BigInt::one() << (n - 2 * k));
        let den = factorial(k as u64) * factorial((n - 2 * k) as u64);
        let v = Rational::new(num, den);
        c[n - 2 * k] = if k % 2 == 0 { v } else { -v };
    }
    UniPolyQ::new(c)
}
