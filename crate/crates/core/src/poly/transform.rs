//! Structural transforms: derivatives, substitutions, dilations, line
//! restrictions, homogenization, localization and polarization.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{Monomial, PolyQ};
use crate::error::{check_dim, check_index, Error, Result};
use crate::rational::{binomial, reduced, to_integers, Rational};
use crate::uni::UniPolyQ;

/// Right-hand side of a substitution `z_j := target`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SubstTarget {
    Constant(Rational),
    Variable(usize),
}

/// A polarized polynomial together with its clone-to-original variable map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polarized {
    pub poly: PolyQ,
    /// `clone_of[c]` is the original variable cloned by variable `c`.
    pub clone_of: Vec<usize>,
    /// Number of clones per original variable.
    pub counts: Vec<u32>,
}

impl Polarized {
    /// Sets every clone back to its original variable.
    pub fn diagonalize(&self) -> PolyQ {
        self.poly
            .rename_vars(&self.clone_of, self.counts.len())
            .expect("clone map is consistent")
    }
}

impl PolyQ {
    /// Formal partial derivative in `z_j` (0-based).
    pub fn differentiate(&self, j: usize) -> Result<PolyQ> {
        check_index(j, self.d)?;
        let mut out = PolyQ::zero(self.d);
        for (e, c) in &self.terms {
            if e[j] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[j] -= 1;
            out.add_term(e2, c * Rational::from_integer(BigInt::from(e[j])));
        }
        Ok(out)
    }

    /// `z_j := target`; the variable count is unchanged and `z_j` no longer occurs.
    pub fn substitute(&self, j: usize, target: &SubstTarget) -> Result<PolyQ> {
        check_index(j, self.d)?;
        let mut out = PolyQ::zero(self.d);
        match target {
            SubstTarget::Constant(a) => {
                let mut pw = vec![Rational::one()];
                for k in 0..self.degree_in(j) as usize {
                    let next = &pw[k] * a;
                    pw.push(next);
                }
                for (e, c) in &self.terms {
                    let mut e2 = e.clone();
                    e2[j] = 0;
                    out.add_term(e2, c * &pw[e[j] as usize]);
                }
            }
            SubstTarget::Variable(i) => {
                check_index(*i, self.d)?;
                if *i == j {
                    return Ok(self.clone());
                }
                for (e, c) in &self.terms {
                    let mut e2 = e.clone();
                    e2[*i] += e2[j];
                    e2[j] = 0;
                    out.add_term(e2, c.clone());
                }
            }
        }
        Ok(out)
    }

    /// `p(b_1 z_1, ..., b_d z_d)` with every `b_j >= 0`.
    pub fn dilate(&self, b: &[Rational]) -> Result<PolyQ> {
        check_dim(self.d, b.len())?;
        if let Some(x) = b.iter().find(|x| x.is_negative()) {
            return Err(Error::Negative(format!("dilation factor {x}")));
        }
        let mut out = PolyQ::zero(self.d);
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (j, &k) in e.iter().enumerate() {
                for _ in 0..k {
                    t *= &b[j];
                }
            }
            out.add_term(e.clone(), t);
        }
        Ok(out)
    }

    /// The univariate polynomial `t -> p(v + t u)`, over integers with one reduction per coefficient.
    pub fn restrict_line(&self, v: &[Rational], u: &[Rational]) -> Result<UniPolyQ> {
        check_dim(self.d, v.len())?;
        check_dim(self.d, u.len())?;
        let Some(deg) = self.total_degree() else {
            return Ok(UniPolyQ::zero());
        };
        let coeffs: Vec<Rational> = self.terms.values().cloned().collect();
        let (cs, l) = to_integers(&coeffs);
        let (vu, b) = to_integers(&[v, u].concat());
        let mut powers: Vec<Vec<Vec<BigInt>>> = Vec::with_capacity(self.d);
        for j in 0..self.d {
            let lin = [vu[j].clone(), vu[self.d + j].clone()];
            let mut row = vec![vec![BigInt::one()]];
            for k in 0..self.degree_in(j) as usize {
                let next = int_poly_mul(&row[k], &lin);
                row.push(next);
            }
            powers.push(row);
        }
        let bpow: Vec<BigInt> = std::iter::successors(Some(BigInt::one()), |p| Some(p * &b))
            .take(deg as usize + 1)
            .collect();
        let mut acc = vec![BigInt::zero(); deg as usize + 1];
        for ((e, _), c) in self.terms.iter().zip(cs) {
            let mut t = vec![c * &bpow[(deg - e.iter().sum::<u32>()) as usize]];
            for (j, &k) in e.iter().enumerate() {
                if k > 0 {
                    t = int_poly_mul(&t, &powers[j][k as usize]);
                }
            }
            for (a, x) in acc.iter_mut().zip(t) {
                *a += x;
            }
        }
        let den = l * &bpow[deg as usize];
        Ok(UniPolyQ::new(acc.into_iter().map(|n| reduced(n, den.clone())).collect()))
    }

    /// `z_{d+1}^m p(z / z_{d+1})` with `m` the total degree.
    pub fn homogenize(&self) -> Result<PolyQ> {
        let m = self.total_degree().ok_or(Error::ZeroPolynomial)?;
        self.homogenize_to(m)
    }

    /// Homogenization at a prescribed degree `m >= deg p`.
    pub fn homogenize_to(&self, m: u32) -> Result<PolyQ> {
        let deg = self.total_degree().ok_or(Error::ZeroPolynomial)?;
        if m < deg {
            return Err(Error::precondition(format!(
                "homogenization degree {m} is below the total degree {deg}"
            )));
        }
        let mut out = PolyQ::zero(self.d + 1);
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            e2.push(m - e.iter().sum::<u32>());
            out.add_term(e2, c.clone());
        }
        Ok(out)
    }

    /// Top-degree part and lowest-degree part (the localization at the origin).
    pub fn hom_parts(&self) -> Result<(PolyQ, PolyQ)> {
        let hi = self.total_degree().ok_or(Error::ZeroPolynomial)?;
        let lo = self.min_degree().expect("nonzero");
        Ok((self.degree_part(hi), self.degree_part(lo)))
    }

    /// Sum of the terms of total degree exactly `k`.
    pub fn degree_part(&self, k: u32) -> PolyQ {
        let mut out = PolyQ::zero(self.d);
        for (e, c) in &self.terms {
            if e.iter().sum::<u32>() == k {
                out.add_term(e.clone(), c.clone());
            }
        }
        out
    }

    /// `p(z + x)`.
    pub fn translate(&self, x: &[Rational]) -> Result<PolyQ> {
        check_dim(self.d, x.len())?;
        let mut out = PolyQ::zero(self.d);
        for (e, c) in &self.terms {
            // expand prod_j (z_j + x_j)^{e_j} one coordinate at a time
            let mut partial: Vec<(Monomial, Rational)> = vec![(vec![0; self.d], c.clone())];
            for (j, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let mut next = Vec::with_capacity(partial.len() * (k as usize + 1));
                for (m, a) in &partial {
                    let mut xp = Rational::one();
                    for i in (0..=k).rev() {
                        // term z_j^i x_j^{k-i}
                        if i < k {
                            xp *= &x[j];
                        }
                        let coef = a * &xp * Rational::from_integer(binomial(k as u64, i as u64));
                        if coef.is_zero() {
                            continue;
                        }
                        let mut m2 = m.clone();
                        m2[j] = i;
                        next.push((m2, coef));
                    }
                }
                partial = next;
            }
            for (m, a) in partial {
                out.add_term(m, a);
            }
        }
        Ok(out)
    }

    /// Lowest-degree homogeneous part of `p(x + z)` (Taylor-shift localization).
    pub fn localize(&self, x: &[Rational]) -> Result<PolyQ> {
        let shifted = self.translate(x)?;
        Ok(shifted.hom_parts()?.1)
    }

    /// Polarization with `max(deg_j p, 1)` clones of each variable.
    pub fn polarize(&self) -> Result<Polarized> {
        let counts: Vec<u32> = (0..self.d).map(|j| self.degree_in(j).max(1)).collect();
        self.polarize_with(&counts)
    }

    /// Polarization with a prescribed number of clones per variable
    /// (`counts[j] >= deg_j p`). `z_j^r` becomes `e_r(clones of j) / C(n_j, r)`.
    pub fn polarize_with(&self, counts: &[u32]) -> Result<Polarized> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        check_dim(self.d, counts.len())?;
        for (j, &c) in counts.iter().enumerate() {
            if c < self.degree_in(j) {
                return Err(Error::precondition(format!(
                    "variable {j} needs at least {} clones, got {c}",
                    self.degree_in(j)
                )));
            }
        }
        let offsets: Vec<usize> = counts
            .iter()
            .scan(0usize, |acc, &n| {
                let o = *acc;
                *acc += n as usize;
                Some(o)
            })
            .collect();
        let total: usize = counts.iter().map(|&n| n as usize).sum();
        let clone_of: Vec<usize> = counts
            .iter()
            .enumerate()
            .flat_map(|(j, &n)| std::iter::repeat_n(j, n as usize))
            .collect();
        // subsets of each block by size, cached per (n, r)
        let mut subset_cache: HashMap<(u32, u32), Vec<Vec<usize>>> = HashMap::new();
        let mut out = PolyQ::zero(total);
        for (e, c) in &self.terms {
            let mut partial: Vec<(Monomial, Rational)> = vec![(vec![0; total], c.clone())];
            for (j, &r) in e.iter().enumerate() {
                if r == 0 {
                    continue;
                }
                let n = counts[j];
                let subsets = subset_cache
                    .entry((n, r))
                    .or_insert_with(|| k_subsets(n as usize, r as usize));
                let w = Rational::new(BigInt::one(), binomial(n as u64, r as u64));
                let mut next = Vec::with_capacity(partial.len() * subsets.len());
                for (m, a) in &partial {
                    let a = a * &w;
                    for s in subsets.iter() {
                        let mut m2 = m.clone();
                        for &i in s {
                            m2[offsets[j] + i] = 1;
                        }
                        next.push((m2, a.clone()));
                    }
                }
                partial = next;
            }
            for (m, a) in partial {
                out.add_term(m, a);
            }
        }
        Ok(Polarized {
            poly: out,
            clone_of,
            counts: counts.to_vec(),
        })
    }

    /// Sum of the square-free terms.
    pub fn multi_affine_part(&self) -> PolyQ {
        let mut out = PolyQ::zero(self.d);
        for (e, c) in &self.terms {
            if e.iter().all(|&k| k <= 1) {
                out.add_term(e.clone(), c.clone());
            }
        }
        out
    }

    /// Exchanges `z_i` and `z_j`.
    pub fn swap_vars(&self, i: usize, j: usize) -> Result<PolyQ> {
        check_index(i, self.d)?;
        check_index(j, self.d)?;
        let mut out = PolyQ::zero(self.d);
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            e2.swap(i, j);
            out.add_term(e2, c.clone());
        }
        Ok(out)
    }

    /// Sends variable `k` to variable `map[k]` of a `new_d`-variable ring
    /// (exponents add when several variables share a target).
    pub fn rename_vars(&self, map: &[usize], new_d: usize) -> Result<PolyQ> {
        check_dim(self.d, map.len())?;
        for &t in map {
            check_index(t, new_d)?;
        }
        let mut out = PolyQ::zero(new_d);
        for (e, c) in &self.terms {
            let mut e2 = vec![0; new_d];
            for (k, &x) in e.iter().enumerate() {
                e2[map[k]] += x;
            }
            out.add_term(e2, c.clone());
        }
        Ok(out)
    }

    /// Appends unused variables up to `new_d`.
    pub fn embed(&self, new_d: usize) -> Result<PolyQ> {
        if new_d < self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                got: new_d,
            });
        }
        let map: Vec<usize> = (0..self.d).collect();
        self.rename_vars(&map, new_d)
    }

    /// Drops variable `j`, which must not occur.
    pub fn remove_var(&self, j: usize) -> Result<PolyQ> {
        check_index(j, self.d)?;
        if self.degree_in(j) > 0 {
            return Err(Error::precondition(format!("variable {j} still occurs")));
        }
        let mut out = PolyQ::zero(self.d - 1);
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            e2.remove(j);
            out.add_term(e2, c.clone());
        }
        Ok(out)
    }

    /// All variables set equal to a single one.
    pub fn diagonal(&self) -> UniPolyQ {
        let mut c = vec![Rational::zero(); self.total_degree().unwrap_or(0) as usize + 1];
        for (e, a) in &self.terms {
            c[e.iter().sum::<u32>() as usize] += a;
        }
        UniPolyQ::new(c)
    }
}

/// All `r`-subsets of `0..n` in lexicographic order.
pub(crate) fn k_subsets(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(r);
    fn rec(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < r - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, r, cur, out);
            cur.pop();
        }
    }
    rec(0, n, r, &mut cur, &mut out);
    out
}

fn int_poly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}
