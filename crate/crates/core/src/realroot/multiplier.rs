//! Diagonal operators on coefficients and polynomial basis changes.

use num_traits::{One, Zero};
use serde::Serialize;

use super::sturm::{count_real_roots, is_real_rooted, Bound, Interval};
use crate::error::{Error, Result};
use crate::rational::{binomial, Rational};
use crate::uni::UniPolyQ;

/// Finite prefix `lambda_0, ..., lambda_N` of a candidate multiplier sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiplierSeq(Vec<Rational>);

impl MultiplierSeq {
    pub fn new(lambda: Vec<Rational>) -> Self {
        MultiplierSeq(lambda)
    }

    pub fn from_fn(len: usize, f: impl Fn(usize) -> Rational) -> Self {
        MultiplierSeq((0..len).map(f).collect())
    }

    pub fn as_slice(&self) -> &[Rational] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// `sum lambda_k a_k z^k`.
pub fn apply_multiplier(lambda: &MultiplierSeq, f: &UniPolyQ) -> Result<UniPolyQ> {
    let need = f.degree().map_or(0, |d| d + 1);
    if lambda.len() < need {
        return Err(Error::precondition(format!(
            "multiplier sequence has {} terms, need {need}",
            lambda.len()
        )));
    }
    Ok(UniPolyQ::new(
        f.coeffs().iter().zip(&lambda.0).map(|(a, l)| a * l).collect(),
    ))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PolyaSchurOutcome {
    /// Every tested degree passed; evidence only.
    NotRefuted { checked: usize },
    /// Certificate that the sequence is not a multiplier sequence.
    Refuted { n: usize, image: UniPolyQ, reason: String },
}

/// Tests `T[(1+z)^n]` for `n = 1..=N` (capped by the available prefix): each
/// image must be real-rooted with all roots of one sign. The zero image counts as stable.
pub fn polya_schur_refute(lambda: &MultiplierSeq, n_max: usize) -> PolyaSchurOutcome {
    let n_max = n_max.min(lambda.len().saturating_sub(1));
    for n in 1..=n_max {
        let binom = UniPolyQ::new(
            (0..=n)
                .map(|k| Rational::from_integer(binomial(n as u64, k as u64)))
                .collect(),
        );
        let image = apply_multiplier(lambda, &binom).expect("prefix long enough");
        if image.is_zero() {
            continue;
        }
        if !is_real_rooted(&image).expect("nonzero") {
            return PolyaSchurOutcome::Refuted {
                n,
                image,
                reason: "image is not real-rooted".into(),
            };
        }
        let pos = count_real_roots(
            &image,
            &Interval {
                lo: Bound::Open(Rational::zero()),
                hi: Bound::Unbounded,
            },
        )
        .expect("nonzero");
        let neg = count_real_roots(
            &image,
            &Interval {
                lo: Bound::Unbounded,
                hi: Bound::Open(Rational::zero()),
            },
        )
        .expect("nonzero");
        if pos > 0 && neg > 0 {
            return PolyaSchurOutcome::Refuted {
                n,
                image,
                reason: "image has roots of both signs".into(),
            };
        }
    }
    PolyaSchurOutcome::NotRefuted { checked: n_max }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisMode {
    /// `x^k -> x(x-1)...(x-k+1)`
    Falling,
    /// `x^k -> x(x+1)...(x+k-1)`
    Rising,
}

/// Replaces each power `x^k` by the falling or rising factorial of order `k`.
pub fn basis_transform(f: &UniPolyQ, mode: BasisMode) -> UniPolyQ {
    let step = match mode {
        BasisMode::Falling => -Rational::one(),
        BasisMode::Rising => Rational::one(),
    };
    let mut basis = UniPolyQ::one();
    let mut acc = UniPolyQ::zero();
    for (k, a) in f.coeffs().iter().enumerate() {
        if k > 0 {
            let shift = &step * Rational::from_integer((k as i64 - 1).into());
            basis = &basis * &UniPolyQ::new(vec![shift, Rational::one()]);
        }
        acc = &acc + &basis.scale(a);
    }
    acc
}
