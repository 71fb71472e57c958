//! Strong-Rayleigh generators: determinantal measures, spanning-tree measures
//! and conditioned Bernoullis.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::measure::{CubeMeasure, RankWeights};
use crate::error::{guard, Error, Result};
use crate::graph::{Graph, UnionFind};
use crate::matrix::RationalMatrix;
use crate::rational::Rational;

pub const DETERMINANTAL_MAX_D: usize = 14;
pub const SPANNING_MAX_EDGES: usize = 16;

/// Real symmetric kernel with spectrum in `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RationalMatrix", into = "RationalMatrix")]
pub struct KernelMatrix(RationalMatrix);

impl KernelMatrix {
    pub fn new(k: RationalMatrix) -> Result<Self> {
        if !k.is_square() || !k.is_symmetric() {
            return Err(Error::precondition("kernel must be square and symmetric"));
        }
        if !k.is_psd() {
            return Err(Error::precondition("kernel K is not positive semidefinite"));
        }
        let complement = RationalMatrix::identity(k.nrows()).sub(&k)?;
        if !complement.is_psd() {
            return Err(Error::precondition("I - K is not positive semidefinite"));
        }
        Ok(KernelMatrix(k))
    }

    pub fn matrix(&self) -> &RationalMatrix {
        &self.0
    }

    pub fn d(&self) -> usize {
        self.0.nrows()
    }
}

impl TryFrom<RationalMatrix> for KernelMatrix {
    type Error = Error;
    fn try_from(m: RationalMatrix) -> Result<Self> {
        KernelMatrix::new(m)
    }
}

impl From<KernelMatrix> for RationalMatrix {
    fn from(k: KernelMatrix) -> Self {
        k.0
    }
}

/// Measure with generating polynomial `det(I - K + K Z)`.
///
/// At `Z = diag(1_S)` the columns in `S` become unit vectors, so the value is
/// the principal minor of `I - K` on the complement of `S`; Möbius inversion
/// over subsets then yields the point masses.
pub fn determinantal(k: &KernelMatrix) -> Result<CubeMeasure> {
    let d = k.d();
    guard("kernel order", d, DETERMINANTAL_MAX_D)?;
    let m = RationalMatrix::identity(d).sub(k.matrix())?;
    let full = (1usize << d) - 1;
    let mut f: Vec<Rational> = (0..=full)
        .map(|s| {
            let idx: Vec<usize> = (0..d).filter(|j| (full ^ s) >> j & 1 == 1).collect();
            RationalMatrix::from_fn(idx.len(), idx.len(), |a, b| m.get(idx[a], idx[b]).clone())
                .det()
                .expect("square")
        })
        .collect();
    // Möbius inversion: mu(T) = sum_{S subset T} (-1)^{|T \ S|} f(S)
    for j in 0..d {
        for t in 0..=full {
            if (t >> j) & 1 == 1 {
                let lower = f[t ^ (1 << j)].clone();
                f[t] -= lower;
            }
        }
    }
    CubeMeasure::new(d, f).map_err(|e| Error::precondition(format!("determinantal masses invalid: {e}")))
}

/// Weighted spanning-tree measure on the edge set: `mu(T) ∝ prod_{e in T} w_e`.
pub fn spanning_tree_measure(g: &Graph) -> Result<CubeMeasure> {
    let m = g.edges().len();
    guard("edge count", m, SPANNING_MAX_EDGES)?;
    if !g.is_connected() {
        return Err(Error::precondition("graph is disconnected"));
    }
    let need = g.n().saturating_sub(1) as u32;
    let weights: Vec<Rational> = (0..1usize << m)
        .map(|s| {
            if s.count_ones() != need {
                return Rational::zero();
            }
            let mut uf = UnionFind::new(g.n());
            let mut w = Rational::one();
            for (e, (a, b, we)) in g.edges().iter().enumerate() {
                if (s >> e) & 1 == 1 {
                    if !uf.union(*a, *b) {
                        return Rational::zero();
                    }
                    w *= we;
                }
            }
            w
        })
        .collect();
    CubeMeasure::from_weights(m, weights)
        .map_err(|_| Error::precondition("every spanning tree has zero weight"))
}

/// Independent Bernoulli(`p_j`) conditioned on exactly `k` successes.
pub fn conditioned_bernoulli(p: &[Rational], k: usize) -> Result<CubeMeasure> {
    let mu = CubeMeasure::product_bernoulli(p)?;
    mu.rank_rescale(&RankWeights::interval(p.len(), k, k))
}
