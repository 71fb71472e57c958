//! Weighted (multi)graphs on vertices `0..n`.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{check_index, Error, Result};
use crate::matrix::RationalMatrix;
use crate::rational::{RatStr, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize, Rational)>,
}

impl Graph {
    /// Loops are rejected; parallel edges are kept as separate entries.
    pub fn new(n: usize, edges: Vec<(usize, usize, Rational)>) -> Result<Self> {
        for (i, j, w) in &edges {
            check_index(*i, n)?;
            check_index(*j, n)?;
            if i == j {
                return Err(Error::precondition(format!("loop at vertex {i}")));
            }
            if w.is_negative() {
                return Err(Error::Negative(format!("edge weight {w}")));
            }
        }
        Ok(Graph { n, edges })
    }

    /// Unit-weight graph.
    pub fn unweighted(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Self::new(
            n,
            edges
                .iter()
                .map(|&(i, j)| (i, j, Rational::from_integer(1.into())))
                .collect(),
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize, Rational)] {
        &self.edges
    }

    /// Weighted Laplacian: degree on the diagonal, minus total edge weight off it.
    pub fn laplacian(&self) -> RationalMatrix {
        let mut a = RationalMatrix::zeros(self.n, self.n);
        for (i, j, w) in &self.edges {
            let (i, j) = (*i, *j);
            a.set(i, i, a.get(i, i) + w);
            a.set(j, j, a.get(j, j) + w);
            a.set(i, j, a.get(i, j) - w);
            a.set(j, i, a.get(j, i) - w);
        }
        a
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut uf = UnionFind::new(self.n);
        for (i, j, w) in &self.edges {
            if !w.is_zero() {
                uf.union(*i, *j);
            }
        }
        uf.components() == 1
    }
}

/// Disjoint-set forest with path halving.
pub(crate) struct UnionFind {
    parent: Vec<usize>,
    count: usize,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            count: n,
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// False if already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        self.count -= 1;
        true
    }

    pub(crate) fn components(&self) -> usize {
        self.count
    }
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    edges: Vec<(usize, usize, RatStr)>,
}

impl Serialize for Graph {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GraphJson {
            n: self.n,
            edges: self
                .edges
                .iter()
                .map(|(i, j, w)| (*i, *j, RatStr(w.clone())))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Graph {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = GraphJson::deserialize(d)?;
        Graph::new(j.n, j.edges.into_iter().map(|(a, b, w)| (a, b, w.0)).collect())
            .map_err(serde::de::Error::custom)
    }
}
