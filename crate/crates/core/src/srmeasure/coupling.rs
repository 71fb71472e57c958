//! Exact coupling feasibility by max-flow, with cut certificates.

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;

use super::measure::{state_bits, CubeMeasure};
use crate::error::{check_dim, Result};
use crate::rational::{format_rational, Rational};

/// Allowed pairs `(x, y)` with `x` drawn from the source and `y` from the target.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `x >= y` coordinatewise.
    Dominates,
    /// `x = y`, or `x` is `y` with one extra coordinate set.
    CoversOrEqual,
}

impl Relation {
    pub fn allows(self, x: usize, y: usize) -> bool {
        match self {
            Relation::Dominates => x & y == y,
            Relation::CoversOrEqual => x & y == y && (x ^ y).count_ones() <= 1,
        }
    }
}

/// Does a coupling of `source` and `target` exist that is supported on `relation`?
#[derive(Clone, Debug)]
pub struct CouplingProblem<'a> {
    pub source: &'a CubeMeasure,
    pub target: &'a CubeMeasure,
    pub relation: Relation,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CouplingOutcome {
    /// Joint masses `(x, y, q)` with marginals `source` and `target`.
    Feasible { coupling: Vec<(usize, usize, Rational)> },
    /// A target set `blocked` heavier than every source state that may pair
    /// with it (`partners`). For domination, `partners` is the up-closure of
    /// `blocked` and is an up-set `A` with `source(A) < target(A)`.
    Infeasible {
        blocked: Vec<usize>,
        partners: Vec<usize>,
        source_mass: Rational,
        target_mass: Rational,
    },
}

impl CouplingOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, CouplingOutcome::Feasible { .. })
    }
}

struct Edge {
    to: usize,
    cap: BigInt,
}

/// Dinic max-flow on integer capacities.
struct FlowNet {
    edges: Vec<Edge>,
    adj: Vec<Vec<usize>>,
}

impl FlowNet {
    fn new(n: usize) -> Self {
        FlowNet {
            edges: Vec::new(),
            adj: vec![Vec::new(); n],
        }
    }

    fn add(&mut self, a: usize, b: usize, cap: BigInt) -> usize {
        let id = self.edges.len();
        self.edges.push(Edge { to: b, cap });
        self.edges.push(Edge { to: a, cap: BigInt::zero() });
        self.adj[a].push(id);
        self.adj[b].push(id + 1);
        id
    }

    fn levels(&self, s: usize) -> Vec<Option<usize>> {
        let mut lvl = vec![None; self.adj.len()];
        lvl[s] = Some(0);
        let mut q = VecDeque::from([s]);
        while let Some(v) = q.pop_front() {
            for &e in &self.adj[v] {
                let w = self.edges[e].to;
                if lvl[w].is_none() && self.edges[e].cap.is_positive() {
                    lvl[w] = Some(lvl[v].unwrap() + 1);
                    q.push_back(w);
                }
            }
        }
        lvl
    }

    fn augment(&mut self, v: usize, t: usize, limit: &BigInt, lvl: &[Option<usize>], it: &mut [usize]) -> BigInt {
        if v == t {
            return limit.clone();
        }
        while it[v] < self.adj[v].len() {
            let e = self.adj[v][it[v]];
            let w = self.edges[e].to;
            if self.edges[e].cap.is_positive() && lvl[w] == lvl[v].map(|l| l + 1) {
                let lim = limit.min(&self.edges[e].cap).clone();
                let got = self.augment(w, t, &lim, lvl, it);
                if got.is_positive() {
                    self.edges[e].cap -= &got;
                    self.edges[e ^ 1].cap += &got;
                    return got;
                }
            }
            it[v] += 1;
        }
        BigInt::zero()
    }

    fn max_flow(&mut self, s: usize, t: usize, bound: &BigInt) -> BigInt {
        let mut total = BigInt::zero();
        loop {
            let lvl = self.levels(s);
            if lvl[t].is_none() {
                return total;
            }
            let mut it = vec![0; self.adj.len()];
            loop {
                let f = self.augment(s, t, bound, &lvl, &mut it);
                if f.is_zero() {
                    break;
                }
                total += f;
            }
        }
    }
}

/// Max-flow outcome for laws proportional to integer weight vectors.
enum WeightCut {
    /// Flow `(x, y, f)` out of a total of `A B`.
    Feasible(Vec<(usize, usize, BigInt)>),
    Infeasible { blocked: Vec<usize>, partners: Vec<usize> },
}

/// Couples the laws proportional to `a` and `b` (nonnegative, positive totals
/// `A` and `B`). Source capacities are `a_x B` and target capacities `b_y A`, so
/// both sides carry `A B` and no division is needed.
fn couple_weights(a: &[BigInt], b: &[BigInt], relation: Relation) -> WeightCut {
    let total_a: BigInt = a.iter().sum();
    let total_b: BigInt = b.iter().sum();
    let total = &total_a * &total_b;
    let xs: Vec<usize> = (0..a.len()).filter(|&x| a[x].is_positive()).collect();
    let ys: Vec<usize> = (0..b.len()).filter(|&y| b[y].is_positive()).collect();
    let (s, t) = (0, 1);
    let mut net = FlowNet::new(2 + xs.len() + ys.len());
    for (i, &x) in xs.iter().enumerate() {
        net.add(s, 2 + i, &a[x] * &total_b);
    }
    for (k, &y) in ys.iter().enumerate() {
        net.add(2 + xs.len() + k, t, &b[y] * &total_a);
    }
    let mut middle = Vec::new();
    for (i, &x) in xs.iter().enumerate() {
        for (k, &y) in ys.iter().enumerate() {
            if relation.allows(x, y) {
                // never binding: the total flow is at most `A B`
                let id = net.add(2 + i, 2 + xs.len() + k, total.clone());
                middle.push((x, y, id));
            }
        }
    }
    if net.max_flow(s, t, &total) == total {
        return WeightCut::Feasible(
            middle
                .into_iter()
                .filter_map(|(x, y, id)| {
                    let f = &net.edges[id ^ 1].cap;
                    f.is_positive().then(|| (x, y, f.clone()))
                })
                .collect(),
        );
    }
    let reach = net.levels(s);
    let blocked: Vec<usize> = ys
        .iter()
        .enumerate()
        .filter(|(k, _)| reach[2 + xs.len() + k].is_none())
        .map(|(_, &y)| y)
        .collect();
    let partners: Vec<usize> = (0..a.len()).filter(|&x| blocked.iter().any(|&y| relation.allows(x, y))).collect();
    WeightCut::Infeasible { blocked, partners }
}

pub fn coupling_check(problem: &CouplingProblem<'_>) -> Result<CouplingOutcome> {
    let (mu, nu) = (problem.source, problem.target);
    check_dim(mu.d(), nu.d())?;
    let (a, den_a) = mu.to_integers();
    let (b, den_b) = nu.to_integers();
    Ok(match couple_weights(&a, &b, problem.relation) {
        WeightCut::Feasible(flows) => {
            let total = den_a * den_b;
            CouplingOutcome::Feasible {
                coupling: flows.into_iter().map(|(x, y, f)| (x, y, Rational::new(f, total.clone()))).collect(),
            }
        }
        WeightCut::Infeasible { blocked, partners } => {
            let source_mass = Rational::new(partners.iter().map(|&x| &a[x]).sum(), den_a);
            let target_mass = Rational::new(blocked.iter().map(|&y| &b[y]).sum(), den_b);
            debug_assert!(source_mass < target_mass);
            CouplingOutcome::Infeasible {
                blocked,
                partners,
                source_mass,
                target_mass,
            }
        }
    })
}

/// Outcome of the stochastically-increasing-levels check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LevelsOutcome {
    Pass,
    /// `(mu | N = k)` is not dominated by `(mu | N = k')`, the next non-null level.
    Fail { k: usize, next: usize, certificate: CouplingOutcome },
}

/// Checks `(mu | N = k) <= (mu | N = k')` for consecutive non-null levels.
pub fn increasing_levels_check(mu: &CubeMeasure) -> Result<LevelsOutcome> {
    let (n, _) = mu.to_integers();
    let level = |k: usize| -> Vec<BigInt> {
        n.iter()
            .enumerate()
            .map(|(x, v)| if x.count_ones() as usize == k { v.clone() } else { BigInt::zero() })
            .collect()
    };
    let levels: Vec<(usize, Vec<BigInt>)> = (0..=mu.d())
        .map(|k| (k, level(k)))
        .filter(|(_, w)| w.iter().any(Signed::is_positive))
        .collect();
    for w in levels.windows(2) {
        let (k, lo) = &w[0];
        let (next, hi) = &w[1];
        if let WeightCut::Infeasible { .. } = couple_weights(hi, lo, Relation::Dominates) {
            let (lo, hi) = (mu.level(*k).expect("non-null"), mu.level(*next).expect("non-null"));
            let certificate = coupling_check(&CouplingProblem {
                source: &hi,
                target: &lo,
                relation: Relation::Dominates,
            })?;
            return Ok(LevelsOutcome::Fail {
                k: *k,
                next: *next,
                certificate,
            });
        }
    }
    Ok(LevelsOutcome::Pass)
}

/// Outcome of the stochastic covering check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScOutcome {
    /// `skipped` lists coordinates where one conditioning is null.
    Pass { skipped: Vec<usize> },
    Fail { j: usize, certificate: CouplingOutcome },
}

/// Checks that `(mu | X_j = 0)` covers `(mu | X_j = 1)` on the remaining coordinates, for every `j`.
pub fn sc_property_check(mu: &CubeMeasure) -> Result<ScOutcome> {
    let (n, _) = mu.to_integers();
    let mut skipped = Vec::new();
    for j in 0..mu.d() {
        let slice = |v: usize| -> Vec<BigInt> {
            (0..1usize << (mu.d() - 1))
                .map(|y| {
                    let low = y & ((1 << j) - 1);
                    let high = (y >> j) << (j + 1);
                    n[low | high | (v << j)].clone()
                })
                .collect()
        };
        let (zero, one) = (slice(0), slice(1));
        if !zero.iter().any(Signed::is_positive) || !one.iter().any(Signed::is_positive) {
            skipped.push(j);
            continue;
        }
        if let WeightCut::Infeasible { .. } = couple_weights(&zero, &one, Relation::CoversOrEqual) {
            let certificate = coupling_check(&CouplingProblem {
                source: &mu.condition_var(j, false)?,
                target: &mu.condition_var(j, true)?,
                relation: Relation::CoversOrEqual,
            })?;
            return Ok(ScOutcome::Fail { j, certificate });
        }
    }
    Ok(ScOutcome::Pass { skipped })
}

pub(crate) fn outcome_json(d: usize, o: &CouplingOutcome) -> serde_json::Value {
    match o {
        CouplingOutcome::Feasible { coupling } => serde_json::json!({
            "feasible": true,
            "coupling": coupling
                .iter()
                .map(|(x, y, q)| serde_json::json!([state_bits(d, *x), state_bits(d, *y), format_rational(q)]))
                .collect::<Vec<_>>(),
        }),
        CouplingOutcome::Infeasible {
            blocked,
            partners,
            source_mass,
            target_mass,
        } => serde_json::json!({
            "feasible": false,
            "blocked": blocked.iter().map(|&y| state_bits(d, y)).collect::<Vec<_>>(),
            "partners": partners.iter().map(|&x| state_bits(d, x)).collect::<Vec<_>>(),
            "source_mass": format_rational(source_mass),
            "target_mass": format_rational(target_mass),
        }),
    }
}

impl CouplingOutcome {
    pub fn to_json(&self, d: usize) -> serde_json::Value {
        outcome_json(d, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn check(mu: &CubeMeasure, nu: &CubeMeasure, r: Relation) -> CouplingOutcome {
        coupling_check(&CouplingProblem {
            source: mu,
            target: nu,
            relation: r,
        })
        .unwrap()
    }

    #[test]
    fn coupling_examples() {
        let d11 = CubeMeasure::point_mass(2, 3).unwrap();
        let d00 = CubeMeasure::point_mass(2, 0).unwrap();
        let d10 = CubeMeasure::point_mass(2, 1).unwrap();
        assert!(check(&d11, &d00, Relation::Dominates).is_feasible());
        assert!(check(&d11, &d10, Relation::CoversOrEqual).is_feasible());
        assert!(!check(&d11, &d00, Relation::CoversOrEqual).is_feasible());
        let u = CubeMeasure::uniform_on(2, &[1, 2]).unwrap();
        match check(&u, &d11, Relation::Dominates) {
            CouplingOutcome::Infeasible {
                partners,
                source_mass,
                target_mass,
                ..
            } => {
                assert_eq!(partners, vec![3]);
                assert_eq!(source_mass, rat(0, 1));
                assert_eq!(target_mass, rat(1, 1));
            }
            _ => panic!("expected infeasible"),
        }
    }

    #[test]
    fn coupling_has_right_marginals() {
        let coins = CubeMeasure::product_bernoulli(&[rat(1, 2), rat(2, 3)]).unwrap();
        let low = CubeMeasure::product_bernoulli(&[rat(1, 3), rat(1, 2)]).unwrap();
        let CouplingOutcome::Feasible { coupling } = check(&coins, &low, Relation::Dominates) else {
            panic!("monotone product measures are ordered");
        };
        for x in 0..4 {
            let a: Rational = coupling.iter().filter(|c| c.0 == x).map(|c| &c.2).sum();
            let b: Rational = coupling.iter().filter(|c| c.1 == x).map(|c| &c.2).sum();
            assert_eq!(&a, coins.prob(x));
            assert_eq!(&b, low.prob(x));
        }
        assert!(coupling.iter().all(|(x, y, _)| x & y == *y));
    }

    #[test]
    fn levels_examples() {
        let coins = CubeMeasure::product_bernoulli(&[rat(1, 2), rat(1, 2)]).unwrap();
        assert_eq!(increasing_levels_check(&coins).unwrap(), LevelsOutcome::Pass);
        let mu = CubeMeasure::uniform_on(3, &[0b001, 0b110]).unwrap();
        match increasing_levels_check(&mu).unwrap() {
            LevelsOutcome::Fail { k, certificate, .. } => {
                assert_eq!(k, 1);
                let CouplingOutcome::Infeasible { partners, .. } = certificate else { panic!() };
                // the up-set {x : x_1 = 1}
                assert_eq!(partners, vec![1, 3, 5, 7]);
            }
            LevelsOutcome::Pass => panic!("levels are incomparable"),
        }
        let single = CubeMeasure::uniform_on(2, &[1, 2]).unwrap();
        assert_eq!(increasing_levels_check(&single).unwrap(), LevelsOutcome::Pass);
    }

    #[test]
    fn sc_examples() {
        let b = CubeMeasure::product_bernoulli(&[rat(1, 3), rat(1, 4), rat(1, 5)]).unwrap();
        assert_eq!(sc_property_check(&b).unwrap(), ScOutcome::Pass { skipped: vec![] });
        let u = CubeMeasure::uniform_on(2, &[1, 2]).unwrap();
        assert_eq!(sc_property_check(&u).unwrap(), ScOutcome::Pass { skipped: vec![] });
        // X_2 is never 1, so j = 2 is skipped; X_0 = X_1 makes j = 0 fail first
        let m = CubeMeasure::uniform_on(3, &[0b000, 0b011]).unwrap();
        assert!(matches!(sc_property_check(&m).unwrap(), ScOutcome::Fail { j: 0, .. }));
        let m = CubeMeasure::uniform_on(3, &[0b000, 0b001]).unwrap();
        assert_eq!(sc_property_check(&m).unwrap(), ScOutcome::Pass { skipped: vec![1, 2] });
        let pos = CubeMeasure::uniform_on(2, &[0, 3]).unwrap();
        assert!(matches!(sc_property_check(&pos).unwrap(), ScOutcome::Fail { j: 0, .. }));
    }
}
