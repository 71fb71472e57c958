//! Random instance generators shared by the integration tests.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use stablekit::graph::Graph;
use stablekit::rational::{int, rat};
use stablekit::srmeasure::{conditioned_bernoulli, determinantal, spanning_tree_measure, CubeMeasure, KernelMatrix};
use stablekit::{Rational, RationalMatrix, UniPolyQ};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn small_rat<R: Rng>(rng: &mut R, max_num: i64, max_den: i64) -> Rational {
    rat(rng.gen_range(-max_num..=max_num), rng.gen_range(1..=max_den))
}

pub fn pos_rat<R: Rng>(rng: &mut R, max_num: i64, max_den: i64) -> Rational {
    rat(rng.gen_range(1..=max_num), rng.gen_range(1..=max_den))
}

/// `M M^T` for an integer `n x r` matrix `M`: symmetric PSD with rank at most `r`.
pub fn random_psd<R: Rng>(rng: &mut R, n: usize, r: usize) -> RationalMatrix {
    let m = RationalMatrix::from_fn(n, r, |_, _| int(rng.gen_range(-3..=3)));
    m.mul(&m.transpose()).expect("conformable")
}

/// Symmetric kernel with `0 <= K <= I`: a PSD matrix divided by a bound on its largest eigenvalue.
pub fn random_kernel<R: Rng>(rng: &mut R, d: usize) -> KernelMatrix {
    let r = rng.gen_range(1..=d);
    let g = random_psd(rng, d, r);
    let tr = g.trace();
    let scale = if tr.is_zero() { Rational::one() } else { Rational::one() / (tr + int(rng.gen_range(0..=2))) };
    KernelMatrix::new(g.scale(&scale)).expect("0 <= K <= I")
}

pub fn random_graph<R: Rng>(rng: &mut R, n: usize, max_edges: usize) -> Graph {
    let mut pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    pairs.shuffle(rng);
    // a random spanning path keeps the graph connected
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut edges: Vec<(usize, usize, Rational)> =
        order.windows(2).map(|w| (w[0].min(w[1]), w[0].max(w[1]), pos_rat(rng, 3, 2))).collect();
    for (i, j) in pairs {
        if edges.len() >= max_edges {
            break;
        }
        if !edges.iter().any(|&(a, b, _)| (a, b) == (i, j)) {
            edges.push((i, j, pos_rat(rng, 3, 2)));
        }
    }
    Graph::new(n, edges).expect("valid graph")
}

/// A determinantal, conditioned-Bernoulli or spanning-tree measure with `d <= max_d`.
pub fn random_generator_measure<R: Rng>(rng: &mut R, max_d: usize) -> (String, CubeMeasure) {
    match rng.gen_range(0..3) {
        0 => {
            let d = rng.gen_range(1..=max_d);
            ("determinantal".into(), determinantal(&random_kernel(rng, d)).unwrap())
        }
        1 => {
            let d = rng.gen_range(1..=max_d);
            let p: Vec<Rational> = (0..d).map(|_| rat(rng.gen_range(1..=9), 10)).collect();
            let k = rng.gen_range(0..=d);
            ("conditioned-bernoulli".into(), conditioned_bernoulli(&p, k).unwrap())
        }
        _ => {
            let n = rng.gen_range(2..=4);
            let g = random_graph(rng, n, max_d.max(n - 1));
            ("spanning-tree".into(), spanning_tree_measure(&g).unwrap())
        }
    }
}

/// `c prod (z + r_i)` with nonnegative rational roots `-r_i`.
pub fn random_real_rooted_nonneg<R: Rng>(rng: &mut R, max_deg: usize) -> UniPolyQ {
    let deg = rng.gen_range(1..=max_deg);
    let mut f = UniPolyQ::constant(pos_rat(rng, 5, 3));
    for _ in 0..deg {
        let r = rat(rng.gen_range(0..=12), rng.gen_range(1..=4));
        f = &f * &UniPolyQ::new(vec![r, Rational::one()]);
    }
    f
}

/// `(z^2 + b z + c) g` with `b^2 < 4c`, `b > 0` and `g` real-rooted with positive coefficients.
pub fn random_non_real_rooted_positive<R: Rng>(rng: &mut R, max_deg: usize) -> UniPolyQ {
    let b = pos_rat(rng, 6, 2);
    let c = &b * &b / int(4) + pos_rat(rng, 4, 3);
    let q = UniPolyQ::new(vec![c, b, Rational::one()]);
    let mut g = UniPolyQ::one();
    for _ in 0..rng.gen_range(0..=max_deg - 2) {
        g = &g * &UniPolyQ::new(vec![pos_rat(rng, 12, 4), Rational::one()]);
    }
    &q * &g
}

pub fn random_zero_one<R: Rng>(rng: &mut R, n: usize, density: f64) -> RationalMatrix {
    RationalMatrix::from_fn(n, n, |_, _| if rng.gen_bool(density) { Rational::one() } else { Rational::zero() })
}

/// Columns weakly decreasing downward, entries in `[0, 10]`.
pub fn random_monotone_columns<R: Rng>(rng: &mut R, n: usize) -> RationalMatrix {
    let mut cols: Vec<Vec<Rational>> = (0..n)
        .map(|_| (0..n).map(|_| rat(rng.gen_range(0..=40), rng.gen_range(1..=4))).collect())
        .collect();
    for c in cols.iter_mut() {
        c.sort_by(|a, b| b.cmp(a));
    }
    RationalMatrix::from_fn(n, n, |i, j| cols[j][i].clone())
}

/// Symmetric zero-diagonal rate matrix with entries in `{0, 1/4, ..., 1}`.
pub fn random_rates<R: Rng>(rng: &mut R, d: usize) -> RationalMatrix {
    let mut m = RationalMatrix::zeros(d, d);
    for i in 0..d {
        for j in i + 1..d {
            let v = rat(rng.gen_range(0..=4), 4);
            m.set(i, j, v.clone());
            m.set(j, i, v);
        }
    }
    m
}

pub fn big(n: i64) -> BigInt {
    BigInt::from(n)
}
