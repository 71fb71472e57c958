//! Univariate real-rootedness oracles: constructed factorizations, Newton and
//! Edrei consistency, matching polynomials and multiplier sequences.

mod common;

use proptest::prelude::*;
use common::*;
use stablekit::rational::{factorial, rat};
use stablekit::realroot::{
    apply_multiplier, count_real_roots, hermite, interlace_check, is_real_rooted, isolate_real_roots,
    matching_polynomial, newton_ulc_check, pf_check, CoeffSeq, Interval, MultiplierSeq,
};
use stablekit::{Rational, RationalMatrix, UniPolyQ};

fn from_roots(roots: &[Rational]) -> UniPolyQ {
    roots
        .iter()
        .fold(UniPolyQ::one(), |acc, r| &acc * &UniPolyQ::linear_root(r.clone()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn constructed_roots_are_counted(nums in prop::collection::vec((-30i64..=30, 1i64..=5), 1..=8)) {
        let roots: Vec<Rational> = nums.iter().map(|&(n, d)| rat(n, d)).collect();
        let f = from_roots(&roots);
        prop_assert!(is_real_rooted(&f).unwrap());
        let mut distinct = roots.clone();
        distinct.sort();
        distinct.dedup();
        prop_assert_eq!(count_real_roots(&f, &Interval::whole()).unwrap(), distinct.len());
        let iso = isolate_real_roots(&f).unwrap();
        prop_assert_eq!(iso.len(), distinct.len());
        for (iv, r) in iso.iter().zip(&distinct) {
            prop_assert!(iv.lo <= *r && *r <= iv.hi);
        }
    }

    #[test]
    fn a_complex_pair_is_detected(nums in prop::collection::vec((-30i64..=30, 1i64..=5), 0..=6), b in -5i64..=5, c in 1i64..=9) {
        // z^2 + b z + (b^2 + 4c)/4 has discriminant -4c < 0
        let q = UniPolyQ::new(vec![rat(b * b + 4 * c, 4), rat(b, 1), rat(1, 1)]);
        let roots: Vec<Rational> = nums.iter().map(|&(n, d)| rat(n, d)).collect();
        let f = &q * &from_roots(&roots);
        prop_assert!(!is_real_rooted(&f).unwrap());
    }

    #[test]
    fn derivative_interlaces(nums in prop::collection::vec((-30i64..=30, 1i64..=5), 2..=7)) {
        let mut roots: Vec<Rational> = nums.iter().map(|&(n, d)| rat(n, d)).collect();
        roots.sort();
        roots.dedup();
        prop_assume!(roots.len() >= 2);
        let f = from_roots(&roots);
        prop_assert!(interlace_check(&f, &f.derivative()).unwrap());
    }
}

#[test]
fn newton_holds_on_real_rooted_nonnegative() {
    let mut rng = rng(41);
    for _ in 0..500 {
        let f = random_real_rooted_nonneg(&mut rng, 10);
        assert!(is_real_rooted(&f).unwrap());
        assert!(newton_ulc_check(&CoeffSeq::from_poly(&f).unwrap()).passes(), "{f}");
    }
}

/// Every minor of order `<= k` of the Toeplitz window, with no shift pruning.
fn pf_oracle(a: &[Rational], k: usize) -> bool {
    let n = a.len() - 1;
    let width = n + k;
    let entry = |r: usize, c: usize| if r >= c && r - c <= n { a[r - c].clone() } else { rat(0, 1) };
    let subsets = |m: usize| -> Vec<Vec<usize>> {
        (0u32..1 << width).filter(|s| s.count_ones() as usize == m).map(|s| (0..width).filter(|&i| s >> i & 1 == 1).collect()).collect()
    };
    (1..=k).all(|m| {
        let subs = subsets(m);
        subs.iter().all(|rows| {
            subs.iter().all(|cols| {
                let minor = RationalMatrix::from_fn(m, m, |i, j| entry(rows[i], cols[j]));
                minor.det().unwrap() >= rat(0, 1)
            })
        })
    })
}

#[test]
fn real_rooted_sequences_are_pf4() {
    let mut rng = rng(42);
    for _ in 0..200 {
        let f = random_real_rooted_nonneg(&mut rng, 5);
        assert!(pf_check(&CoeffSeq::from_poly(&f).unwrap(), 4), "{f}");
    }
}

#[test]
fn pf4_matches_exhaustive_minors_on_unstable_sequences() {
    let mut rng = rng(43);
    let mut rejected = 0;
    for _ in 0..200 {
        let f = random_non_real_rooted_positive(&mut rng, 5);
        assert!(!is_real_rooted(&f).unwrap());
        let seq = CoeffSeq::from_poly(&f).unwrap();
        let got = pf_check(&seq, 4);
        assert_eq!(got, pf_oracle(seq.as_slice(), 4), "{f}");
        rejected += !got as usize;
    }
    assert!(rejected > 0);
}

#[test]
fn finite_pf_order_does_not_certify_real_roots() {
    // (z + 1)(4z + 5)(16z^2 + 24z + 17) / 64: complex pair, first negative minor has order 7
    let f = UniPolyQ::new(vec![rat(85, 64), rat(273, 64), rat(91, 16), rat(15, 4), rat(1, 1)]);
    assert!(!is_real_rooted(&f).unwrap());
    let seq = CoeffSeq::from_poly(&f).unwrap();
    assert!(pf_check(&seq, 6));
    assert!(!pf_check(&seq, 7));
}

#[test]
fn matching_counts_of_complete_graphs_are_ulc() {
    let mut rng = rng(43);
    for n in 2..=8 {
        let mut w = RationalMatrix::zeros(n, n);
        for i in 0..n {
            for j in i + 1..n {
                let v = pos_rat(&mut rng, 9, 4);
                w.set(i, j, v.clone());
                w.set(j, i, v);
            }
        }
        let m = matching_polynomial(&w).unwrap();
        assert!(newton_ulc_check(&CoeffSeq::new(m.counts.clone()).unwrap()).passes());
        assert!(is_real_rooted(&m.q).unwrap());
    }
}

#[test]
fn unweighted_matching_polynomial_of_k4() {
    let w = RationalMatrix::from_fn(4, 4, |i, j| rat((i != j) as i64, 1));
    let m = matching_polynomial(&w).unwrap();
    assert_eq!(m.counts, vec![rat(1, 1), rat(6, 1), rat(3, 1)]);
    assert_eq!(m.q, UniPolyQ::from_i64s(&[3, 0, -6, 0, 1]));
}

#[test]
fn exponential_multiplier_preserves_real_roots() {
    let lambda = MultiplierSeq::from_fn(9, |k| Rational::new(1.into(), factorial(k as u64)));
    let mut rng = rng(44);
    for _ in 0..200 {
        let f = random_real_rooted_nonneg(&mut rng, 8);
        let g = apply_multiplier(&lambda, &f).unwrap();
        assert!(g.degree().unwrap_or(0) == 0 || is_real_rooted(&g).unwrap(), "{f} -> {g}");
    }
}

#[test]
fn hermite_polynomials_are_real_rooted() {
    for n in 1..=12 {
        let h = hermite(n);
        assert_eq!(h.degree(), Some(n));
        assert!(is_real_rooted(&h).unwrap());
        assert_eq!(isolate_real_roots(&h).unwrap().len(), n);
    }
}
