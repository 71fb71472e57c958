//! Cube measures: generator validity, closure chains, symmetrization
//! commutation, the homogeneous embedding and coupling feasibility.

mod common;

use num_traits::{One, Zero};
use rand::Rng;

use common::*;
use stablekit::rational::rat;
use stablekit::srmeasure::{
    coupling_check, determinantal, exclusion_evolve, sr_battery, CouplingOutcome, CouplingProblem, CubeMeasure,
    RankWeights, Relation,
};
use stablekit::stability::{partial_symmetrize_poly, refute_stability};
use stablekit::{Rational, RationalMatrix};

fn assert_battery(mu: &CubeMeasure, ctx: &str) {
    let b = sr_battery(mu).unwrap();
    assert!(b.passes(), "{ctx}: {}", b.to_json(mu.d()));
}

/// `exclusion` runs at most once per chain: its 63-bit swap probabilities make later steps expensive.
fn closure_step<R: Rng>(
    rng: &mut R,
    mu: &CubeMeasure,
    max_d: usize,
    exclusion: bool,
) -> Option<(&'static str, CubeMeasure)> {
    let d = mu.d();
    match rng.gen_range(0..8) {
        0 if d < max_d => {
            let p: Vec<Rational> = (0..rng.gen_range(1..=max_d - d)).map(|_| rat(rng.gen_range(1..=9), 10)).collect();
            Some(("product", mu.product(&CubeMeasure::product_bernoulli(&p).unwrap()).unwrap()))
        }
        1 if d > 1 => {
            let keep: Vec<usize> = (0..d).filter(|_| rng.gen_bool(0.6)).collect();
            (!keep.is_empty()).then(|| ("project", mu.project(&keep).unwrap()))
        }
        2 if d > 1 => mu.condition_var(rng.gen_range(0..d), rng.gen_bool(0.5)).ok().map(|m| ("condition", m)),
        3 => {
            let f: Vec<Rational> = (0..d).map(|_| pos_rat(rng, 5, 3)).collect();
            Some(("external_field", mu.external_field(&f).unwrap()))
        }
        4 => {
            let lo = rng.gen_range(0..=d);
            let hi = rng.gen_range(lo..=d.min(lo + 1));
            let w = RankWeights::interval(d, lo, hi);
            assert!(w.preserves_sr());
            mu.rank_rescale(&w).ok().map(|m| ("rank_rescale", m))
        }
        5 if d > 1 => {
            let i = rng.gen_range(0..d);
            let j = (i + rng.gen_range(1..d)) % d;
            Some(("partial_symmetrize", mu.partial_symmetrize(i, j, &rat(rng.gen_range(0..=4), 4)).unwrap()))
        }
        6 => Some(("total_symmetrize", mu.total_symmetrize())),
        7 if d > 1 && exclusion => {
            let rates = random_rates(rng, d);
            let t = rat(rng.gen_range(1..=4), 4);
            Some(("exclusion", exclusion_evolve(mu, &rates, &t, 4).unwrap().measure))
        }
        _ => None,
    }
}

#[test]
fn closure_chains_with_exclusion_stay_strong_rayleigh() {
    let mut rng = rng(6001);
    for chain in 0..80u64 {
        let (kind, mut mu) = random_generator_measure(&mut rng, 4);
        let mut names = vec![kind];
        for _ in 0..rng.gen_range(1..=4) {
            let fresh = !names.contains(&"exclusion".to_string());
            if let Some((name, next)) = closure_step(&mut rng, &mu, 5, fresh) {
                names.push(name.to_string());
                mu = next;
            }
        }
        let v = refute_stability(&mu.genpoly(), 200, chain).unwrap();
        assert!(!v.is_refuted(), "{names:?}: {v:?}");
        assert_battery(&mu, &format!("{names:?}"));
    }
}

#[test]
fn symmetrization_commutes_with_the_generating_polynomial() {
    let mut rng = rng(6002);
    for _ in 0..100 {
        let (_, mu) = random_generator_measure(&mut rng, 5);
        let d = mu.d();
        if d < 2 {
            continue;
        }
        let i = rng.gen_range(0..d);
        let j = (i + rng.gen_range(1..d)) % d;
        let theta = rat(rng.gen_range(0..=8), 8);
        let lhs = mu.partial_symmetrize(i, j, &theta).unwrap().genpoly();
        let rhs = partial_symmetrize_poly(&mu.genpoly(), i, j, &theta).unwrap();
        assert_eq!(lhs, rhs);
    }
}

#[test]
fn homogeneous_embedding_projects_back() {
    let mut rng = rng(6003);
    for _ in 0..60 {
        let (_, mu) = random_generator_measure(&mut rng, 5);
        let d = mu.d();
        let e = mu.phsr_embed().unwrap();
        assert_eq!(e.d(), 2 * d);
        let ranks = e.rank_sequence();
        for (k, a) in ranks.as_slice().iter().enumerate() {
            assert_eq!(a.is_zero(), k != d, "rank {k} of the embedding has mass {a}");
        }
        assert!(e.genpoly().is_homogeneous());
        let keep: Vec<usize> = (0..d).collect();
        assert_eq!(e.project(&keep).unwrap(), mu);
    }
}

/// Exhaustive Strassen test: `mu(A) >= nu(A)` for every up-set `A`.
fn dominates_on_all_upsets(mu: &CubeMeasure, nu: &CubeMeasure) -> bool {
    let n = 1usize << mu.d();
    (0u64..1 << n).all(|set| {
        let is_up = (0..n).all(|x| set >> x & 1 == 0 || (0..mu.d()).all(|j| set >> (x | 1 << j) & 1 == 1));
        !is_up || mu.mass_where(|x| set >> x & 1 == 1) >= nu.mass_where(|x| set >> x & 1 == 1)
    })
}

fn random_measure<R: Rng>(rng: &mut R, d: usize) -> CubeMeasure {
    loop {
        let w: Vec<Rational> =
            (0..1 << d).map(|_| if rng.gen_bool(0.35) { Rational::zero() } else { pos_rat(rng, 6, 1) }).collect();
        if let Ok(mu) = CubeMeasure::from_weights(d, w) {
            return mu;
        }
    }
}

/// Pushes each state of `mu` to a random subset of itself.
fn push_down<R: Rng>(rng: &mut R, mu: &CubeMeasure) -> CubeMeasure {
    let mut w = vec![Rational::zero(); 1 << mu.d()];
    for x in mu.support() {
        let y = x & rng.gen_range(0..1usize << mu.d());
        w[y] += mu.prob(x);
    }
    CubeMeasure::new(mu.d(), w).unwrap()
}

#[test]
fn coupling_matches_exhaustive_upsets() {
    let mut rng = rng(6004);
    let mut seen = [0usize; 2];
    for k in 0..100 {
        let d = rng.gen_range(1..=4);
        let mu = random_measure(&mut rng, d);
        let nu = if k % 2 == 0 { push_down(&mut rng, &mu) } else { random_measure(&mut rng, d) };
        for (a, b) in [(&mu, &nu), (&nu, &mu)] {
            let out = coupling_check(&CouplingProblem { source: a, target: b, relation: Relation::Dominates }).unwrap();
            let truth = dominates_on_all_upsets(a, b);
            assert_eq!(out.is_feasible(), truth);
            seen[truth as usize] += 1;
            match out {
                CouplingOutcome::Feasible { coupling } => {
                    let mut src = vec![Rational::zero(); 1 << d];
                    let mut tgt = vec![Rational::zero(); 1 << d];
                    for (x, y, q) in coupling {
                        assert!(Relation::Dominates.allows(x, y) && q > Rational::zero());
                        src[x] += &q;
                        tgt[y] += &q;
                    }
                    assert_eq!(src, a.probs());
                    assert_eq!(tgt, b.probs());
                }
                CouplingOutcome::Infeasible { partners, source_mass, target_mass, .. } => {
                    assert!(source_mass < target_mass);
                    assert_eq!(a.mass_where(|x| partners.contains(&x)), source_mass);
                    let up = partners.iter().all(|&x| (0..d).all(|j| partners.contains(&(x | 1 << j))));
                    assert!(up, "certificate is not an up-set");
                    assert_eq!(b.mass_where(|x| partners.contains(&x)), target_mass);
                }
            }
        }
    }
    assert!(seen[0] > 10 && seen[1] > 10, "{seen:?}");
}

#[test]
fn determinantal_masses_match_principal_minors() {
    let mut rng = rng(6005);
    for _ in 0..100 {
        let d = rng.gen_range(1..=6);
        let k = random_kernel(&mut rng, d);
        let mu = determinantal(&k).unwrap();
        assert!(mu.probs().iter().all(|p| *p >= Rational::zero()));
        assert_eq!(mu.probs().iter().sum::<Rational>(), Rational::one());
        for s in 0..1usize << d {
            let idx: Vec<usize> = (0..d).filter(|j| s >> j & 1 == 1).collect();
            let minor = RationalMatrix::from_fn(idx.len(), idx.len(), |a, b| k.matrix().get(idx[a], idx[b]).clone());
            let det = if idx.is_empty() { Rational::one() } else { minor.det().unwrap() };
            assert_eq!(mu.mass_where(|x| x & s == s), det);
        }
    }
}

#[test]
fn measure_json_round_trip() {
    let mut rng = rng(6006);
    for _ in 0..20 {
        let (_, mu) = random_generator_measure(&mut rng, 5);
        let s = serde_json::to_string(&mu).unwrap();
        assert_eq!(serde_json::from_str::<CubeMeasure>(&s).unwrap(), mu);
    }
}
