//! Acceptance criteria 1 to 11, one test each. Every test writes a single
//! `criterion N: PASS|FAIL` line to stderr (bypassing output capture) before asserting.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::io::Write;
use std::time::{Duration, Instant};

use num_traits::Zero;
use rand::Rng;

use common::*;
use stablekit::aztec::{arctan_limit, aztec_rows, compare_report};
use stablekit::permbounds::{
    bmv_coeffs, bregman_bound, capacity_of_matrix, mmcpt_poly, permanent_ryser, sinkhorn_doubly_stochastic,
    vdw_bound, birkhoff_mixture,
};
use stablekit::rational::{int, rat};
use stablekit::realroot::{is_real_rooted, newton_ulc_check, CoeffSeq};
use stablekit::srmeasure::{
    conditioned_bernoulli, determinantal, exclusion_evolve, exclusion_oracle, spanning_tree_measure, sr_battery,
    total_variation, CubeMeasure, RankWeights,
};
use stablekit::stability::{
    nonneg_multiple_of_square, operator_symbol, partial_symmetrization_table, rayleigh_gap, refute_stability,
    Verdict,
};
use stablekit::{Rational, RationalMatrix};

fn criterion(n: u32, title: &str, limit: Duration, body: impl FnOnce() -> Result<String, String>) {
    let start = Instant::now();
    let res = body();
    let elapsed = start.elapsed();
    let (ok, detail) = match &res {
        Ok(d) if elapsed <= limit => (true, d.clone()),
        Ok(d) => (false, format!("{d}; over the time limit")),
        Err(e) => (false, e.clone()),
    };
    let line = format!(
        "criterion {n:>2}: {} {title}: {detail} [{:.2}s of {}s]\n",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        limit.as_secs()
    );
    std::io::stderr().write_all(line.as_bytes()).expect("stderr");
    assert!(ok, "{}", line.trim_end());
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

#[test]
fn criterion_01_van_der_waerden() {
    criterion(1, "van der Waerden lower bound", secs(30), || {
        let mut rng = rng(101);
        let mut cases: Vec<RationalMatrix> = (3..=6)
            .map(|n| RationalMatrix::filled(n, rat(1, n as i64)))
            .collect();
        while cases.len() < 200 {
            let n = rng.gen_range(3..=6);
            let a = if rng.gen_bool(0.5) {
                let k = rng.gen_range(1..=n + 2);
                birkhoff_mixture(n, k, &mut rng)
            } else {
                let pos = RationalMatrix::from_fn(n, n, |_, _| pos_rat(&mut rng, 9, 3));
                match sinkhorn_doubly_stochastic(&pos, 50, 1000) {
                    Ok(a) => a,
                    Err(_) => continue,
                }
            };
            cases.push(a);
        }
        let mut equalities = 0;
        for a in &cases {
            check(a.is_doubly_stochastic(), || "generator produced a non doubly stochastic matrix".into())?;
            let n = a.nrows();
            let per = permanent_ryser(a).map_err(|e| e.to_string())?;
            let vdw = vdw_bound(n);
            check(per >= vdw, || format!("Per(A) = {per} < {vdw} for {a:?}"))?;
            let is_j = *a == RationalMatrix::filled(n, rat(1, n as i64));
            check((per == vdw) == is_j, || format!("equality mismatch at {a:?}"))?;
            equalities += is_j as usize;
        }
        let j3 = permanent_ryser(&RationalMatrix::filled(3, rat(1, 3))).unwrap();
        check(j3 == rat(2, 9), || format!("Per(J/3) = {j3}"))?;
        Ok(format!("{} matrices, equality exactly at the {equalities} matrices J/n", cases.len()))
    });
}

#[test]
fn criterion_02_capacity_of_doubly_stochastic() {
    criterion(2, "capacity equals one", secs(60), || {
        let mut rng = rng(202);
        let mut worst = 0.0f64;
        for i in 0..50 {
            let n = 2 + i % 4;
            let a = if i % 2 == 0 {
                birkhoff_mixture(n, rng.gen_range(1..=n + 1), &mut rng)
            } else {
                let pos = RationalMatrix::from_fn(n, n, |_, _| pos_rat(&mut rng, 9, 3));
                sinkhorn_doubly_stochastic(&pos, 60, 1000).map_err(|e| e.to_string())?
            };
            let res = capacity_of_matrix(&a, 1e-10).map_err(|e| e.to_string())?;
            let dev = (res.upper - 1.0).abs();
            check(dev <= 1e-6, || format!("Cap = {} for {a:?}", res.upper))?;
            worst = worst.max(dev);
        }
        Ok(format!("50 matrices, max |Cap - 1| = {worst:.2e}"))
    });
}

#[test]
fn criterion_03_bregman() {
    criterion(3, "Brégman upper bound", secs(60), || {
        let mut count = 0;
        for mask in 0u32..512 {
            let a = RationalMatrix::from_fn(3, 3, |i, j| int(((mask >> (3 * i + j)) & 1) as i64));
            let r = bregman_bound(&a).map_err(|e| e.to_string())?;
            check(r.holds, || format!("violation at {a:?}: {} > {}", r.per, r.bound_upper))?;
            count += 1;
        }
        let mut rng = rng(303);
        for _ in 0..200 {
            let n = rng.gen_range(1..=7);
            let density = rng.gen_range(0.3..0.95);
            let a = random_zero_one(&mut rng, n, density);
            let r = bregman_bound(&a).map_err(|e| e.to_string())?;
            check(r.holds, || format!("violation at {a:?}: {} > {}", r.per, r.bound_upper))?;
            count += 1;
        }
        Ok(format!("{count} zero-one matrices, no violation"))
    });
}

#[test]
fn criterion_04_newton_ulc() {
    criterion(4, "Newton inequalities and ULC", secs(20), || {
        let mut rng = rng(404);
        for _ in 0..500 {
            let f = random_real_rooted_nonneg(&mut rng, 10);
            let seq = CoeffSeq::from_poly(&f).map_err(|e| e.to_string())?;
            check(newton_ulc_check(&seq).passes(), || format!("real-rooted {f} fails ULC"))?;
        }
        let (mut ulc_fail, mut flagged) = (0, 0);
        for _ in 0..500 {
            let f = random_non_real_rooted_positive(&mut rng, 10);
            let seq = CoeffSeq::from_poly(&f).map_err(|e| e.to_string())?;
            let ulc = newton_ulc_check(&seq).passes();
            let rr = is_real_rooted(&f).map_err(|e| e.to_string())?;
            check(!ulc || !rr, || format!("{f} neither fails ULC nor is flagged"))?;
            ulc_fail += !ulc as usize;
            flagged += !rr as usize;
        }
        Ok(format!("500 real-rooted pass; 500 others: {ulc_fail} fail ULC, {flagged} flagged not real-rooted"))
    });
}

fn battery_passes(mu: &CubeMeasure) -> Result<(), String> {
    let b = sr_battery(mu).map_err(|e| e.to_string())?;
    check(b.passes(), || format!("battery fails on {}: {}", serde_json::to_string(mu).unwrap(), b.to_json(mu.d())))
}

#[test]
fn criterion_05_sr_battery() {
    criterion(5, "strong Rayleigh consequence battery", secs(300), || {
        let mut rng = rng(505);
        let mut counts = [0usize; 3];
        for i in 0..60 {
            let d = 1 + i % 6;
            battery_passes(&determinantal(&random_kernel(&mut rng, d)).map_err(|e| e.to_string())?)?;
            counts[0] += 1;
            let p: Vec<Rational> = (0..d).map(|_| rat(rng.gen_range(1..=9), 10)).collect();
            battery_passes(&conditioned_bernoulli(&p, rng.gen_range(0..=d)).map_err(|e| e.to_string())?)?;
            counts[1] += 1;
            let n = rng.gen_range(2..=5);
            let g = random_graph(&mut rng, n, 6);
            battery_passes(&spanning_tree_measure(&g).map_err(|e| e.to_string())?)?;
            counts[2] += 1;
        }
        Ok(format!(
            "{} determinantal, {} conditioned-Bernoulli, {} spanning-tree measures pass",
            counts[0], counts[1], counts[2]
        ))
    });
}

/// One random closure step, keeping the dimension at most `max_d`.
fn closure_step<R: Rng>(rng: &mut R, mu: &CubeMeasure, max_d: usize) -> Option<(&'static str, CubeMeasure)> {
    let d = mu.d();
    match rng.gen_range(0..10) {
        0 if d < max_d => {
            let p: Vec<Rational> = (0..rng.gen_range(1..=max_d - d)).map(|_| rat(rng.gen_range(1..=9), 10)).collect();
            Some(("product", mu.product(&CubeMeasure::product_bernoulli(&p).unwrap()).unwrap()))
        }
        1 if d > 1 => {
            let keep: Vec<usize> = (0..d).filter(|_| rng.gen_bool(0.6)).collect();
            (!keep.is_empty()).then(|| ("project", mu.project(&keep).unwrap()))
        }
        2 if d > 1 => mu
            .condition_var(rng.gen_range(0..d), rng.gen_bool(0.5))
            .ok()
            .map(|m| ("condition", m)),
        3 => {
            let f: Vec<Rational> = (0..d).map(|_| pos_rat(rng, 5, 3)).collect();
            Some(("external_field", mu.external_field(&f).unwrap()))
        }
        4 => {
            let lo = rng.gen_range(0..=d);
            let hi = rng.gen_range(lo..=d.min(lo + 1));
            mu.rank_rescale(&RankWeights::interval(d, lo, hi)).ok().map(|m| ("rank_rescale", m))
        }
        5 if d > 1 => {
            let i = rng.gen_range(0..d);
            let j = (i + rng.gen_range(1..d)) % d;
            Some(("partial_symmetrize", mu.partial_symmetrize(i, j, &rat(rng.gen_range(0..=4), 4)).unwrap()))
        }
        6 => Some(("total_symmetrize", mu.total_symmetrize())),
        7 => {
            let mut perm: Vec<usize> = (0..d).collect();
            rand::seq::SliceRandom::shuffle(perm.as_mut_slice(), rng);
            Some(("permute", mu.permute(&perm).unwrap()))
        }
        8 => mu.level(rng.gen_range(0..=d)).map(|m| ("level", m)),
        9 if 2 * d <= max_d => Some(("phsr_embed", mu.phsr_embed().unwrap())),
        _ => None,
    }
}

#[test]
fn criterion_06_closure_fuzzing() {
    criterion(6, "closure chains keep strong Rayleigh", secs(600), || {
        let mut rng = rng(606);
        let mut ops = 0;
        for chain in 0..200 {
            let (kind, mut mu) = random_generator_measure(&mut rng, 5);
            let len = rng.gen_range(1..=5);
            let mut names = vec![kind];
            while names.len() <= len {
                if let Some((name, next)) = closure_step(&mut rng, &mu, 6) {
                    names.push(name.to_string());
                    mu = next;
                    ops += 1;
                }
            }
            let v = refute_stability(&mu.genpoly(), 200, chain).map_err(|e| e.to_string())?;
            check(matches!(v, Verdict::NotRefuted { .. }), || format!("chain {names:?} refuted: {:?}", v))?;
            battery_passes(&mu).map_err(|e| format!("chain {names:?}: {e}"))?;
        }
        Ok(format!("200 chains, {ops} operations, all not refuted and battery-clean"))
    });
}

#[test]
fn criterion_07_partial_symmetrization_symbol() {
    criterion(7, "partial-symmetrization symbol gaps are squares", secs(1), || {
        let mut witnessed = Vec::new();
        for k in 0..=4 {
            let theta = rat(k, 4);
            let table = partial_symmetrization_table(2, 0, 1, &theta).map_err(|e| e.to_string())?;
            let g = operator_symbol(&table).map_err(|e| e.to_string())?;
            for i in 0..4 {
                for j in i + 1..4 {
                    let gap = rayleigh_gap(&g, i, j).map_err(|e| e.to_string())?;
                    let found = nonneg_multiple_of_square(&gap);
                    check(found.is_some(), || format!("theta = {theta}, pair ({i}, {j}): gap {gap} is not c q^2"))?;
                    witnessed.push(found.unwrap().0);
                }
            }
        }
        check(witnessed.len() == 30, || "missing gaps".into())?;
        Ok("30 gaps (6 pairs x 5 values of theta) are nonnegative multiples of squares".into())
    });
}

#[test]
fn criterion_08_mmcpt() {
    criterion(8, "monotone column permanents are real-rooted", secs(120), || {
        let mut rng = rng(808);
        for _ in 0..100 {
            let n = rng.gen_range(1..=5);
            let a = random_monotone_columns(&mut rng, n);
            let r = mmcpt_poly(&a).map_err(|e| e.to_string())?;
            check(r.real_rooted, || format!("per(zJ + A) not real-rooted for {a:?}"))?;
        }
        Ok("100 matrices, every per(zJ + A) real-rooted by exact Sturm".into())
    });
}

#[test]
fn criterion_09_bmv() {
    criterion(9, "trace form coefficients are nonnegative", secs(120), || {
        let mut rng = rng(909);
        for _ in 0..100 {
            let size = rng.gen_range(1..=4);
            let (ra, rb) = (rng.gen_range(1..=size), rng.gen_range(1..=size));
            let a = random_psd(&mut rng, size, ra);
            let b = random_psd(&mut rng, size, rb);
            let n = rng.gen_range(1..=8);
            let r = bmv_coeffs(&a, &b, n).map_err(|e| e.to_string())?;
            check(r.nonnegative, || format!("negative coefficient for n = {n}, A = {a:?}, B = {b:?}"))?;
        }
        Ok("100 PSD pairs, all coefficients nonnegative".into())
    });
}

#[test]
fn criterion_10_aztec() {
    criterion(10, "Aztec coefficients", secs(180), || {
        let mut failures = Vec::new();
        let mut off_center = Vec::new();
        let mut rows_checked = 0;
        for row in aztec_rows(200).map_err(|e| e.to_string())? {
            let t = row.t as i64;
            if !row.is_probability_row() {
                failures.push(format!("row {t} leaves [0, 1]"));
            }
            for (r, s, num) in row.entries() {
                if !num.is_zero() && ((r + s + t).rem_euclid(2) == 0 || r.abs() + s.abs() > t) {
                    failures.push(format!("nonzero a({r}, {s}, {t})"));
                }
            }
            if t % 2 == 1 && (3..=99).contains(&t) && row.get(0, 0) != rat(1, 4) {
                off_center.push(format!("t={t}: {}", row.get(0, 0)));
            }
            rows_checked += 1;
        }
        let ray = (rat(1, 5), rat(1, 10), int(1));
        let rep = compare_report(&[ray], &[41, 81, 121]).map_err(|e| e.to_string())?;
        let errs: Vec<f64> = rep.rows.iter().map(|r| r.abs_error).collect();
        if !rep.decreasing[0] {
            failures.push(format!("ray errors not strictly decreasing: {errs:?}"));
        }
        let center_limit = arctan_limit(0.0, 0.0, 5.0).map_err(|e| e.to_string())?;
        if !off_center.is_empty() {
            failures.push(format!(
                "a(0, 0, t) differs from 1/4 (limit {center_limit}) at {} odd t, e.g. {}",
                off_center.len(),
                off_center.iter().take(3).cloned().collect::<Vec<_>>().join(", ")
            ));
        }
        let summary = format!("{rows_checked} rows scanned, ray errors {errs:.5?}");
        if failures.is_empty() {
            Ok(summary)
        } else {
            Err(format!("{summary}; {}", failures.join("; ")))
        }
    });
}

#[test]
fn criterion_11_exclusion() {
    criterion(11, "exclusion dynamics against the oracle", secs(180), || {
        let mut rng = rng(1111);
        let mut worst = 0.0f64;
        let mut cases = 0;
        for d in 2..=6 {
            for rep in 0..3 {
                let mu = if rep == 0 {
                    let p: Vec<Rational> = (0..d).map(|_| rat(rng.gen_range(1..=9), 10)).collect();
                    conditioned_bernoulli(&p, rng.gen_range(0..=d)).unwrap()
                } else {
                    determinantal(&random_kernel(&mut rng, d)).unwrap()
                };
                let rates = random_rates(&mut rng, d);
                let t = rat(rng.gen_range(1..=8), 4);
                let ev = exclusion_evolve(&mu, &rates, &t, 64).map_err(|e| e.to_string())?;
                let q = exclusion_oracle(&mu, &rates, stablekit::rational::to_f64(&t)).map_err(|e| e.to_string())?;
                let tv = total_variation(&ev.measure, &q).map_err(|e| e.to_string())?;
                check(tv < 1e-3, || format!("d = {d}, t = {t}: total variation {tv}"))?;
                battery_passes(&ev.measure)?;
                worst = worst.max(tv);
                cases += 1;
            }
        }
        Ok(format!("{cases} runs with d <= 6, t <= 2, max TV {worst:.2e}, evolved laws battery-clean"))
    });
}

