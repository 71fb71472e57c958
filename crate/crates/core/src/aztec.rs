//! Aztec-diamond placement probabilities `a_{r,s,t}` from the generating
//! function `(Z/2) / ((1 - (c/2) Z + Z^2)(1 - Y Z))`, `c = X + 1/X + Y + 1/Y`,
//! and their arctan limit shape.
//!
//! With `U_t = c U_{t-1} - 4 U_{t-2}` and `V_t = U_t + 2Y V_{t-1}` (integer
//! Laurent polynomials), `a_{r,s,t}` is the `X^r Y^s` coefficient of `V_{t-1} / 2^t`.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{guard, Error, Result};
use crate::rational::{to_f64, Rational};

pub const AZTEC_MAX_T: usize = 400;

/// Dense square of Laurent coefficients for `|r|, |s| <= radius`.
#[derive(Clone, Debug)]
struct Grid {
    radius: i64,
    data: Vec<BigInt>,
}

impl Grid {
    fn new(radius: i64) -> Self {
        let w = (2 * radius + 1) as usize;
        Grid {
            radius,
            data: vec![BigInt::zero(); w * w],
        }
    }

    fn width(&self) -> usize {
        (2 * self.radius + 1) as usize
    }

    fn idx(&self, r: i64, s: i64) -> usize {
        ((r + self.radius) as usize) * self.width() + (s + self.radius) as usize
    }

    fn get(&self, r: i64, s: i64) -> &BigInt {
        &self.data[self.idx(r, s)]
    }
}

/// Row `t`: `a_{r,s,t} = numerator(r, s) / 2^t`, stored for `|r| + |s| <= t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AztecRow {
    pub t: usize,
    nums: Vec<BigInt>,
}

impl AztecRow {
    fn width(&self) -> usize {
        2 * self.t + 1
    }

    fn in_support(&self, r: i64, s: i64) -> bool {
        r.unsigned_abs() + s.unsigned_abs() <= self.t as u64
    }

    pub fn numerator(&self, r: i64, s: i64) -> BigInt {
        if !self.in_support(r, s) {
            return BigInt::zero();
        }
        let t = self.t as i64;
        self.nums[((r + t) as usize) * self.width() + (s + t) as usize].clone()
    }

    pub fn get(&self, r: i64, s: i64) -> Rational {
        Rational::new(self.numerator(r, s), BigInt::one() << self.t)
    }

    pub fn get_f64(&self, r: i64, s: i64) -> f64 {
        to_f64(&self.get(r, s))
    }

    /// `(r, s, numerator)` over the diamond `|r| + |s| <= t`.
    pub fn entries(&self) -> impl Iterator<Item = (i64, i64, &BigInt)> + '_ {
        let t = self.t as i64;
        (-t..=t).flat_map(move |r| {
            let w = t - r.abs();
            (-w..=w).map(move |s| (r, s, &self.nums[((r + t) as usize) * self.width() + (s + t) as usize]))
        })
    }
}

/// Streams rows `t = 1..=t_max` of the coefficient table.
pub struct AztecRows {
    t: usize,
    t_max: usize,
    radius: i64,
    u_prev: Grid,
    u: Grid,
    v: Grid,
}

/// Iterator over rows `1..=t_max`; memory is independent of how many rows are kept.
pub fn aztec_rows(t_max: usize) -> Result<AztecRows> {
    guard("Aztec time horizon", t_max, AZTEC_MAX_T)?;
    let radius = t_max as i64 + 1;
    let mut u = Grid::new(radius);
    let i = u.idx(0, 0);
    u.data[i] = BigInt::one();
    let v = u.clone();
    Ok(AztecRows {
        t: 0,
        t_max,
        radius,
        u_prev: Grid::new(radius),
        u,
        v,
    })
}

impl Iterator for AztecRows {
    type Item = AztecRow;

    fn next(&mut self) -> Option<AztecRow> {
        if self.t >= self.t_max {
            return None;
        }
        self.t += 1;
        let t = self.t as i64;
        // row t comes from V_{t-1}, held in `self.v`
        let w = 2 * self.t + 1;
        let mut nums = vec![BigInt::zero(); w * w];
        nums.par_chunks_mut(w).enumerate().for_each(|(ri, chunk)| {
            let r = ri as i64 - t;
            for (si, slot) in chunk.iter_mut().enumerate() {
                let s = si as i64 - t;
                if r.abs() + s.abs() < t {
                    *slot = self.v.get(r, s).clone();
                }
            }
        });
        // advance U and V to index t
        let (u, up, v) = (&self.u, &self.u_prev, &self.v);
        let radius = self.radius;
        let width = u.width();
        let mut next_u = Grid::new(radius);
        let mut next_v = Grid::new(radius);
        next_u
            .data
            .par_chunks_mut(width)
            .zip(next_v.data.par_chunks_mut(width))
            .enumerate()
            .for_each(|(ri, (urow, vrow))| {
                let r = ri as i64 - radius;
                if r.abs() > t {
                    return;
                }
                let span = t - r.abs();
                for s in -span..=span {
                    let si = (s + radius) as usize;
                    if (r + s + t) % 2 == 0 {
                        let mut acc = BigInt::zero();
                        for (dr, ds) in [(-1, 0), (1, 0), (0, -1), (0, 1)] {
                            let (rr, ss) = (r + dr, s + ds);
                            if rr.abs() + ss.abs() < t {
                                acc += u.get(rr, ss);
                            }
                        }
                        if r.abs() + s.abs() <= t - 2 {
                            acc -= up.get(r, s) << 2;
                        }
                        urow[si] = acc;
                    }
                    let mut vv = urow[si].clone();
                    if (r.abs() + (s - 1).abs()) < t {
                        vv += v.get(r, s - 1) << 1;
                    }
                    vrow[si] = vv;
                }
            });
        self.u_prev = std::mem::replace(&mut self.u, next_u);
        self.v = next_v;
        Some(AztecRow { t: self.t, nums })
    }
}

/// Every row up to `t_max`; prefer [`aztec_rows`] for large horizons.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AztecTable {
    pub t_max: usize,
    pub rows: Vec<AztecRow>,
}

impl AztecTable {
    pub fn get(&self, r: i64, s: i64, t: usize) -> Rational {
        if t == 0 || t > self.t_max {
            return Rational::zero();
        }
        self.rows[t - 1].get(r, s)
    }
}

pub fn aztec_coeffs(t_max: usize) -> Result<AztecTable> {
    Ok(AztecTable {
        t_max,
        rows: aztec_rows(t_max)?.collect(),
    })
}

/// `(1/pi) arctan(sqrt(t^2 - 2r^2 - 2s^2) / (t - 2s))`, on the branch with values in `(0, 1)`.
pub fn arctan_limit(r: f64, s: f64, t: f64) -> Result<f64> {
    let disc = t * t - 2.0 * r * r - 2.0 * s * s;
    if disc.is_nan() || disc <= 0.0 || t.is_nan() || t <= 0.0 {
        return Err(Error::precondition(format!(
            "({r}, {s}, {t}) lies outside the cone t^2 > 2r^2 + 2s^2"
        )));
    }
    let den = t - 2.0 * s;
    if den == 0.0 {
        return Ok(0.5);
    }
    let a = (disc.sqrt() / den).atan() / PI;
    Ok(if den < 0.0 { a + 1.0 } else { a })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompareRow {
    pub ray: usize,
    pub t: usize,
    pub r: i64,
    pub s: i64,
    #[serde(serialize_with = "crate::rational::ser_rational")]
    pub exact: Rational,
    pub value: f64,
    pub limit: f64,
    pub abs_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompareReport {
    pub rows: Vec<CompareRow>,
    /// Per ray: errors strictly decrease as `t` increases through the list.
    pub decreasing: Vec<bool>,
}

/// Lattice point on the ray `(alpha, beta, gamma)` at time `t`, with `r + s + t` odd.
///
/// `r` and `s` are rounded to the nearest integers; if the parity is wrong, `s`
/// moves one step toward its unrounded value.
pub fn ray_point(ray: &(Rational, Rational, Rational), t: usize) -> (i64, i64) {
    let scale = Rational::from_integer(t.into()) / &ray.2;
    let rr = &ray.0 * &scale;
    let ss = &ray.1 * &scale;
    let r = rr.round().to_integer().to_i64().expect("small");
    let mut s = ss.round().to_integer().to_i64().expect("small");
    if (r + s + t as i64).rem_euclid(2) == 0 {
        s += if Rational::from_integer(s.into()) <= ss { 1 } else { -1 };
    }
    (r, s)
}

/// Exact table values against the limit shape along each ray.
pub fn compare_report(rays: &[(Rational, Rational, Rational)], t_list: &[usize]) -> Result<CompareReport> {
    for (a, b, g) in rays {
        let (a, b, g) = (to_f64(a), to_f64(b), to_f64(g));
        if !(g > 0.0 && g * g > 2.0 * a * a + 2.0 * b * b) {
            return Err(Error::precondition(format!("ray ({a}, {b}, {g}) lies outside the cone")));
        }
    }
    let t_max = t_list.iter().copied().max().unwrap_or(0);
    let mut rows = Vec::new();
    if rays.is_empty() || t_list.is_empty() {
        return Ok(CompareReport {
            rows,
            decreasing: vec![true; rays.len()],
        });
    }
    let mut by_t: Vec<Option<AztecRow>> = vec![None; t_max + 1];
    for row in aztec_rows(t_max)? {
        let t = row.t;
        if t_list.contains(&t) {
            by_t[t] = Some(row);
        }
    }
    for (k, ray) in rays.iter().enumerate() {
        for &t in t_list {
            let (r, s) = ray_point(ray, t);
            let row = by_t[t].as_ref().ok_or_else(|| Error::precondition("t must be at least 1"))?;
            let exact = row.get(r, s);
            let value = to_f64(&exact);
            let limit = arctan_limit(r as f64, s as f64, t as f64)?;
            rows.push(CompareRow {
                ray: k,
                t,
                r,
                s,
                exact,
                value,
                limit,
                abs_error: (value - limit).abs(),
            });
        }
    }
    let decreasing = (0..rays.len())
        .map(|k| {
            let errs: Vec<f64> = rows.iter().filter(|row| row.ray == k).map(|row| row.abs_error).collect();
            errs.windows(2).all(|w| w[1] < w[0])
        })
        .collect();
    Ok(CompareReport { rows, decreasing })
}

impl AztecRow {
    /// Every value lies in `[0, 1]`.
    pub fn is_probability_row(&self) -> bool {
        let one = BigInt::one() << self.t;
        self.entries().all(|(_, _, n)| !n.is_negative() && n <= &one)
    }
}
