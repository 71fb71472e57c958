//! Capacity `inf_{x > 0} p(x) / prod x_i`, minimized in log coordinates.

use num_traits::{Signed, Zero};
use serde::Serialize;

use super::permanent::doubly_stochastic_check;
use crate::error::{Error, Result};
use crate::matrix::RationalMatrix;
use crate::poly::{PolyQ, SubstTarget};
use crate::rational::to_f64;

pub const DEFAULT_CAPACITY_TOL: f64 = 1e-9;
const MAX_ITERATIONS: usize = 100_000;

/// A posynomial evaluated in log coordinates: `y -> log p(exp y)` with gradient.
pub trait LogPosynomial {
    fn dim(&self) -> usize;
    /// `None` when `p(exp y) = 0`.
    fn log_eval(&self, y: &[f64]) -> Option<(f64, Vec<f64>)>;
}

fn log_sum_exp(vals: &[f64]) -> f64 {
    let m = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + vals.iter().map(|v| (v - m).exp()).sum::<f64>().ln()
}

/// Sum of monomials with positive coefficients.
struct TermForm {
    d: usize,
    terms: Vec<(Vec<f64>, f64)>,
}

impl LogPosynomial for TermForm {
    fn dim(&self) -> usize {
        self.d
    }

    fn log_eval(&self, y: &[f64]) -> Option<(f64, Vec<f64>)> {
        let vals: Vec<f64> = self
            .terms
            .iter()
            .map(|(e, lc)| lc + e.iter().zip(y).map(|(a, b)| a * b).sum::<f64>())
            .collect();
        let l = log_sum_exp(&vals);
        if !l.is_finite() {
            return None;
        }
        let mut g = vec![0.0; self.d];
        for ((e, _), v) in self.terms.iter().zip(&vals) {
            let w = (v - l).exp();
            for (gi, ei) in g.iter_mut().zip(e) {
                *gi += w * ei;
            }
        }
        Some((l, g))
    }
}

/// `prod_i sum_j a_ij x_j`, evaluated without expansion.
pub struct ProductForm {
    n: usize,
    rows: Vec<Vec<(usize, f64)>>,
}

impl ProductForm {
    pub fn new(a: &RationalMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::precondition("matrix must be square"));
        }
        if !a.is_nonnegative() {
            return Err(Error::Negative("matrix entry".into()));
        }
        let rows = (0..a.nrows())
            .map(|i| {
                a.row(i)
                    .iter()
                    .enumerate()
                    .filter(|(_, x)| x.is_positive())
                    .map(|(j, x)| (j, to_f64(x).ln()))
                    .collect()
            })
            .collect();
        Ok(ProductForm { n: a.nrows(), rows })
    }
}

impl LogPosynomial for ProductForm {
    fn dim(&self) -> usize {
        self.n
    }

    fn log_eval(&self, y: &[f64]) -> Option<(f64, Vec<f64>)> {
        let mut total = 0.0;
        let mut g = vec![0.0; self.n];
        for row in &self.rows {
            let vals: Vec<f64> = row.iter().map(|(j, la)| la + y[*j]).collect();
            let l = log_sum_exp(&vals);
            if !l.is_finite() {
                return None;
            }
            total += l;
            for ((j, _), v) in row.iter().zip(&vals) {
                g[*j] += (v - l).exp();
            }
        }
        Some((total, g))
    }
}

/// Best point found by descent. `upper` only bounds the capacity from above.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CapacityResult {
    pub upper: f64,
    pub argmin: Vec<f64>,
    pub gradient_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Gradient descent with Armijo backtracking on `g(y) = log p(e^y) - sum y`, from `y = 0`.
pub fn minimize_log_capacity(f: &impl LogPosynomial, tol: f64) -> Result<CapacityResult> {
    let n = f.dim();
    let eval = |y: &[f64]| -> Result<(f64, Vec<f64>)> {
        let (l, mut g) = f
            .log_eval(y)
            .ok_or_else(|| Error::precondition("polynomial vanishes on the positive orthant"))?;
        g.iter_mut().for_each(|x| *x -= 1.0);
        Ok((l - y.iter().sum::<f64>(), g))
    };
    let mut y = vec![0.0; n];
    let (mut val, mut grad) = eval(&y)?;
    let mut step = 1.0;
    let mut iterations = 0;
    let norm = |g: &[f64]| g.iter().map(|x| x * x).sum::<f64>().sqrt();
    while norm(&grad) >= tol && iterations < MAX_ITERATIONS {
        iterations += 1;
        let gg: f64 = grad.iter().map(|x| x * x).sum();
        let mut accepted = false;
        step *= 2.0;
        while step > 1e-18 {
            let cand: Vec<f64> = y.iter().zip(&grad).map(|(a, b)| a - step * b).collect();
            let (v, g) = eval(&cand)?;
            if v <= val - 1e-4 * step * gg {
                y = cand;
                val = v;
                grad = g;
                accepted = true;
                break;
            }
            step /= 2.0;
        }
        if !accepted {
            break;
        }
    }
    let gradient_norm = norm(&grad);
    Ok(CapacityResult {
        upper: val.exp(),
        argmin: y.iter().map(|v| v.exp()).collect(),
        gradient_norm,
        iterations,
        converged: gradient_norm < tol,
    })
}

fn require_cn(p: &PolyQ) -> Result<()> {
    let n = p.d();
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if !p.is_homogeneous() || p.total_degree() != Some(n as u32) || !p.has_nonneg_coeffs() {
        return Err(Error::precondition(format!(
            "polynomial must be homogeneous of degree {n} in {n} variables with nonnegative coefficients"
        )));
    }
    Ok(())
}

/// Capacity upper bound of a homogeneous degree-`n` polynomial in `n` variables
/// with nonnegative coefficients.
pub fn capacity(p: &PolyQ, tol: f64) -> Result<CapacityResult> {
    require_cn(p)?;
    let form = TermForm {
        d: p.d(),
        terms: p
            .terms()
            .map(|(e, c)| (e.iter().map(|&k| k as f64).collect(), to_f64(c).ln()))
            .collect(),
    };
    minimize_log_capacity(&form, tol)
}

/// Capacity upper bound of `prod_i sum_j a_ij x_j`.
pub fn capacity_of_matrix(a: &RationalMatrix, tol: f64) -> Result<CapacityResult> {
    minimize_log_capacity(&ProductForm::new(a)?, tol)
}

/// `((m - 1) / m)^(m - 1)`, with the value 1 at `m = 1`.
pub fn descent_factor(m: u32) -> f64 {
    if m <= 1 {
        1.0
    } else {
        let m = m as f64;
        ((m - 1.0) / m).powf(m - 1.0)
    }
}

/// `q = d/dx_n p(x_1, ..., x_{n-1}, 0)` with both capacities estimated.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DescentReport {
    pub q: PolyQ,
    /// Degree of `x_n` in `p`.
    pub degree: u32,
    pub factor: f64,
    pub cap_p_upper: f64,
    pub cap_q_upper: f64,
    pub doubly_stochastic: bool,
    /// `cap_q_upper >= factor - tol`, asserted only when `Cap(p) = 1` is known exactly.
    pub pass: Option<bool>,
}

pub fn capacity_descent_pair(p: &PolyQ, tol: f64) -> Result<DescentReport> {
    require_cn(p)?;
    let n = p.d();
    let last = n - 1;
    let degree = p.degree_in(last);
    if degree == 0 {
        return Err(Error::precondition("the last variable does not occur, so q vanishes"));
    }
    let q = p
        .differentiate(last)?
        .substitute(last, &SubstTarget::Constant(Zero::zero()))?
        .remove_var(last)?;
    let cap_p = capacity(p, tol)?.upper;
    let cap_q = if q.d() == 0 {
        to_f64(&q.coeff(&[]))
    } else {
        capacity(&q, tol)?.upper
    };
    let factor = descent_factor(degree);
    let ds = doubly_stochastic_check(p)?;
    Ok(DescentReport {
        q,
        degree,
        factor,
        cap_p_upper: cap_p,
        cap_q_upper: cap_q,
        doubly_stochastic: ds,
        pass: ds.then(|| cap_q >= factor - tol.max(1e-9)),
    })
}
