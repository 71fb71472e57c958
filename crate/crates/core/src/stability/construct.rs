//! Stable polynomials certified by construction.

use num_traits::Signed;

use super::verdict::{Provenance, Verdict};
use crate::error::{guard, Error, Result};
use crate::matrix::RationalMatrix;
use crate::poly::PolyQ;
use crate::polymat::poly_det;
use crate::rational::Rational;

/// Largest matrix order expanded symbolically.
pub const DET_MAX_N: usize = 6;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DetConstruction {
    pub poly: PolyQ,
    pub verdict: Verdict,
    /// `Some` exactly when `B` is PSD, in which case the value must be `true`.
    pub nonnegative_coefficients: Option<bool>,
}

/// Expands `det(z_1 A_1 + ... + z_d A_d + B)` for PSD `A_i` and symmetric `B`.
pub fn det_stable_construct(a_list: &[RationalMatrix], b: &RationalMatrix) -> Result<DetConstruction> {
    let n = b.nrows();
    if !b.is_square() {
        return Err(Error::precondition("B must be square"));
    }
    guard("matrix order", n, DET_MAX_N)?;
    if !b.is_symmetric() {
        return Err(Error::precondition("B must be symmetric"));
    }
    for (i, a) in a_list.iter().enumerate() {
        if a.nrows() != n || a.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: a.nrows().max(a.ncols()),
            });
        }
        if !a.is_psd() {
            return Err(Error::precondition(format!("A_{i} is not positive semidefinite")));
        }
    }
    let d = a_list.len();
    let entries: Vec<Vec<PolyQ>> = (0..n)
        .map(|r| {
            (0..n)
                .map(|c| {
                    let w: Vec<Rational> = a_list.iter().map(|a| a.get(r, c).clone()).collect();
                    PolyQ::affine(b.get(r, c).clone(), &w)
                })
                .collect()
        })
        .collect();
    let poly = poly_det(&entries, d)?;
    let provenance = if poly.is_zero() {
        Provenance::TrivialZero
    } else {
        Provenance::Determinantal
    };
    let nonnegative_coefficients = b.is_psd().then(|| poly.has_nonneg_coeffs());
    Ok(DetConstruction {
        poly,
        verdict: Verdict::Certified { provenance },
        nonnegative_coefficients,
    })
}

/// Multiplies affine factors `c + sum w_i z_i` with real `c` and `w >= 0`.
pub fn certify_product_of_linear(d: usize, factors: &[(Rational, Vec<Rational>)]) -> Result<(PolyQ, Verdict)> {
    let mut acc = PolyQ::one(d);
    for (c, w) in factors {
        if w.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: w.len(),
            });
        }
        if let Some(x) = w.iter().find(|x| x.is_negative()) {
            return Err(Error::Negative(format!("linear coefficient {x}")));
        }
        acc = acc.mul(&PolyQ::affine(c.clone(), w))?;
    }
    let provenance = if acc.is_zero() {
        Provenance::TrivialZero
    } else {
        Provenance::ProductOfNonnegLinear
    };
    Ok((acc, Verdict::Certified { provenance }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn p(d: usize, terms: &[(&[u32], i64)]) -> PolyQ {
        PolyQ::from_terms(d, terms.iter().map(|(e, c)| (e.to_vec(), int(*c)))).unwrap()
    }

    #[test]
    fn det_examples() {
        let id1 = RationalMatrix::identity(1);
        let c = det_stable_construct(&[id1.clone(), id1], &RationalMatrix::zeros(1, 1)).unwrap();
        assert_eq!(c.poly, p(2, &[(&[1, 0], 1), (&[0, 1], 1)]));
        assert_eq!(c.nonnegative_coefficients, Some(true));

        let e0 = RationalMatrix::from_i64(&[&[1, 0], &[0, 0]]);
        let e1 = RationalMatrix::from_i64(&[&[0, 0], &[0, 1]]);
        let c = det_stable_construct(&[e0, e1], &RationalMatrix::identity(2)).unwrap();
        assert_eq!(c.poly, p(2, &[(&[0, 0], 1), (&[1, 0], 1), (&[0, 1], 1), (&[1, 1], 1)]));
        assert_eq!(c.verdict, Verdict::Certified { provenance: Provenance::Determinantal });

        let z = RationalMatrix::zeros(2, 2);
        let c = det_stable_construct(&[z.clone(), z.clone()], &z).unwrap();
        assert!(c.poly.is_zero());
        assert_eq!(c.verdict, Verdict::Certified { provenance: Provenance::TrivialZero });
    }

    #[test]
    fn det_rejects_bad_input() {
        let neg = RationalMatrix::from_i64(&[&[-1]]);
        assert!(det_stable_construct(&[neg], &RationalMatrix::zeros(1, 1)).is_err());
        let big = RationalMatrix::identity(7);
        assert!(matches!(det_stable_construct(&[], &big), Err(Error::SizeGuard { .. })));
        let asym = RationalMatrix::from_i64(&[&[0, 1], &[0, 0]]);
        assert!(det_stable_construct(&[], &asym).is_err());
    }

    #[test]
    fn product_of_linear() {
        let (poly, v) = certify_product_of_linear(2, &[(int(1), vec![int(1), int(0)]), (int(-2), vec![int(0), int(3)])]).unwrap();
        assert_eq!(poly, p(2, &[(&[0, 0], -2), (&[1, 0], -2), (&[0, 1], 3), (&[1, 1], 3)]));
        assert_eq!(v.kind(), "certified");
        assert!(certify_product_of_linear(1, &[(int(0), vec![int(-1)])]).is_err());
    }
}
