//! Linear operators on multi-affine polynomials, their algebraic symbols, and
//! the operator steps used by closure arguments.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{check_dim, check_index, Error, Result};
use crate::poly::{Monomial, PolyQ};
use crate::rational::Rational;

/// Images `T(prod_{j in S} z_j)` for every subset `S`, indexed by bitmask.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorTable {
    d: usize,
    images: Vec<PolyQ>,
}

/// Largest `d` for a table (the symbol has `2d` variables and `2^d` terms).
const TABLE_MAX_D: usize = 16;

fn subset_monomial(d: usize, mask: usize) -> PolyQ {
    let e: Monomial = (0..d).map(|j| ((mask >> j) & 1) as u32).collect();
    PolyQ::monomial(e, Rational::one())
}

impl OperatorTable {
    /// `images[mask]` is the image of the monomial whose variables are the bits of `mask`.
    pub fn new(d: usize, images: Vec<PolyQ>) -> Result<Self> {
        crate::error::guard("operator table dimension", d, TABLE_MAX_D)?;
        check_dim(1 << d, images.len())?;
        for img in &images {
            check_dim(d, img.d())?;
        }
        Ok(OperatorTable { d, images })
    }

    /// Tabulates a linear operator from its action on multi-affine monomials.
    pub fn from_operator(d: usize, op: impl Fn(&PolyQ) -> Result<PolyQ>) -> Result<Self> {
        crate::error::guard("operator table dimension", d, TABLE_MAX_D)?;
        let images = (0..1usize << d).map(|m| op(&subset_monomial(d, m))).collect::<Result<_>>()?;
        Self::new(d, images)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn image(&self, mask: usize) -> &PolyQ {
        &self.images[mask]
    }

    /// Applies the operator to a multi-affine polynomial by linearity.
    pub fn apply(&self, f: &PolyQ) -> Result<PolyQ> {
        check_dim(self.d, f.d())?;
        if !f.is_multi_affine() {
            return Err(Error::NotMultiAffine);
        }
        let mut acc = PolyQ::zero(self.d);
        for (e, c) in f.terms() {
            let mask = e.iter().enumerate().fold(0usize, |m, (j, &x)| m | ((x as usize) << j));
            acc = acc.add(&self.images[mask].scale(c))?;
        }
        Ok(acc)
    }
}

impl Serialize for OperatorTable {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let images: BTreeMap<usize, &PolyQ> = self.images.iter().enumerate().collect();
        let mut st = s.serialize_struct("OperatorTable", 2)?;
        st.serialize_field("d", &self.d)?;
        st.serialize_field("images", &images)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for OperatorTable {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            d: usize,
            images: BTreeMap<String, PolyQ>,
        }
        let raw = Raw::deserialize(de)?;
        let err = serde::de::Error::custom;
        if raw.d > TABLE_MAX_D {
            return Err(err(format!("operator table dimension {} exceeds {TABLE_MAX_D}", raw.d)));
        }
        let mut images: Vec<Option<PolyQ>> = vec![None; 1 << raw.d];
        for (k, v) in raw.images {
            let m: usize = k.parse().map_err(|_| err(format!("bad subset key {k:?}")))?;
            let slot = images.get_mut(m).ok_or_else(|| err(format!("subset {m} out of range")))?;
            *slot = Some(v);
        }
        let images = images
            .into_iter()
            .enumerate()
            .map(|(m, v)| v.ok_or_else(|| err(format!("incomplete table: subset {m} missing"))))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        OperatorTable::new(raw.d, images).map_err(|e| err(e.to_string()))
    }
}

/// `G_T(z, w) = sum_S prod_{j not in S} w_j T(prod_{j in S} z_j)`, with `z` in
/// variables `0..d` and `w` in `d..2d`.
pub fn operator_symbol(t: &OperatorTable) -> Result<PolyQ> {
    let d = t.d;
    let lift: Vec<usize> = (0..d).collect();
    let mut g = PolyQ::zero(2 * d);
    for (mask, img) in t.images.iter().enumerate() {
        let w: Monomial = (0..2 * d).map(|k| (k >= d && (mask >> (k - d)) & 1 == 0) as u32).collect();
        let term = img.rename_vars(&lift, 2 * d)?.mul(&PolyQ::monomial(w, Rational::one()))?;
        g = g.add(&term)?;
    }
    Ok(g)
}

fn check_theta(theta: &Rational) -> Result<()> {
    if theta.is_negative() || theta > &Rational::one() {
        return Err(Error::precondition(format!("theta = {theta} must lie in [0, 1]")));
    }
    Ok(())
}

/// `(1 - theta) f + theta f(swap i, j)`.
pub fn partial_symmetrize_poly(f: &PolyQ, i: usize, j: usize, theta: &Rational) -> Result<PolyQ> {
    check_theta(theta)?;
    check_index(i, f.d())?;
    check_index(j, f.d())?;
    f.scale(&(Rational::one() - theta)).add(&f.swap_vars(i, j)?.scale(theta))
}

/// Operator table of partial symmetrization of coordinates `i, j` in dimension `d`.
pub fn partial_symmetrization_table(d: usize, i: usize, j: usize, theta: &Rational) -> Result<OperatorTable> {
    check_theta(theta)?;
    check_index(i, d)?;
    check_index(j, d)?;
    OperatorTable::from_operator(d, |m| partial_symmetrize_poly(m, i, j, theta))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiebSokal {
    pub poly: PolyQ,
    pub identically_zero: bool,
}

/// `P - dQ/dz_j`, which is zero or stable when `P + w Q` is stable and has
/// degree at most one in `z_j`.
pub fn lieb_sokal_step(p: &PolyQ, q: &PolyQ, j: usize) -> Result<LiebSokal> {
    check_dim(p.d(), q.d())?;
    check_index(j, p.d())?;
    if p.degree_in(j) > 1 || q.degree_in(j) > 1 {
        return Err(Error::precondition(format!("degree of z_{j} in P + wQ must be at most 1")));
    }
    let poly = p.sub(&q.differentiate(j)?)?;
    let identically_zero = poly.is_zero();
    Ok(LiebSokal { poly, identically_zero })
}

/// Writes `p = c q^2` with `c >= 0` and `q` having leading coefficient 1 in lex
/// order, or returns `None`. The zero polynomial gives `c = 0`, `q = 0`.
pub fn nonneg_multiple_of_square(p: &PolyQ) -> Option<(Rational, PolyQ)> {
    let d = p.d();
    let Some((lead_e, lead_c)) = p.terms().next_back() else {
        return Some((Rational::zero(), PolyQ::zero(d)));
    };
    if lead_c.is_negative() || lead_e.iter().any(|x| x % 2 == 1) {
        return None;
    }
    let c = lead_c.clone();
    let target = p.scale(&c.recip());
    let q_lead: Monomial = lead_e.iter().map(|x| x / 2).collect();
    let mut q = PolyQ::monomial(q_lead.clone(), Rational::one());
    let two = Rational::from_integer(BigInt::from(2));
    let mut last = q_lead.clone();
    loop {
        let r = target.sub(&q.mul(&q).ok()?).ok()?;
        let Some((re, rc)) = r.terms().next_back() else {
            return Some((c, q));
        };
        // next term of q is LT(r) / (2 LT(q)); it must divide and keep decreasing
        if re.iter().zip(&q_lead).any(|(a, b)| a < b) {
            return None;
        }
        let e: Monomial = re.iter().zip(&q_lead).map(|(a, b)| a - b).collect();
        if e >= last {
            return None;
        }
        last = e.clone();
        q = q.add(&PolyQ::monomial(e, rc / &two)).ok()?;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn p(d: usize, terms: &[(&[u32], i64)]) -> PolyQ {
        PolyQ::from_terms(d, terms.iter().map(|(e, c)| (e.to_vec(), int(*c)))).unwrap()
    }

    #[test]
    fn identity_symbol() {
        let t = OperatorTable::from_operator(1, |m| Ok(m.clone())).unwrap();
        assert_eq!(operator_symbol(&t).unwrap(), p(2, &[(&[1, 0], 1), (&[0, 1], 1)]));
    }

    #[test]
    fn evaluation_at_zero_symbol() {
        let t = OperatorTable::from_operator(2, |m| Ok(PolyQ::constant(2, m.eval(&[int(0), int(0)])?))).unwrap();
        assert_eq!(operator_symbol(&t).unwrap(), p(4, &[(&[0, 0, 1, 1], 1)]));
    }

    #[test]
    fn partial_symmetrization_symbol() {
        let theta = rat(1, 4);
        let t = partial_symmetrization_table(2, 0, 1, &theta).unwrap();
        // the displayed form pairs T(x) with the second w-variable
        let g = operator_symbol(&t).unwrap().swap_vars(2, 3).unwrap();
        let (x, y, u, v) = (PolyQ::var(4, 0), PolyQ::var(4, 1), PolyQ::var(4, 2), PolyQ::var(4, 3));
        let one = Rational::one();
        let tx = x.scale(&(&one - &theta)).add(&y.scale(&theta)).unwrap();
        let ty = y.scale(&(&one - &theta)).add(&x.scale(&theta)).unwrap();
        let want = x.mul(&y).unwrap().add(&tx.mul(&u).unwrap()).unwrap().add(&ty.mul(&v).unwrap()).unwrap().add(&u.mul(&v).unwrap()).unwrap();
        assert_eq!(g, want);
    }

    #[test]
    fn table_json_roundtrip_and_completeness() {
        let t = partial_symmetrization_table(2, 0, 1, &rat(1, 2)).unwrap();
        let s = serde_json::to_string(&t).unwrap();
        assert_eq!(serde_json::from_str::<OperatorTable>(&s).unwrap(), t);
        let mut v: serde_json::Value = serde_json::from_str(&s).unwrap();
        v["images"].as_object_mut().unwrap().remove("3");
        assert!(serde_json::from_value::<OperatorTable>(v).is_err());
    }

    #[test]
    fn partial_symmetrize_examples() {
        let x = PolyQ::var(2, 0);
        assert_eq!(partial_symmetrize_poly(&x, 0, 1, &rat(1, 2)).unwrap(), p(2, &[(&[1, 0], 1), (&[0, 1], 1)]).scale(&rat(1, 2)));
        let sym = p(2, &[(&[1, 0], 1), (&[0, 1], 1), (&[1, 1], 3)]);
        assert_eq!(partial_symmetrize_poly(&sym, 0, 1, &rat(1, 3)).unwrap(), sym);
        let f = p(2, &[(&[2, 0], 1), (&[0, 1], 5)]);
        assert_eq!(partial_symmetrize_poly(&f, 0, 1, &int(1)).unwrap(), f.swap_vars(0, 1).unwrap());
        assert!(partial_symmetrize_poly(&f, 0, 1, &int(2)).is_err());
    }

    #[test]
    fn lieb_sokal_examples() {
        let z = PolyQ::var(1, 0);
        let r = lieb_sokal_step(&z, &PolyQ::one(1), 0).unwrap();
        assert_eq!(r.poly, z);
        assert!(!r.identically_zero);
        let r = lieb_sokal_step(&PolyQ::one(1), &z, 0).unwrap();
        assert!(r.poly.is_zero() && r.identically_zero);
        let r = lieb_sokal_step(&p(1, &[(&[1], 1), (&[0], 2)]), &z, 0).unwrap();
        assert_eq!(r.poly, p(1, &[(&[1], 1), (&[0], 1)]));
        assert!(lieb_sokal_step(&z.pow(2), &z, 0).is_err());
    }

    #[test]
    fn square_detection() {
        let q = p(2, &[(&[1, 0], 1), (&[0, 1], -1), (&[0, 0], 3)]);
        let sq = q.mul(&q).unwrap().scale(&rat(5, 2));
        let (c, r) = nonneg_multiple_of_square(&sq).unwrap();
        assert_eq!(c, rat(5, 2));
        assert_eq!(r, q);
        assert!(nonneg_multiple_of_square(&sq.neg()).is_none());
        assert!(nonneg_multiple_of_square(&p(2, &[(&[2, 0], 1), (&[0, 2], 1)])).is_none());
        assert_eq!(nonneg_multiple_of_square(&PolyQ::zero(2)).unwrap().0, int(0));
    }
}
