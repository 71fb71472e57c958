//! Exact rational scalars and their string form (`"num/den"`).

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always in lowest terms with positive denominator.
pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num = BigInt::from_str(num).map_err(|_| bad())?;
    let den = BigInt::from_str(den).map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(num, den))
}

pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact value of a finite float.
pub fn from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

/// Nearest multiple of `2^-bits` to a finite float (ties away from zero).
pub fn dyadic_round(x: f64, bits: u32) -> Rational {
    let exact = from_f64(x).expect("finite float");
    let scale = BigInt::one() << bits;
    let scaled = exact * Rational::from_integer(scale.clone());
    Rational::new(scaled.round().to_integer(), scale)
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Least common multiple of the denominators.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, r| {
            // the divisibility test avoids a slow binary gcd on large dyadic denominators
            if (&acc % r.denom()).is_zero() {
                acc
            } else if (r.denom() % &acc).is_zero() {
                r.denom().clone()
            } else {
                let g = big_gcd(&acc, r.denom());
                acc / g * r.denom()
            }
        })
}

/// Nonnegative gcd. Euclidean steps shrink the larger operand while the sizes
/// differ; the binary gcd in num-bigint costs a subtraction per bit there.
pub fn big_gcd(a: &BigInt, b: &BigInt) -> BigInt {
    let (mut a, mut b) = (a.abs(), b.abs());
    if a < b {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_zero() && a.bits() > b.bits() + 32 {
        let r = &a % &b;
        a = b;
        b = r;
    }
    num_integer::Integer::gcd(&a, &b)
}

/// `n / d` in lowest terms via [`big_gcd`]; `d != 0`.
pub fn reduced(n: BigInt, d: BigInt) -> Rational {
    let g = big_gcd(&n, &d);
    let (n, d) = (n / &g, d / &g);
    if d.is_negative() {
        Rational::new_raw(-n, -d)
    } else {
        Rational::new_raw(n, d)
    }
}

/// Scales the values by their common denominator, giving integers with the same signs and ratios.
pub fn to_integers(values: &[Rational]) -> (Vec<BigInt>, BigInt) {
    let l = common_denominator(values);
    let ints = values
        .iter()
        .map(|r| r.numer() * (&l / r.denom()))
        .collect();
    (ints, l)
}

pub fn is_nonneg(r: &Rational) -> bool {
    !r.is_negative()
}

/// Serde adaptor writing a rational as `"num/den"`; integers are also accepted on input.
#[derive(Clone, PartialEq, Eq)]
pub struct RatStr(pub Rational);

impl fmt::Debug for RatStr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for RatStr {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(&self.0))
    }
}

impl<'de> Deserialize<'de> for RatStr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = RatStr;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a rational string \"num/den\" or an integer")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<RatStr, E> {
                parse_rational(v).map(RatStr).map_err(E::custom)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<RatStr, E> {
                Ok(RatStr(int(v)))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<RatStr, E> {
                Ok(RatStr(Rational::from_integer(BigInt::from(v))))
            }
        }
        d.deserialize_any(V)
    }
}

pub fn rat_strs(values: &[Rational]) -> Vec<RatStr> {
    values.iter().cloned().map(RatStr).collect()
}

/// Serde helper: a rational as its `"num/den"` string.
pub fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(r))
}

/// Serde helper: a list of rationals as strings.
pub fn ser_rationals<S: serde::Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(format_rational))
}

pub fn from_rat_strs(values: Vec<RatStr>) -> Vec<Rational> {
    values.into_iter().map(|r| r.0).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        assert_eq!(parse_rational("6/-4").unwrap(), rat(-3, 2));
        assert_eq!(format_rational(&rat(-3, 2)), "-3/2");
        assert_eq!(format_rational(&int(5)), "5");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("0.5").is_err());
    }

    #[test]
    fn dyadic_round_is_within_half_ulp() {
        let x = 1.0 / 3.0;
        let r = dyadic_round(x, 63);
        let err = (&r - from_f64(x).unwrap()).abs();
        assert!(err <= Rational::new(BigInt::one(), BigInt::one() << 64u32));
        assert!(r.denom() <= &(BigInt::one() << 63u32));
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(3, 4), BigInt::zero());
        assert_eq!(factorial(5), BigInt::from(120));
    }
}
