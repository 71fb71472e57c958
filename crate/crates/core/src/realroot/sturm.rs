//! Sturm chains over the integers and exact root counting/isolation.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::uni::{primitive_prem, UniPolyQ};

/// Signed remainder sequence `f, f', -rem(f, f'), ...`, each element scaled
/// by a positive constant to coprime integer coefficients.
#[derive(Clone, Debug)]
pub struct SturmChain {
    polys: Vec<UniPolyQ>,
    ints: Vec<Vec<BigInt>>,
}

impl SturmChain {
    pub fn new(f: &UniPolyQ) -> Result<Self> {
        if f.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let mut ints = vec![f.integer_coeffs().0];
        let d = f.derivative();
        if !d.is_zero() {
            ints.push(d.integer_coeffs().0);
            loop {
                let n = ints.len();
                let r = primitive_prem(&ints[n - 2], &ints[n - 1]);
                if r.is_empty() {
                    break;
                }
                ints.push(r.into_iter().map(|c| -c).collect());
            }
        }
        let polys = ints
            .iter()
            .map(|c| UniPolyQ::new(c.iter().cloned().map(Rational::from_integer).collect()))
            .collect();
        Ok(SturmChain { polys, ints })
    }

    pub fn polys(&self) -> &[UniPolyQ] {
        &self.polys
    }

    fn sign_at(c: &[BigInt], x: &Rational) -> i8 {
        // sign of b^n p(a/b) with b > 0
        let (a, b) = (x.numer(), x.denom());
        let n = c.len() - 1;
        let mut bpow = BigInt::one();
        let mut acc = c[n].clone();
        for k in (0..n).rev() {
            bpow *= b;
            acc = acc * a + &c[k] * &bpow;
        }
        sign(&acc)
    }

    fn count_variations(signs: impl Iterator<Item = i8>) -> usize {
        let mut last = 0i8;
        let mut v = 0;
        for s in signs.filter(|&s| s != 0) {
            if last != 0 && s != last {
                v += 1;
            }
            last = s;
        }
        v
    }

    pub fn variations_at(&self, x: &Rational) -> usize {
        Self::count_variations(self.ints.iter().map(|c| Self::sign_at(c, x)))
    }

    pub fn variations_at_pos_inf(&self) -> usize {
        Self::count_variations(self.ints.iter().map(|c| sign(c.last().expect("nonzero"))))
    }

    pub fn variations_at_neg_inf(&self) -> usize {
        Self::count_variations(self.ints.iter().map(|c| {
            let s = sign(c.last().expect("nonzero"));
            if (c.len() - 1) % 2 == 1 {
                -s
            } else {
                s
            }
        }))
    }

    /// Distinct roots in `(a, b]` when the first element is square-free.
    pub fn count_half_open(&self, a: &Rational, b: &Rational) -> usize {
        if a >= b {
            return 0;
        }
        self.variations_at(a) - self.variations_at(b)
    }

    fn is_root(&self, x: &Rational) -> bool {
        Self::sign_at(&self.ints[0], x) == 0
    }
}

fn sign(x: &BigInt) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

/// One end of an interval.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Bound {
    Unbounded,
    Open(Rational),
    Closed(Rational),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: Bound,
    pub hi: Bound,
}

impl Interval {
    pub fn whole() -> Self {
        Interval {
            lo: Bound::Unbounded,
            hi: Bound::Unbounded,
        }
    }

    pub fn open(a: Rational, b: Rational) -> Self {
        Interval {
            lo: Bound::Open(a),
            hi: Bound::Open(b),
        }
    }

    pub fn closed(a: Rational, b: Rational) -> Self {
        Interval {
            lo: Bound::Closed(a),
            hi: Bound::Closed(b),
        }
    }
}

/// Number of distinct real roots of `f` in the interval.
pub fn count_real_roots(f: &UniPolyQ, interval: &Interval) -> Result<usize> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if f.degree() == Some(0) {
        return Ok(0);
    }
    let chain = SturmChain::new(&f.squarefree_part())?;
    Ok(count_with_chain(&chain, interval))
}

fn count_with_chain(chain: &SturmChain, interval: &Interval) -> usize {
    let lo_v = match &interval.lo {
        Bound::Unbounded => chain.variations_at_neg_inf() as i64,
        Bound::Open(a) | Bound::Closed(a) => chain.variations_at(a) as i64,
    };
    let hi_v = match &interval.hi {
        Bound::Unbounded => chain.variations_at_pos_inf() as i64,
        Bound::Open(b) | Bound::Closed(b) => chain.variations_at(b) as i64,
    };
    if let (Bound::Open(a) | Bound::Closed(a), Bound::Open(b) | Bound::Closed(b)) = (&interval.lo, &interval.hi) {
        if a > b {
            return 0;
        }
        if a == b {
            let closed = matches!(interval.lo, Bound::Closed(_)) && matches!(interval.hi, Bound::Closed(_));
            return usize::from(closed && chain.is_root(a));
        }
    }
    // lo_v - hi_v counts roots in (a, b]
    let mut count = lo_v - hi_v;
    if let Bound::Closed(a) = &interval.lo {
        if chain.is_root(a) {
            count += 1;
        }
    }
    if let Bound::Open(b) = &interval.hi {
        if chain.is_root(b) {
            count -= 1;
        }
    }
    count.max(0) as usize
}

/// Real roots counted with multiplicity.
pub fn real_root_count_with_multiplicity(f: &UniPolyQ) -> Result<usize> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let mut g = f.clone();
    let mut total = 0;
    // each pass strips one from every multiplicity
    while g.degree().unwrap_or(0) > 0 {
        let h = g.gcd(&g.derivative());
        let sf = g.div_rem(&h).0;
        let chain = SturmChain::new(&sf)?;
        total += chain.variations_at_neg_inf() - chain.variations_at_pos_inf();
        g = h;
    }
    Ok(total)
}

/// True iff every root of `f` is real.
pub fn is_real_rooted(f: &UniPolyQ) -> Result<bool> {
    let deg = f.degree().ok_or(Error::ZeroPolynomial)?;
    if deg <= 1 {
        return Ok(true);
    }
    if deg == 2 {
        let (c, b, a) = (f.coeff(0), f.coeff(1), f.coeff(2));
        return Ok(&b * &b >= Rational::from_integer(4.into()) * a * c);
    }
    Ok(real_root_count_with_multiplicity(f)? == deg)
}

/// No root in `(0, inf)`; requires a real-rooted input.
pub fn roots_all_nonpositive(f: &UniPolyQ) -> Result<bool> {
    if !is_real_rooted(f)? {
        return Err(Error::NotRealRooted);
    }
    let iv = Interval {
        lo: Bound::Open(Rational::zero()),
        hi: Bound::Unbounded,
    };
    Ok(count_real_roots(f, &iv)? == 0)
}

/// No root in `[0, inf)`; requires a real-rooted input.
pub fn roots_all_negative(f: &UniPolyQ) -> Result<bool> {
    if !is_real_rooted(f)? {
        return Err(Error::NotRealRooted);
    }
    let iv = Interval {
        lo: Bound::Closed(Rational::zero()),
        hi: Bound::Unbounded,
    };
    Ok(count_real_roots(f, &iv)? == 0)
}

/// Either an exact rational root (`lo == hi`) or an open interval holding exactly one root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootInterval {
    pub lo: Rational,
    pub hi: Rational,
}

impl RootInterval {
    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }
}

/// Strictly larger than the modulus of every root.
fn cauchy_bound(f: &UniPolyQ) -> Rational {
    let n = f.degree().expect("nonzero");
    let lead = f.coeff(n).abs();
    let m = (0..n)
        .map(|k| f.coeff(k).abs() / &lead)
        .max()
        .unwrap_or_else(Rational::zero);
    m + Rational::one()
}

/// Disjoint isolating intervals for the distinct real roots, in increasing order.
pub fn isolate_real_roots(f: &UniPolyQ) -> Result<Vec<RootInterval>> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if f.degree() == Some(0) {
        return Ok(Vec::new());
    }
    let sf = f.squarefree_part();
    let chain = SturmChain::new(&sf)?;
    let m = cauchy_bound(&sf);
    let mut out = Vec::new();
    isolate_rec(&chain, -m.clone(), m, &mut out);
    Ok(out)
}

fn isolate_rec(chain: &SturmChain, a: Rational, b: Rational, out: &mut Vec<RootInterval>) {
    let n = chain.count_half_open(&a, &b);
    if n == 0 {
        return;
    }
    if n == 1 {
        if chain.is_root(&b) {
            out.push(RootInterval { lo: b.clone(), hi: b });
        } else {
            out.push(RootInterval { lo: a, hi: b });
        }
        return;
    }
    let mid = (&a + &b) / Rational::from_integer(2.into());
    isolate_rec(chain, a, mid.clone(), out);
    isolate_rec(chain, mid, b, out);
}

/// Halves an isolating interval for a root of `chain`'s first polynomial.
fn bisect_once(chain: &SturmChain, iv: &RootInterval) -> RootInterval {
    if iv.is_exact() {
        return iv.clone();
    }
    let mid = (&iv.lo + &iv.hi) / Rational::from_integer(2.into());
    if chain.is_root(&mid) {
        return RootInterval { lo: mid.clone(), hi: mid };
    }
    if chain.count_half_open(&iv.lo, &mid) == 1 {
        RootInterval { lo: iv.lo.clone(), hi: mid }
    } else {
        RootInterval { lo: mid, hi: iv.hi.clone() }
    }
}

/// True iff `f` has distinct real roots and each gap between consecutive roots
/// holds exactly one root of `g` (strict interlacing; shared roots fail).
pub fn interlace_check(f: &UniPolyQ, g: &UniPolyQ) -> Result<bool> {
    if !is_real_rooted(f)? || !is_real_rooted(g)? {
        return Err(Error::NotRealRooted);
    }
    let (df, dg) = (f.degree().expect("nonzero"), g.degree().expect("nonzero"));
    if df == 0 || dg + 1 != df {
        return Err(Error::precondition(format!(
            "interlacing needs deg g = deg f - 1, got {dg} and {df}"
        )));
    }
    if f.squarefree_part().degree() != Some(df) || f.gcd(g).degree() != Some(0) {
        return Ok(false);
    }
    let fchain = SturmChain::new(f)?;
    let gchain = SturmChain::new(&g.squarefree_part())?;
    let mut roots = isolate_real_roots(f)?;
    // shrink each root interval until g has no root in its closure
    for iv in roots.iter_mut() {
        loop {
            let hits = count_with_chain(&gchain, &Interval::closed(iv.lo.clone(), iv.hi.clone()));
            if hits == 0 {
                break;
            }
            *iv = bisect_once(&fchain, iv);
        }
    }
    for w in roots.windows(2) {
        let gap = Interval::open(w[0].hi.clone(), w[1].lo.clone());
        if count_with_chain(&gchain, &gap) != 1 {
            return Ok(false);
        }
    }
    Ok(true)
}
