//! Determinants and permanents of small matrices with polynomial entries.

use crate::error::{Error, Result};
use crate::poly::PolyQ;

fn check_square(m: &[Vec<PolyQ>], d: usize) -> Result<usize> {
    let n = m.len();
    for row in m {
        if row.len() != n {
            return Err(Error::precondition("polynomial matrix must be square"));
        }
        for e in row {
            crate::error::check_dim(d, e.d())?;
        }
    }
    Ok(n)
}

/// Row-by-row Laplace expansion memoized over the set of used columns.
fn expand(m: &[Vec<PolyQ>], d: usize, signed: bool) -> Result<PolyQ> {
    let n = check_square(m, d)?;
    let mut table: Vec<Option<PolyQ>> = vec![None; 1 << n];
    table[0] = Some(PolyQ::one(d));
    for s in 0usize..(1 << n) {
        let Some(cur) = table[s].take() else { continue };
        if cur.is_zero() {
            continue;
        }
        let row = s.count_ones() as usize;
        if row == n {
            table[s] = Some(cur);
            continue;
        }
        for (c, entry) in m[row].iter().enumerate() {
            if s & (1 << c) != 0 || entry.is_zero() {
                continue;
            }
            let mut term = cur.mul(entry)?;
            // sign of moving column c past the used columns to its right
            if signed && (s >> (c + 1)).count_ones() % 2 == 1 {
                term = term.neg();
            }
            let t = s | (1 << c);
            table[t] = Some(match table[t].take() {
                Some(acc) => acc.add(&term)?,
                None => term,
            });
        }
    }
    Ok(table[(1 << n) - 1].take().unwrap_or_else(|| PolyQ::zero(d)))
}

pub fn poly_det(m: &[Vec<PolyQ>], d: usize) -> Result<PolyQ> {
    expand(m, d, true)
}

pub fn poly_perm(m: &[Vec<PolyQ>], d: usize) -> Result<PolyQ> {
    expand(m, d, false)
}
