//! Calkin–Wilf indexing through binary run lengths.
//!
//! Reading the binary expansion of `n` from the least significant bit, the
//! alternating run lengths `ones, zeros, ones, …` (the first run may be
//! empty) are exactly the continued fraction terms of `q_n`. The last run
//! (ending at the leading 1) is a run of ones; when it has length 1 it is
//! merged into the previous term to reach canonical form.

use num_bigint::BigUint;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{BigIndex, ContinuedFraction};
use crate::{Error, Rational, Result};

/// Largest index bit length that [`cw_index`] will materialise.
pub const MAX_INDEX_BITS: u64 = 1 << 30;

/// Alternating run lengths of `n`, starting with the (possibly empty) run of
/// trailing ones. `n` must be non-zero.
fn runs_lsb_first(n: &BigUint) -> Vec<u64> {
    let digits = n.to_u64_digits();
    let end = n.bits();
    let mut runs = Vec::new();
    let mut pos = 0u64;
    let mut ones = true;
    while pos < end {
        let next = next_change(&digits, pos, ones, end);
        runs.push(next - pos);
        pos = next;
        ones = !ones;
    }
    runs
}

/// First bit position `>= pos` whose value differs from `ones`.
fn next_change(digits: &[u64], mut pos: u64, ones: bool, end: u64) -> u64 {
    while pos < end {
        let word = digits[(pos / 64) as usize];
        let word = if ones { !word } else { word };
        let shifted = word >> (pos % 64);
        if shifted != 0 {
            return (pos + u64::from(shifted.trailing_zeros())).min(end);
        }
        pos = (pos / 64 + 1) * 64;
    }
    end
}

/// `q_n` as a canonical continued fraction, in time linear in the bit length
/// of `n`.
pub fn cw_rational(n: &BigIndex) -> Result<ContinuedFraction> {
    n.require_positive("Calkin-Wilf")?;
    let terms = runs_lsb_first(n.value())
        .into_iter()
        .map(BigUint::from)
        .collect();
    ContinuedFraction::from_lax(terms)
}

/// Index `n` with `q_n = q`, for `q > 0`.
pub fn cw_index(q: &Rational) -> Result<BigIndex> {
    if !q.is_positive() {
        return Err(Error::Domain(format!("Calkin-Wilf index needs q > 0, got {q}")));
    }
    cw_index_of_cf(&ContinuedFraction::encode(q)?)
}

/// Index `n` whose `q_n` has the given canonical continued fraction.
pub fn cw_index_of_cf(cf: &ContinuedFraction) -> Result<BigIndex> {
    let terms = cf.terms();
    let mut runs: Vec<u64> = Vec::with_capacity(terms.len() + 1);
    for t in terms {
        runs.push(t.to_u64().ok_or_else(|| {
            Error::TooLarge(format!("continued fraction term with {} bits", t.bits()))
        })?);
    }
    // Runs alternate ones/zeros starting with ones and must end with ones, so
    // an even term count is rewritten as [..., m_l - 1, 1].
    if runs.len().is_multiple_of(2) {
        let last = runs.last_mut().expect("non-empty");
        *last -= 1;
        runs.push(1);
    }
    let total = runs
        .iter()
        .try_fold(0u64, |acc, &r| acc.checked_add(r))
        .filter(|&t| t <= MAX_INDEX_BITS)
        .ok_or_else(|| Error::TooLarge("Calkin-Wilf index exceeds MAX_INDEX_BITS".into()))?;

    let mut words = vec![0u32; total.div_ceil(32) as usize];
    let mut pos = 0u64;
    for (i, &len) in runs.iter().enumerate() {
        if i % 2 == 0 {
            set_ones(&mut words, pos, pos + len);
        }
        pos += len;
    }
    Ok(BigIndex::new(BigUint::new(words)))
}

fn set_ones(words: &mut [u32], from: u64, to: u64) {
    let mut p = from;
    while p < to {
        let w = (p / 32) as usize;
        let lo = (p % 32) as u32;
        let hi = ((to - (p - u64::from(lo))).min(32)) as u32;
        let mask = if hi - lo == 32 {
            u32::MAX
        } else {
            ((1u32 << (hi - lo)) - 1) << lo
        };
        words[w] |= mask;
        p += u64::from(hi - lo);
    }
}

/// `r_0 = 0`, `r_{2n} = q_n`, `r_{2n-1} = -q_n`.
pub fn r_seq(k: &BigUint) -> Rational {
    if k.is_zero() {
        return Rational::zero();
    }
    let is_odd = k.bit(0);
    let n: BigUint = if is_odd { (k + 1u32) >> 1 } else { k >> 1 };
    let q = cw_rational(&BigIndex::new(n))
        .expect("index is positive")
        .to_rational();
    if is_odd {
        -q
    } else {
        q
    }
}

/// Inverse of [`r_seq`]. Fails only when the index is too large to build.
pub fn r_index(r: &Rational) -> Result<BigUint> {
    if r.is_zero() {
        return Ok(BigUint::zero());
    }
    let n = cw_index(&r.abs())?.into_inner() << 1u32;
    Ok(if r.is_negative() { n - BigUint::one() } else { n })
}
