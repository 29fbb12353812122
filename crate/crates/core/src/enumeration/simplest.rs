use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::{Error, Rational, Result};

/// The rational in the open interval `(lo, hi)` with the smallest sum of
/// continued fraction terms, i.e. the Stern–Brocot node of least depth.
/// That node is unique, so no further tie-breaking is needed. Returns 0 when
/// the interval straddles 0.
pub fn simplest_rational_in(lo: &Rational, hi: &Rational) -> Result<Rational> {
    if lo >= hi {
        return Err(Error::Domain(format!("empty interval ({lo}, {hi})")));
    }
    if lo.is_negative() && hi.is_positive() {
        return Ok(Rational::zero());
    }
    if !hi.is_positive() {
        return Ok(-simplest_positive(-hi, Some(-lo)));
    }
    Ok(simplest_positive(lo.clone(), Some(hi.clone())))
}

/// Descends the Stern–Brocot tree for `(lo, hi)` with `0 <= lo < hi`, where a
/// missing `hi` means `+∞`.
fn simplest_positive(mut lo: Rational, mut hi: Option<Rational>) -> Rational {
    let mut heads: Vec<BigInt> = Vec::new();
    let last = loop {
        let fl = lo.floor();
        let next = &fl + Rational::one();
        if hi.as_ref().is_none_or(|h| &next < h) {
            break next;
        }
        // (lo, hi) ⊂ [fl, fl + 1]: continue with the reciprocal of the fractional part.
        let h = hi.take().expect("bounded here");
        let new_lo = (h - &fl).recip();
        hi = (lo != fl).then(|| (&lo - &fl).recip());
        heads.push(fl.to_integer());
        lo = new_lo;
    };
    heads
        .into_iter()
        .rev()
        .fold(last, |acc, a| Rational::from_integer(a) + acc.recip())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn straddling_zero() {
        assert_eq!(simplest_rational_in(&q(-1, 1000), &q(1, 1000)).unwrap(), q(0, 1));
    }

    #[test]
    fn small_windows() {
        assert_eq!(simplest_rational_in(&q(3, 10), &q(35, 100)).unwrap(), q(1, 3));
        assert_eq!(simplest_rational_in(&q(21, 10), &q(29, 10)).unwrap(), q(5, 2));
        assert_eq!(simplest_rational_in(&q(-29, 10), &q(-21, 10)).unwrap(), q(-5, 2));
        assert_eq!(simplest_rational_in(&q(0, 1), &q(1, 5)).unwrap(), q(1, 6));
        assert_eq!(simplest_rational_in(&q(2, 1), &q(3, 1)).unwrap(), q(5, 2));
        assert_eq!(simplest_rational_in(&q(1, 2), &q(7, 2)).unwrap(), q(1, 1));
    }

    #[test]
    fn empty_interval() {
        assert!(simplest_rational_in(&q(1, 2), &q(1, 2)).is_err());
        assert!(simplest_rational_in(&q(1, 1), &q(0, 1)).is_err());
    }
}
