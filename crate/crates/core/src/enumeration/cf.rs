use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::{Error, Rational, Result};

/// Canonical finite simple continued fraction `[m0; m1, …, ml]` of a positive
/// rational: `m0 >= 0`, inner terms `>= 1`, and a final term `>= 2` whenever
/// there is more than one term. A single term represents an integer `>= 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ContinuedFraction {
    terms: Vec<BigUint>,
}

impl ContinuedFraction {
    /// Validates `terms` against the canonical form.
    pub fn new(terms: Vec<BigUint>) -> Result<Self> {
        let Some(last) = terms.last() else {
            return Err(Error::Validation("empty continued fraction".into()));
        };
        let l = terms.len() - 1;
        if l == 0 {
            if last.is_zero() {
                return Err(Error::Validation(
                    "single-term continued fraction must be at least 1".into(),
                ));
            }
        } else {
            if let Some(pos) = terms[1..l].iter().position(Zero::is_zero) {
                return Err(Error::Validation(format!(
                    "term {} of a continued fraction must be at least 1",
                    pos + 1
                )));
            }
            if *last < BigUint::from(2u32) {
                return Err(Error::Validation(
                    "last term of a canonical continued fraction must be at least 2".into(),
                ));
            }
        }
        Ok(ContinuedFraction { terms })
    }

    /// Builds the canonical form from a possibly non-canonical term list whose
    /// trailing term may be 1 (inner terms must still be positive).
    pub(crate) fn from_lax(mut terms: Vec<BigUint>) -> Result<Self> {
        if terms.len() >= 2 && terms.last().is_some_and(One::is_one) {
            terms.pop();
            if let Some(t) = terms.last_mut() {
                *t += 1u32;
            }
        }
        Self::new(terms)
    }

    pub(crate) fn from_terms_unchecked(terms: Vec<BigUint>) -> Self {
        debug_assert!(Self::new(terms.clone()).is_ok());
        ContinuedFraction { terms }
    }

    /// Canonical expansion of a positive rational.
    pub fn encode(q: &Rational) -> Result<Self> {
        if !q.is_positive() {
            return Err(Error::Domain(format!(
                "continued fraction expansion needs q > 0, got {q}"
            )));
        }
        let mut num: BigInt = q.numer().clone();
        let mut den: BigInt = q.denom().clone();
        let mut terms = Vec::new();
        while !den.is_zero() {
            let (quot, rem) = num.div_rem(&den);
            terms.push(quot.to_biguint().expect("non-negative quotient"));
            num = den;
            den = rem;
        }
        // Euclid always ends with a last term >= 2 unless the value is an integer.
        Ok(Self::from_terms_unchecked(terms))
    }

    /// Exact value via the convergent recurrence.
    pub fn to_rational(&self) -> Rational {
        let (mut h_prev, mut h) = (BigUint::zero(), BigUint::one());
        let (mut k_prev, mut k) = (BigUint::one(), BigUint::zero());
        for a in &self.terms {
            let h_next = a * &h + &h_prev;
            let k_next = a * &k + &k_prev;
            h_prev = std::mem::replace(&mut h, h_next);
            k_prev = std::mem::replace(&mut k, k_next);
        }
        Rational::new(BigInt::from(h), BigInt::from(k))
    }

    pub fn terms(&self) -> &[BigUint] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<BigUint> {
        self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Sum of all terms; equals the bit length of the Calkin–Wilf index.
    pub fn term_sum(&self) -> BigUint {
        self.terms.iter().sum()
    }
}

impl fmt::Display for ContinuedFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}", self.terms[0])?;
        for (i, t) in self.terms[1..].iter().enumerate() {
            write!(f, "{}{t}", if i == 0 { "; " } else { ", " })?;
        }
        write!(f, "]")
    }
}

pub fn cf_encode(q: &Rational) -> Result<ContinuedFraction> {
    ContinuedFraction::encode(q)
}

pub fn cf_decode(cf: &ContinuedFraction) -> Rational {
    cf.to_rational()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn terms(ts: &[u64]) -> Vec<BigUint> {
        ts.iter().map(|&t| BigUint::from(t)).collect()
    }

    #[test]
    fn seventeen_sevenths() {
        let cf = cf_encode(&r(17, 7)).unwrap();
        assert_eq!(cf.terms(), terms(&[2, 2, 3]).as_slice());
        assert_eq!(cf.to_string(), "[2; 2, 3]");
        assert_eq!(cf_decode(&cf), r(17, 7));
    }

    #[test]
    fn integers_and_unit_fractions() {
        assert_eq!(cf_encode(&r(1, 1)).unwrap().terms(), terms(&[1]).as_slice());
        let third = ContinuedFraction::new(terms(&[0, 3])).unwrap();
        assert_eq!(third.to_rational(), r(1, 3));
    }

    #[test]
    fn rejects_non_canonical() {
        assert!(ContinuedFraction::new(terms(&[2, 1])).is_err());
        assert!(ContinuedFraction::new(terms(&[0])).is_err());
        assert!(ContinuedFraction::new(terms(&[1, 0, 2])).is_err());
        assert!(ContinuedFraction::new(vec![]).is_err());
        assert!(cf_encode(&r(0, 1)).is_err());
        assert!(cf_encode(&r(-3, 2)).is_err());
    }

    #[test]
    fn lax_form_is_canonicalised() {
        let cf = ContinuedFraction::from_lax(terms(&[0, 1, 1])).unwrap();
        assert_eq!(cf.terms(), terms(&[0, 2]).as_slice());
        assert_eq!(cf.to_rational(), r(1, 2));
    }
}
