//! Monic polynomials ↔ positive rationals.
//!
//! A monic polynomial `r_{k0} + r_{k1} x + … + r_{k(l-1)} x^(l-1) + x^l` is
//! sent to the continued fraction
//!
//! ```text
//! l = 0:  [1]
//! l = 1:  [k0 + 2]
//! l = 2:  [k0; k1 + 2]
//! l ≥ 3:  [k0; k1 + 1, …, k(l-2) + 1, k(l-1) + 2]
//! ```

use num_bigint::BigUint;
use num_traits::{One, Signed};

use super::calkin_wilf::{cw_index_of_cf, cw_rational, r_index, r_seq};
use super::{BigIndex, ContinuedFraction, MonicPoly};
use crate::{Error, Rational, Result};

pub fn poly_from_cf(cf: &ContinuedFraction) -> MonicPoly {
    let terms = cf.terms();
    let l = terms.len();
    let ks: Vec<BigUint> = match l {
        1 if terms[0].is_one() => return MonicPoly::one(),
        1 => vec![&terms[0] - 2u32],
        2 => vec![terms[0].clone(), &terms[1] - 2u32],
        _ => {
            let mut ks = Vec::with_capacity(l);
            ks.push(terms[0].clone());
            ks.extend(terms[1..l - 1].iter().map(|t| t - 1u32));
            ks.push(&terms[l - 1] - 2u32);
            ks
        }
    };
    MonicPoly::from_lower(ks.iter().map(r_seq).collect())
}

pub fn cf_from_poly(u: &MonicPoly) -> Result<ContinuedFraction> {
    let ks = u
        .lower()
        .iter()
        .map(r_index)
        .collect::<Result<Vec<BigUint>>>()?;
    let l = ks.len();
    let terms: Vec<BigUint> = match l {
        0 => vec![BigUint::one()],
        1 => vec![&ks[0] + 2u32],
        _ => ks
            .into_iter()
            .enumerate()
            .map(|(i, k)| match i {
                0 => k,
                _ if i == l - 1 => k + 2u32,
                _ => k + 1u32,
            })
            .collect(),
    };
    Ok(ContinuedFraction::from_terms_unchecked(terms))
}

pub fn poly_from_rational(q: &Rational) -> Result<MonicPoly> {
    if !q.is_positive() {
        return Err(Error::Domain(format!(
            "polynomial enumeration needs q > 0, got {q}"
        )));
    }
    Ok(poly_from_cf(&ContinuedFraction::encode(q)?))
}

pub fn rational_from_poly(u: &MonicPoly) -> Result<Rational> {
    Ok(cf_from_poly(u)?.to_rational())
}

/// `u_n`.
pub fn poly_at_index(n: &BigIndex) -> Result<MonicPoly> {
    Ok(poly_from_cf(&cw_rational(n)?))
}

/// The `n` with `u_n = u`.
pub fn index_of_poly(u: &MonicPoly) -> Result<BigIndex> {
    cw_index_of_cf(&cf_from_poly(u)?)
}
