use num_traits::Signed;

use crate::{BigReal, Rational};

/// `β̂(x) = e^{-1/x}` for `x > 0`, else 0.
pub fn bump(x: &Rational, prec: usize) -> BigReal {
    if !x.is_positive() {
        return BigReal::zero(prec);
    }
    BigReal::from_rational(&-x.recip(), prec + 8).exp().with_prec(prec)
}

/// `β_{a,b}(x) = β̂(b-x) / (β̂(b-x) + β̂(x-a))`, which is 1 for `x <= a` and 0
/// for `x >= b`.
pub fn transition(a: &Rational, b: &Rational, x: &Rational, prec: usize) -> BigReal {
    assert!(a < b, "transition needs a < b");
    if x <= a {
        return BigReal::one(prec);
    }
    if x >= b {
        return BigReal::zero(prec);
    }
    // β = 1 / (1 + e^z) with z = 1/(b-x) - 1/(x-a), exact up to the exponential.
    let z = (b - x).recip() - (x - a).recip();
    logistic_neg(&z, prec)
}

/// `1 / (1 + e^z)`, flushed to 0 or 1 once the other side falls below the
/// working precision.
pub(crate) fn logistic_neg(z: &Rational, prec: usize) -> BigReal {
    let limit = Rational::from_integer((prec as i64 + 64).into());
    if *z > Rational::from_integer((1i64 << 30).into()) {
        return BigReal::zero(prec);
    }
    if *z > limit {
        // e^{-z} / (1 + e^{-z}) with e^{-z} < 2^{-(prec + 64)}.
        let e = BigReal::from_rational(&-z, prec + 8).exp();
        return (&e / &(&BigReal::one(prec + 8) + &e)).with_prec(prec);
    }
    if *z < -limit {
        return BigReal::one(prec);
    }
    let p = prec + 16;
    let e = BigReal::from_rational(z, p).exp();
    (&BigReal::one(p) / &(&BigReal::one(p) + &e)).with_prec(prec)
}

/// `1 - β_{a,b}(x)`, evaluated directly rather than by subtraction.
pub(crate) fn transition_complement(
    a: &Rational,
    b: &Rational,
    x: &Rational,
    prec: usize,
) -> BigReal {
    if x <= a {
        return BigReal::zero(prec);
    }
    if x >= b {
        return BigReal::one(prec);
    }
    let z = (x - a).recip() - (b - x).recip();
    logistic_neg(&z, prec)
}
