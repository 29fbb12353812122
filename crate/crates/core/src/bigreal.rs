//! Binary floating point with an explicit precision, backed by `astro-float`.
//!
//! Every value carries its precision in bits. Binary operations round to the
//! larger of the two operand precisions with round-half-to-even; elementary
//! functions are faithfully rounded.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, RoundingMode, Sign};
use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Rational, Result};

const RM: RoundingMode = RoundingMode::ToEven;
pub const DEFAULT_PREC: usize = 128;
const WORD: usize = 64;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constant cache"));
}

fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

#[derive(Clone)]
pub struct BigReal {
    v: BigFloat,
    prec: usize,
}

impl BigReal {
    fn wrap(v: BigFloat, prec: usize) -> Self {
        BigReal { v, prec }
    }

    pub fn zero(prec: usize) -> Self {
        Self::wrap(BigFloat::new(prec.max(1)), prec.max(1))
    }

    pub fn one(prec: usize) -> Self {
        Self::from_i64(1, prec)
    }

    pub fn from_i64(x: i64, prec: usize) -> Self {
        Self::wrap(BigFloat::from_i64(x, prec), prec)
    }

    pub fn from_f64(x: f64, prec: usize) -> Self {
        Self::wrap(BigFloat::from_f64(x, prec), prec)
    }

    pub fn from_biguint(n: &BigUint, prec: usize) -> Self {
        Self::wrap(float_from_biguint(n, Sign::Pos, prec), prec)
    }

    pub fn from_bigint(n: &BigInt, prec: usize) -> Self {
        let sign = if n.is_negative() { Sign::Neg } else { Sign::Pos };
        Self::wrap(float_from_biguint(n.magnitude(), sign, prec), prec)
    }

    pub fn from_rational(q: &Rational, prec: usize) -> Self {
        let guard = prec + 2 * WORD;
        let num = Self::from_bigint(q.numer(), guard);
        if q.denom().is_one() {
            return num.with_prec(prec);
        }
        let den = Self::from_bigint(q.denom(), guard);
        Self::wrap(num.v.div(&den.v, prec, RM), prec)
    }

    pub fn prec(&self) -> usize {
        self.prec
    }

    /// Rounds (or widens) to `prec` bits.
    pub fn with_prec(&self, prec: usize) -> Self {
        let mut v = self.v.clone();
        if !v.is_zero() {
            v.set_precision(prec, RM).expect("valid precision");
        }
        Self::wrap(v, prec)
    }

    pub fn is_zero(&self) -> bool {
        self.v.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.v.is_negative() && !self.v.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        !self.v.is_nan() && !self.v.is_inf()
    }

    pub fn abs(&self) -> Self {
        Self::wrap(self.v.abs(), self.prec)
    }

    pub fn recip(&self) -> Self {
        Self::wrap(self.v.reciprocal(self.prec, RM), self.prec)
    }

    pub fn mul_rational(&self, q: &Rational) -> Self {
        self * &Self::from_rational(q, self.prec)
    }

    pub fn powi(&self, n: usize) -> Self {
        Self::wrap(self.v.powi(n, self.prec + WORD, RM), self.prec).with_prec(self.prec)
    }

    pub fn sqrt(&self) -> Self {
        Self::wrap(self.v.sqrt(self.prec, RM), self.prec)
    }

    pub fn exp(&self) -> Self {
        let p = self.prec;
        Self::wrap(with_consts(|cc| self.v.exp(p, RM, cc)), p)
    }

    pub fn ln(&self) -> Result<Self> {
        if self.is_negative() || self.is_zero() {
            return Err(Error::Domain("logarithm of a non-positive number".into()));
        }
        let p = self.prec;
        Ok(Self::wrap(with_consts(|cc| self.v.ln(p, RM, cc)), p))
    }

    pub fn log2(&self) -> Result<Self> {
        if self.is_negative() || self.is_zero() {
            return Err(Error::Domain("logarithm of a non-positive number".into()));
        }
        let p = self.prec;
        Ok(Self::wrap(with_consts(|cc| self.v.log2(p, RM, cc)), p))
    }

    pub fn log10(&self) -> Result<Self> {
        if self.is_negative() || self.is_zero() {
            return Err(Error::Domain("logarithm of a non-positive number".into()));
        }
        let p = self.prec;
        Ok(Self::wrap(with_consts(|cc| self.v.log10(p, RM, cc)), p))
    }

    pub fn sin(&self) -> Self {
        let p = self.prec;
        Self::wrap(with_consts(|cc| self.v.sin(p, RM, cc)), p)
    }

    pub fn cos(&self) -> Self {
        let p = self.prec;
        Self::wrap(with_consts(|cc| self.v.cos(p, RM, cc)), p)
    }

    pub fn ln2(prec: usize) -> Self {
        Self::wrap(with_consts(|cc| cc.ln_2(prec, RM)), prec)
    }

    pub fn ln10(prec: usize) -> Self {
        Self::wrap(with_consts(|cc| cc.ln_10(prec, RM)), prec)
    }

    /// `1 - e^{-u}` for `u >= 0` without cancellation for small `u`.
    pub fn one_minus_exp_neg(u: &Rational, prec: usize) -> Self {
        let half = Rational::new(1.into(), 2.into());
        if *u >= half {
            let e = Self::from_rational(&-u, prec + 8).exp();
            return (&Self::one(prec + 8) - &e).with_prec(prec);
        }
        if u.is_zero() {
            return Self::zero(prec);
        }
        // u - u^2/2! + u^3/3! - … ; terms shrink by at least 1/2 each step.
        let p = prec + 16;
        let x = Self::from_rational(u, p);
        let mut term = x.clone();
        let mut sum = x.clone();
        let floor = x.exponent().expect("u > 0") - p as i64 - 2;
        let mut k: i64 = 1;
        while term.exponent().is_some_and(|e| e > floor) {
            k += 1;
            term = &(&term * &x) / &Self::from_i64(-k, p);
            sum = &sum + &term;
        }
        sum.with_prec(prec)
    }

    /// Binary exponent `e` with `2^(e-1) <= |x| < 2^e`; `None` for zero.
    pub fn exponent(&self) -> Option<i64> {
        if self.v.is_zero() {
            return None;
        }
        self.v.exponent().map(i64::from)
    }

    /// The exact dyadic value. `None` for NaN or infinity.
    pub fn to_rational(&self) -> Option<Rational> {
        if self.v.is_zero() {
            return Some(Rational::zero());
        }
        let (words, _, sign, e, _) = self.v.as_raw_parts()?;
        let mut digits = Vec::with_capacity(words.len() * 2);
        for w in words {
            digits.push(*w as u32);
            digits.push((*w >> 32) as u32);
        }
        let m = BigInt::from(BigUint::new(digits));
        let m = if sign.is_negative() { -m } else { m };
        let shift = i64::from(e) - (WORD * words.len()) as i64;
        Some(if shift >= 0 {
            Rational::from_integer(m << shift as usize)
        } else {
            Rational::new(m, BigInt::one() << (-shift) as usize)
        })
    }

    pub fn to_f64(&self) -> f64 {
        match self.exponent() {
            Some(e) if e < -1100 => return if self.is_negative() { -0.0 } else { 0.0 },
            Some(e) if e > 1100 => {
                return if self.is_negative() {
                    f64::NEG_INFINITY
                } else {
                    f64::INFINITY
                }
            }
            _ => {}
        }
        if let Some(q) = self.to_rational() {
            return rational_to_f64(&q);
        }
        if self.v.is_nan() {
            f64::NAN
        } else if self.v.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    }

    pub fn max(&self, other: &Self) -> Self {
        if self >= other {
            self.clone()
        } else {
            other.clone()
        }
    }
}

/// `num-rational`'s conversion saturates on huge numerators; this one scales.
pub(crate) fn rational_to_f64(q: &Rational) -> f64 {
    if q.is_zero() {
        return 0.0;
    }
    let nb = q.numer().bits() as i64;
    let db = q.denom().bits() as i64;
    let shift = 60 - (nb - db);
    let scaled = if shift >= 0 {
        (q.numer() << shift as usize) / q.denom()
    } else {
        q.numer() / (q.denom() << (-shift) as usize)
    };
    ldexp(scaled.to_f64().unwrap_or(f64::NAN), -shift)
}

fn ldexp(mut f: f64, mut e: i64) -> f64 {
    while e > 1000 && f.is_finite() && f != 0.0 {
        f *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 && f != 0.0 {
        f *= 2f64.powi(-1000);
        e += 1000;
    }
    f * 2f64.powi(e.clamp(-1100, 1100) as i32)
}

/// Rounds `n` to roughly `prec + 64` bits with a sticky bit, so the final
/// rounding to `prec` is correct.
fn float_from_biguint(n: &BigUint, sign: Sign, prec: usize) -> BigFloat {
    if n.is_zero() {
        return BigFloat::new(prec);
    }
    let bits = n.bits() as usize;
    let keep = (prec + WORD).div_ceil(WORD) * WORD;
    let (top, drop) = if bits <= keep {
        (n.clone(), 0usize)
    } else {
        let drop = bits - keep;
        let mut top: BigUint = n >> drop;
        if n.trailing_zeros().is_some_and(|t| (t as usize) < drop) {
            top |= BigUint::one();
        }
        (top, drop)
    };
    let words = top.to_u64_digits();
    let e = words.len() * WORD + drop;
    let e = i32::try_from(e).expect("integer too large for the float exponent range");
    let mut f = BigFloat::from_words(&words, sign, e);
    f.set_precision(prec, RM).expect("valid precision");
    f
}

macro_rules! binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&BigReal> for &BigReal {
            type Output = BigReal;
            fn $method(self, rhs: &BigReal) -> BigReal {
                let p = self.prec.max(rhs.prec);
                BigReal::wrap(self.v.$method(&rhs.v, p, RM), p)
            }
        }
        impl $trait<BigReal> for BigReal {
            type Output = BigReal;
            fn $method(self, rhs: BigReal) -> BigReal {
                (&self).$method(&rhs)
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl Neg for &BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal::wrap(BigFloat::neg(&self.v), self.prec)
    }
}

impl Neg for BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        -&self
    }
}

impl PartialEq for BigReal {
    fn eq(&self, other: &Self) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for BigReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.v.cmp(&other.v).map(|c| c.cmp(&0))
    }
}

impl fmt::Debug for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BigReal({:e}, {} bits)", self.to_f64(), self.prec)
    }
}

impl fmt::Display for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_rational() {
            Some(q) => f.write_str(&crate::format::fixed(&q, f.precision().unwrap_or(6))),
            None => write!(f, "{}", self.to_f64()),
        }
    }
}
