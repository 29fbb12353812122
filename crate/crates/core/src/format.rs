//! Decimal parsing and round-half-even formatting.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::{BigReal, Error, Rational, Result};

/// Below this many bits the library conversions are fast enough.
const SPLIT_BITS: u64 = 1 << 13;

/// Decimal digits of `n`, splitting by a power of ten near its square root so
/// that the cost follows multiplication rather than growing quadratically.
pub fn decimal_string(n: &BigUint) -> String {
    if n.bits() <= SPLIT_BITS {
        return n.to_string();
    }
    let half = (n.bits() as f64 * std::f64::consts::LOG10_2 / 2.0) as usize;
    let (hi, lo) = n.div_rem(&BigUint::from(10u32).pow(half as u32));
    let mut out = decimal_string(&hi);
    let low = decimal_string(&lo);
    out.extend(std::iter::repeat_n('0', half - low.len()));
    out.push_str(&low);
    out
}

/// Inverse of [`decimal_string`] for a string of ASCII digits.
pub fn parse_decimal(s: &str) -> Result<BigUint> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::Parse(format!("not a decimal integer: {s:?}")));
    }
    Ok(parse_digits(s.as_bytes()))
}

fn parse_digits(d: &[u8]) -> BigUint {
    if d.len() <= 2000 {
        return BigUint::parse_bytes(d, 10).expect("digits checked");
    }
    let (hi, lo) = d.split_at(d.len() / 2);
    parse_digits(hi) * BigUint::from(10u32).pow(lo.len() as u32) + parse_digits(lo)
}

/// Parses `"3"`, `"-1/4"`, `"0.375"`, `"1e9"` or `"2.5E-3"` exactly.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a number: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::new(n, d));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => {
            let e: i64 = s[i + 1..].parse().map_err(|_| bad())?;
            (&s[..i], e)
        }
        None => (s, 0),
    };
    let (neg, body) = match mantissa.as_bytes().first() {
        Some(b'-') => (true, &mantissa[1..]),
        Some(b'+') => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty()
        || !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit())
    {
        return Err(bad());
    }
    if exp.unsigned_abs() > 1_000_000 {
        return Err(Error::Parse(format!("exponent out of range in {s:?}")));
    }
    let digits: BigInt = format!("0{int}{frac}").parse().map_err(|_| bad())?;
    let scale = exp - frac.len() as i64;
    let ten = BigInt::from(10u32);
    let mut q = if scale >= 0 {
        Rational::from_integer(digits * ten.pow(scale as u32))
    } else {
        Rational::new(digits, ten.pow((-scale) as u32))
    };
    if neg {
        q = -q;
    }
    Ok(q)
}

/// Nearest integer, ties to even.
pub fn round_half_even(q: &Rational) -> BigInt {
    let (fl, rem) = q.numer().div_mod_floor(q.denom());
    let twice = rem * 2u32;
    match twice.cmp(q.denom()) {
        std::cmp::Ordering::Less => fl,
        std::cmp::Ordering::Greater => fl + 1,
        std::cmp::Ordering::Equal if fl.is_even() => fl,
        std::cmp::Ordering::Equal => fl + 1,
    }
}

/// `q` with exactly `places` digits after the point, rounded half-to-even.
pub fn fixed(q: &Rational, places: usize) -> String {
    let scale = BigInt::from(10u32).pow(places as u32);
    let n = round_half_even(&(q * Rational::from_integer(scale)));
    let neg = n.is_negative();
    let mut digits = n.magnitude().to_string();
    if digits.len() <= places {
        digits = format!("{}{digits}", "0".repeat(places + 1 - digits.len()));
    }
    let (int, frac) = digits.split_at(digits.len() - places);
    let sign = if neg { "-" } else { "" };
    if places == 0 {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac}")
    }
}

pub fn fixed_real(x: &BigReal, places: usize) -> String {
    match x.to_rational() {
        Some(q) => fixed(&q, places),
        None => x.to_f64().to_string(),
    }
}

/// Sign, mantissa and decimal exponent: `sign · mantissa · 10^exp10`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scientific {
    pub sign: i8,
    /// `1 <= mantissa < 10`, rendered with a fixed number of decimals.
    pub mantissa: String,
    pub exp10: i64,
}

impl std::fmt::Display for Scientific {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let sign = if self.sign < 0 { "-" } else { "" };
        write!(f, "{sign}{}e{}", self.mantissa, self.exp10)
    }
}

/// Scientific form of an integer with `decimals` mantissa decimals. Uses the
/// exact digit string for moderate sizes and logarithms above that, so
/// integers with millions of digits are cheap.
pub fn scientific(n: &BigInt, decimals: usize) -> Scientific {
    let sign = match n.sign() {
        Sign::Minus => -1,
        Sign::NoSign => {
            return Scientific {
                sign: 0,
                mantissa: fixed(&Rational::zero(), decimals),
                exp10: 0,
            }
        }
        Sign::Plus => 1,
    };
    let mag = BigInt::from(n.magnitude().clone());
    let (mantissa, exp10) = if mag.bits() <= 1 << 14 {
        let exp10 = decimal_string(mag.magnitude()).len() as i64 - 1;
        let m = Rational::new(mag, BigInt::from(10u32).pow(exp10 as u32));
        (m, exp10)
    } else {
        let prec = 128 + 4 * decimals + 64 - mag.bits().leading_zeros() as usize;
        let l = BigReal::from_bigint(&mag, prec).log10().expect("positive");
        let exp10 = l
            .to_rational()
            .expect("finite")
            .floor()
            .to_integer()
            .to_i64()
            .expect("exponent fits i64");
        let frac = &l - &BigReal::from_i64(exp10, prec);
        let m = (&frac * &BigReal::ln10(prec)).exp();
        (m.to_rational().expect("finite"), exp10)
    };
    let text = fixed(&mantissa, decimals);
    if text.starts_with("10") {
        let m = mantissa / Rational::from_integer(10.into());
        Scientific {
            sign,
            mantissa: fixed(&m, decimals),
            exp10: exp10 + 1,
        }
    } else {
        Scientific {
            sign,
            mantissa: text,
            exp10,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn parses_decimal_forms() {
        assert_eq!(parse_rational("1/4").unwrap(), q(1, 4));
        assert_eq!(parse_rational("-0.375").unwrap(), q(-3, 8));
        assert_eq!(parse_rational("1e9").unwrap(), q(1_000_000_000, 1));
        assert_eq!(parse_rational("2.5E-3").unwrap(), q(1, 400));
        assert_eq!(parse_rational(".5").unwrap(), q(1, 2));
        assert_eq!(parse_rational("+7").unwrap(), q(7, 1));
        for bad in ["", "-", "1/0", "abc", "1.2.3", "e5", "1e"] {
            assert!(parse_rational(bad).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn half_even_rounding() {
        assert_eq!(fixed(&q(5, 2), 0), "2");
        assert_eq!(fixed(&q(7, 2), 0), "4");
        assert_eq!(fixed(&q(-5, 2), 0), "-2");
        assert_eq!(fixed(&q(1, 8), 2), "0.12");
        assert_eq!(fixed(&q(3, 8), 2), "0.38");
        assert_eq!(fixed(&q(-1, 3), 5), "-0.33333");
        assert_eq!(fixed(&q(-1, 1000), 2), "0.00");
        assert_eq!(fixed(&q(2, 1), 3), "2.000");
    }

    #[test]
    fn scientific_small_and_huge() {
        let s = scientific(&BigInt::from(-467), 4);
        assert_eq!((s.sign, s.mantissa.as_str(), s.exp10), (-1, "4.6700", 2));
        let s = scientific(&BigInt::from(99_999), 2);
        assert_eq!((s.mantissa.as_str(), s.exp10), ("1.00", 5));
        // 2^100000 = 9.990020930143845…e30102
        let big = BigInt::one() << 100_000usize;
        let s = scientific(&big, 6);
        assert_eq!((s.mantissa.as_str(), s.exp10), ("9.990021", 30102));
        assert_eq!(s.to_string(), "9.990021e30102");
    }

    #[test]
    fn decimal_conversion_of_large_integers() {
        let n = (BigUint::from(3u32).pow(40_000) << 5u32) + 12345u32;
        let text = decimal_string(&n);
        assert_eq!(text, n.to_string());
        assert_eq!(parse_decimal(&text).unwrap(), n);
        let ten = BigUint::from(10u32).pow(9000);
        assert_eq!(decimal_string(&ten).len(), 9001);
        assert!(parse_decimal("12a").is_err());
        assert!(parse_decimal("").is_err());
    }
}
