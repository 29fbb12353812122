//! Polynomials with exact rational coefficients.
//!
//! Text form (used by the CLI and JSON files) is a sparse sum of terms:
//!
//! ```text
//! poly  := ws [sign] term (sign term)* ws
//! term  := coeff ["*"] "x" ["^" digits] | coeff | "x" ["^" digits]
//! coeff := digits ["/" digits] | digits "." digits
//! sign  := "+" | "-"
//! ```
//!
//! Repeated powers are summed, so `"x + x"` parses as `2*x`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::bigreal::BigReal;
use crate::{Error, Rational, Result};

/// Dense polynomial, index `i` holding the coefficient of `x^i`. Trailing
/// zeros are trimmed; The zero polynomial has no coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Poly::new(vec![c])
    }

    pub fn from_integers(coeffs: &[i64]) -> Self {
        Poly::new(
            coeffs
                .iter()
                .map(|&c| Rational::from_integer(BigInt::from(c)))
                .collect(),
        )
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    /// Horner evaluation in floating point at the precision of `x`.
    pub fn eval_real(&self, x: &BigReal) -> BigReal {
        let prec = x.prec();
        let mut acc = BigReal::zero(prec);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + &BigReal::from_rational(c, prec);
        }
        acc
    }

    pub fn scale(&self, k: &Rational) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    /// `p(offset + scale * x)`, expanded exactly.
    pub fn compose_affine(&self, offset: &Rational, scale: &Rational) -> Poly {
        let mut acc: Vec<Rational> = Vec::with_capacity(self.coeffs.len());
        for c in self.coeffs.iter().rev() {
            // acc <- acc * (offset + scale x) + c
            let mut next = vec![Rational::zero(); acc.len() + 1];
            for (i, a) in acc.iter().enumerate() {
                next[i] += a * offset;
                next[i + 1] += a * scale;
            }
            next[0] += c;
            acc = next;
        }
        Poly::new(acc)
    }

    /// Converts coefficients given in powers of `(x - center)` to powers of `x`.
    pub fn from_shifted(coeffs: Vec<Rational>, center: &Rational) -> Poly {
        Poly::new(coeffs).compose_affine(&-center, &Rational::one())
    }

    /// Coefficients in powers of `(x - center)`.
    pub fn shifted_coeffs(&self, center: &Rational) -> Vec<Rational> {
        self.compose_affine(center, &Rational::one()).coeffs
    }

    /// Upper bound on `|p'(x)|` for `|x| <= r`: `sum i |c_i| r^(i-1)`.
    pub fn derivative_bound(&self, r: &Rational) -> Rational {
        let mut total = Rational::zero();
        let mut power = Rational::one();
        for (i, c) in self.coeffs.iter().enumerate().skip(1) {
            total += c.abs() * Rational::from_integer(BigInt::from(i)) * &power;
            power *= r;
        }
        total
    }
}

/// Monic polynomial: leading coefficient exactly 1, degree `>= 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MonicPoly(Poly);

impl MonicPoly {
    pub fn new(poly: Poly) -> Result<Self> {
        match poly.leading() {
            Some(c) if c.is_one() => Ok(MonicPoly(poly)),
            Some(c) => Err(Error::Domain(format!(
                "polynomial is not monic (leading coefficient {c})"
            ))),
            None => Err(Error::Domain("the zero polynomial is not monic".into())),
        }
    }

    pub fn one() -> Self {
        MonicPoly(Poly::constant(Rational::one()))
    }

    /// Builds `c_0 + c_1 x + … + c_{l-1} x^{l-1} + x^l` from the non-leading
    /// coefficients.
    pub fn from_lower(mut lower: Vec<Rational>) -> Self {
        lower.push(Rational::one());
        MonicPoly(Poly { coeffs: lower })
    }

    pub fn degree(&self) -> usize {
        self.0.coeffs.len() - 1
    }

    /// Coefficients below the leading one.
    pub fn lower(&self) -> &[Rational] {
        &self.0.coeffs[..self.degree()]
    }

    pub fn as_poly(&self) -> &Poly {
        &self.0
    }

    pub fn into_poly(self) -> Poly {
        self.0
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let mag = c.abs();
            match (i, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (_, true) => {}
                (_, false) => write!(f, "{mag}*")?,
            }
            match i {
                0 => {}
                1 => f.write_str("x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

impl fmt::Display for MonicPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl FromStr for Poly {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Parser::new(s).parse()
    }
}

impl FromStr for MonicPoly {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MonicPoly::new(s.parse()?)
    }
}

struct Parser<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser {
            src,
            bytes: src.as_bytes(),
            pos: 0,
        }
    }

    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at offset {} in {:?}", self.pos, self.src))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn digits(&mut self) -> Option<&'a str> {
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        (self.pos > start).then(|| &self.src[start..self.pos])
    }

    fn coeff(&mut self) -> Result<Option<Rational>> {
        self.skip_ws();
        let Some(int) = self.digits() else {
            return Ok(None);
        };
        let int = BigInt::from_str(int).map_err(|e| self.err(&e.to_string()))?;
        match self.bytes.get(self.pos) {
            Some(b'.') => {
                self.pos += 1;
                let frac = self.digits().ok_or_else(|| self.err("expected digits after '.'"))?;
                let scale = BigInt::from(10u32).pow(frac.len() as u32);
                let frac = BigInt::from_str(frac).map_err(|e| self.err(&e.to_string()))?;
                Ok(Some(Rational::new(int * &scale + frac, scale)))
            }
            _ if self.peek() == Some(b'/') => {
                self.pos += 1;
                self.skip_ws();
                let den = self.digits().ok_or_else(|| self.err("expected denominator"))?;
                let den = BigInt::from_str(den).map_err(|e| self.err(&e.to_string()))?;
                if den.is_zero() {
                    return Err(self.err("zero denominator"));
                }
                Ok(Some(Rational::new(int, den)))
            }
            _ => Ok(Some(Rational::from_integer(int))),
        }
    }

    fn monomial(&mut self) -> Result<Option<usize>> {
        if self.peek() != Some(b'x') {
            return Ok(None);
        }
        self.pos += 1;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let e = self.digits().ok_or_else(|| self.err("expected exponent"))?;
            let e: usize = e.parse().map_err(|_| self.err("exponent out of range"))?;
            if e > 1 << 20 {
                return Err(self.err("exponent too large"));
            }
            Ok(Some(e))
        } else {
            Ok(Some(1))
        }
    }

    fn parse(mut self) -> Result<Poly> {
        let mut coeffs: Vec<Rational> = Vec::new();
        let mut first = true;
        loop {
            let negative = match self.peek() {
                None if !first => break,
                None => return Err(self.err("empty polynomial")),
                Some(b'+') => {
                    self.pos += 1;
                    false
                }
                Some(b'-') => {
                    self.pos += 1;
                    true
                }
                Some(_) if first => false,
                Some(_) => return Err(self.err("expected '+' or '-'")),
            };
            first = false;
            let c = self.coeff()?;
            if c.is_some() && self.peek() == Some(b'*') {
                self.pos += 1;
                if self.peek() != Some(b'x') {
                    return Err(self.err("expected 'x' after '*'"));
                }
            }
            let power = self.monomial()?;
            let (c, power) = match (c, power) {
                (None, None) => return Err(self.err("expected a term")),
                (c, p) => (c.unwrap_or_else(Rational::one), p.unwrap_or(0)),
            };
            if coeffs.len() <= power {
                coeffs.resize(power + 1, Rational::zero());
            }
            coeffs[power] += if negative { -c } else { c };
        }
        Ok(Poly::new(coeffs))
    }
}
