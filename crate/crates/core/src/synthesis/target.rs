//! Target functions with exact Taylor data and rigorous truncation bounds.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::{BigReal, Error, Poly, Rational, Result};

/// A univariate target `f` that can be expanded about a centre `c`.
pub trait TargetFunction: Send + Sync {
    fn name(&self) -> String;

    fn eval(&self, x: &Rational, prec: usize) -> BigReal;

    /// Rational approximations of `f^(i)(c)/i!` for `i = 0..=k`, or `None`
    /// when this target cannot be expanded about `center`.
    fn taylor(&self, center: &Rational, k: usize) -> Option<Vec<Rational>>;

    /// Bound on `sup_{|x - c| <= r} |f(x) - T_k(x)|` for the coefficients
    /// returned by [`taylor`](Self::taylor). `None` when no bound is known.
    fn tail_bound(&self, center: &Rational, r: &Rational, k: usize) -> Option<Rational>;

    /// `f` itself when it is a polynomial with rational coefficients.
    fn as_polynomial(&self) -> Option<Poly> {
        None
    }

    /// Lipschitz constant of `f` on `[a, b]`, when known.
    fn lipschitz_bound(&self, a: &Rational, b: &Rational) -> Option<Rational>;
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// A polynomial target. Expands exactly about any centre.
#[derive(Clone, Debug)]
pub struct PolyTarget {
    name: String,
    poly: Poly,
    lipschitz: Option<(Rational, Rational, Rational)>,
}

impl PolyTarget {
    pub fn new(name: impl Into<String>, poly: Poly) -> Self {
        PolyTarget {
            name: name.into(),
            poly,
            lipschitz: None,
        }
    }

    /// Records a sharper Lipschitz constant valid on `[a, b]`.
    pub fn with_lipschitz(mut self, a: Rational, b: Rational, l: Rational) -> Self {
        self.lipschitz = Some((a, b, l));
        self
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }
}

impl TargetFunction for PolyTarget {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn eval(&self, x: &Rational, prec: usize) -> BigReal {
        BigReal::from_rational(&self.poly.eval(x), prec)
    }

    fn taylor(&self, center: &Rational, k: usize) -> Option<Vec<Rational>> {
        let mut c = self.poly.shifted_coeffs(center);
        c.resize(k + 1, Rational::zero());
        Some(c)
    }

    fn tail_bound(&self, center: &Rational, r: &Rational, k: usize) -> Option<Rational> {
        let c = self.poly.shifted_coeffs(center);
        let mut total = Rational::zero();
        let mut power = r.clone();
        for (i, ci) in c.iter().enumerate().skip(1) {
            if i > k {
                total += ci.abs() * &power;
            }
            power *= r;
        }
        Some(total)
    }

    fn as_polynomial(&self) -> Option<Poly> {
        Some(self.poly.clone())
    }

    fn lipschitz_bound(&self, a: &Rational, b: &Rational) -> Option<Rational> {
        if let Some((la, lb, l)) = &self.lipschitz {
            if la <= a && b <= lb {
                return Some(l.clone());
            }
        }
        let center = (a + b) / int(2);
        let r = (b - a) / int(2);
        let shifted = Poly::new(self.poly.shifted_coeffs(&center));
        Some(shifted.derivative_bound(&r))
    }
}

/// `4x / (4 + x^2) = Σ (-1)^m x^(2m+1) / 4^m` for `|x| < 2`.
#[derive(Clone, Debug, Default)]
pub struct RationalTarget;

impl TargetFunction for RationalTarget {
    fn name(&self) -> String {
        "rational".into()
    }

    fn eval(&self, x: &Rational, prec: usize) -> BigReal {
        BigReal::from_rational(&(x * int(4) / (int(4) + x * x)), prec)
    }

    fn taylor(&self, center: &Rational, k: usize) -> Option<Vec<Rational>> {
        if !center.is_zero() {
            return None;
        }
        Some(
            (0..=k)
                .map(|i| {
                    if i % 2 == 0 {
                        return Rational::zero();
                    }
                    let m = (i / 2) as u32;
                    let sign = if m.is_multiple_of(2) { 1 } else { -1 };
                    Rational::new(sign.into(), BigInt::from(4u32).pow(m))
                })
                .collect(),
        )
    }

    fn tail_bound(&self, center: &Rational, r: &Rational, k: usize) -> Option<Rational> {
        if !center.is_zero() || *r >= int(2) {
            return None;
        }
        // Geometric majorant r ρ^m0 / (1 - ρ) with ρ = r²/4 and m0 the first
        // omitted term 2m0 + 1 > k.
        let rho = r * r / int(4);
        let m0 = k.div_ceil(2);
        Some(r * num_traits::pow::pow(rho.clone(), m0) / (Rational::one() - rho))
    }

    fn lipschitz_bound(&self, _a: &Rational, _b: &Rational) -> Option<Rational> {
        // f'(x) = (16 - 4x²)/(4 + x²)² has its maximum modulus 1 at x = 0.
        Some(Rational::one())
    }
}

/// `sin x - x cos(x + 1)`, expanded about 0.
#[derive(Clone, Debug)]
pub struct SinCosTarget {
    sin1: Rational,
    cos1: Rational,
    /// Bound on the error of `sin1` and `cos1`.
    eta: Rational,
}

const TRIG_TERMS: usize = 40;

impl Default for SinCosTarget {
    fn default() -> Self {
        let (mut sin1, mut cos1) = (Rational::zero(), Rational::zero());
        let mut fact = Rational::one();
        for j in 0..2 * TRIG_TERMS {
            if j > 0 {
                fact /= int(j as i64);
            }
            let sign = if (j / 2) % 2 == 0 { 1 } else { -1 };
            if j % 2 == 0 {
                cos1 += &fact * int(sign);
            } else {
                sin1 += &fact * int(sign);
            }
        }
        // Alternating series error is below the first omitted term 1/(2N)!.
        let eta = fact / int(2 * TRIG_TERMS as i64);
        SinCosTarget { sin1, cos1, eta }
    }
}

impl SinCosTarget {
    /// `cos^{(j)}(1)`.
    fn cos_derivative(&self, j: usize) -> Rational {
        match j % 4 {
            0 => self.cos1.clone(),
            1 => -self.sin1.clone(),
            2 => -self.cos1.clone(),
            _ => self.sin1.clone(),
        }
    }
}

impl TargetFunction for SinCosTarget {
    fn name(&self) -> String {
        "sincos".into()
    }

    fn eval(&self, x: &Rational, prec: usize) -> BigReal {
        let p = prec + 16;
        let xr = BigReal::from_rational(x, p);
        let shifted = BigReal::from_rational(&(x + Rational::one()), p);
        (&xr.sin() - &(&xr * &shifted.cos())).with_prec(prec)
    }

    fn taylor(&self, center: &Rational, k: usize) -> Option<Vec<Rational>> {
        if !center.is_zero() {
            return None;
        }
        let mut out = vec![Rational::zero(); k + 1];
        let mut fact = Rational::one(); // 1/(i-1)!
        for (i, c) in out.iter_mut().enumerate().skip(1) {
            if i > 1 {
                fact /= int(i as i64 - 1);
            }
            let sin_part = if i % 2 == 1 {
                let sign = if (i / 2) % 2 == 0 { 1 } else { -1 };
                &fact / int(i as i64) * int(sign)
            } else {
                Rational::zero()
            };
            *c = sin_part - self.cos_derivative(i - 1) * &fact;
        }
        Some(out)
    }

    fn tail_bound(&self, center: &Rational, r: &Rational, k: usize) -> Option<Rational> {
        if !center.is_zero() {
            return None;
        }
        // Lagrange remainders: |sin x - S_k| <= r^(k+1)/(k+1)!, and the degree
        // k-1 remainder of cos(x+1) is at most r^k/k!, times |x| <= r.
        let mut fact_k = Rational::one();
        for j in 2..=k {
            fact_k *= int(j as i64);
        }
        let rk1 = num_traits::pow::pow(r.clone(), k + 1);
        let sin_tail = &rk1 / (&fact_k * int(k as i64 + 1));
        let cos_tail = if k == 0 {
            // T_0 = 0 omits x cos(x + 1) entirely; |x cos(x+1)| <= r.
            r.clone()
        } else {
            &rk1 / &fact_k
        };
        let big_r = r.clone().max(Rational::one());
        let coeff_err = &self.eta * int(k as i64 + 1) * num_traits::pow::pow(big_r, k + 1);
        Some(sin_tail + cos_tail + coeff_err)
    }

    fn lipschitz_bound(&self, a: &Rational, b: &Rational) -> Option<Rational> {
        // f'(x) = cos x - cos(x+1) + x sin(x+1), so |f'| <= 2 + max|x|.
        let m = a.abs().max(b.abs());
        Some(int(2) + m)
    }
}

/// Names accepted by [`by_name`].
pub const CATALOG: [&str; 4] = ["cubic", "exp-partial", "rational", "sincos"];

/// `x^3 + x^2 - 5x + 3`.
pub fn cubic() -> PolyTarget {
    PolyTarget::new("cubic", Poly::from_integers(&[3, -5, 1, 1]))
        .with_lipschitz(int(-1), int(1), q(16, 3))
}

/// `1 + x + x^2/2 + … + x^6/720`.
pub fn exp_partial() -> PolyTarget {
    let mut coeffs = Vec::new();
    let mut fact = Rational::one();
    for j in 0..=6 {
        if j > 0 {
            fact /= int(j);
        }
        coeffs.push(fact.clone());
    }
    let lip: Rational = coeffs[..6].iter().sum();
    PolyTarget::new("exp-partial", Poly::new(coeffs)).with_lipschitz(int(-1), int(1), lip)
}

pub fn by_name(name: &str) -> Result<Box<dyn TargetFunction>> {
    Ok(match name {
        "cubic" => Box::new(cubic()),
        "exp-partial" => Box::new(exp_partial()),
        "rational" => Box::new(RationalTarget),
        "sincos" => Box::new(SinCosTarget::default()),
        other => {
            return Err(Error::Validation(format!(
                "unknown target {other:?}; expected one of {}",
                CATALOG.join(", ")
            )))
        }
    })
}
