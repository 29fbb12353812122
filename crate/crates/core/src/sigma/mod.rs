//! The sigmoidal activation `σ`.
//!
//! With `h(x) = 1 - λ/(1 + ln(x - d + 1))` (λ capped at 1/2), `σ` is
//!
//! * `(1 - β̂(d - t)) (1 + M_1)/2` on `(-∞, d)`,
//! * `a_n + b_n u_n(t/d - 2n + 1)` on `[(2n-1)d, 2nd]`,
//! * a smooth transition through the plateau `K_n` on `[2nd, (2n+1)d]`,
//!
//! where `u_n` is the n-th monic rational polynomial and `M_n = h((2n+1)d)`.
//! Points are addressed as an interval index `m` plus an offset in `[0, d]`,
//! so the local polynomial coordinate is always exact even when `m` has
//! millions of bits.

mod piece;
mod smooth;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::enumeration::BigIndex;
use crate::{BigReal, Error, Rational, Result};

pub use piece::{affine_bounds, piece, piece_info, Piece, PieceInfo};
pub use smooth::{bump, transition};

/// Guard bits added to the requested precision for every internal step.
pub const GUARD_BITS: usize = 32;

pub(crate) fn guard_prec(prec: usize) -> usize {
    prec + GUARD_BITS
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SigmaConfig {
    d: Rational,
    lambda: Rational,
}

impl SigmaConfig {
    pub fn new(d: Rational, lambda: Rational) -> Result<Self> {
        if !d.is_positive() {
            return Err(Error::Domain(format!("d must be positive, got {d}")));
        }
        if !lambda.is_positive() {
            return Err(Error::Domain(format!("lambda must be positive, got {lambda}")));
        }
        Ok(SigmaConfig { d, lambda })
    }

    pub fn d(&self) -> &Rational {
        &self.d
    }

    pub fn lambda(&self) -> &Rational {
        &self.lambda
    }

    /// `min(1/2, λ)`.
    pub fn lambda_eff(&self) -> Rational {
        self.lambda.clone().min(Rational::new(1.into(), 2.into()))
    }
}

/// A real argument of `σ`: either a plain rational, or `index * d + offset`
/// with `0 <= offset <= d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PointSpec {
    Real(Rational),
    Interval { index: BigInt, offset: Rational },
}

impl PointSpec {
    /// `(m, s)` with `t = m d + s` and `s ∈ [0, d]`.
    pub fn split(&self, d: &Rational) -> Result<(BigInt, Rational)> {
        match self {
            PointSpec::Real(t) => {
                let m = (t / d).floor().to_integer();
                let s = t - Rational::from_integer(m.clone()) * d;
                Ok((m, s))
            }
            PointSpec::Interval { index, offset } => {
                if offset.is_negative() || offset > d {
                    return Err(Error::Validation(format!(
                        "interval offset {offset} outside [0, {d}]"
                    )));
                }
                Ok((index.clone(), offset.clone()))
            }
        }
    }

    /// The exact value of the point. Only sensible for moderate indices.
    pub fn to_rational(&self, d: &Rational) -> Rational {
        match self {
            PointSpec::Real(t) => t.clone(),
            PointSpec::Interval { index, offset } => {
                Rational::from_integer(index.clone()) * d + offset
            }
        }
    }
}

impl From<Rational> for PointSpec {
    fn from(t: Rational) -> Self {
        PointSpec::Real(t)
    }
}

/// `m d + s` as an unreduced fraction; reducing numbers with millions of bits
/// costs far more than the conversion to floating point that follows.
pub(crate) fn affine_unreduced(m: &BigInt, d: &Rational, s: &Rational) -> Rational {
    let den = d.denom() * s.denom();
    let num = m * d.numer() * s.denom() + s.numer() * d.denom();
    Rational::new_raw(num, den)
}

/// `1 - h(x)` given the exact argument `x - d + 1 >= 1`.
pub(crate) fn one_minus_h_at(arg: &Rational, cfg: &SigmaConfig, prec: usize) -> Result<BigReal> {
    let l = BigReal::from_rational(arg, prec + 8).ln()?;
    let denom = &BigReal::one(prec + 8) + &l;
    Ok((&BigReal::from_rational(&cfg.lambda_eff(), prec + 8) / &denom).with_prec(prec))
}

/// `h(x) = 1 - λ_eff / (1 + ln(x - d + 1))` for `x >= d`.
pub fn h_eval(x: &PointSpec, cfg: &SigmaConfig, prec: usize) -> Result<BigReal> {
    let d = cfg.d();
    let (m, s) = x.split(d)?;
    // x - d + 1 = (m - 1) d + s + 1
    let arg = affine_unreduced(&(m - 1), d, &(s + Rational::one()));
    if arg < Rational::one() {
        return Err(Error::Domain("h is defined for x >= d only".into()));
    }
    let wp = guard_prec(prec);
    Ok((&BigReal::one(wp) - &one_minus_h_at(&arg, cfg, wp)?).with_prec(prec))
}

/// Which half of a transition interval `[2nd, (2n+1)d]` to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Half {
    /// `[2nd, 2nd + d/2]`, blending from piece `n` into `K_n`.
    First,
    /// `[2nd + d/2, (2n+1)d]`, blending from `K_n` into piece `n + 1`.
    Second,
}

/// Evaluates one half formula of transition `n` at offset `s` from `2nd`,
/// regardless of which half `s` lies in. Used to check agreement at knots.
pub fn transition_half(
    n: &BigIndex,
    half: Half,
    s: &Rational,
    cfg: &SigmaConfig,
    prec: usize,
) -> Result<BigReal> {
    let wp = guard_prec(prec);
    let info = piece::piece_info_at(n, cfg, wp)?;
    Ok(eval_half(&info, half, s, cfg.d(), wp).with_prec(prec))
}

fn eval_half(info: &PieceInfo, half: Half, s: &Rational, d: &Rational, wp: usize) -> BigReal {
    let k = &info.k;
    match half {
        Half::First => {
            let beta = smooth::transition(&Rational::zero(), &info.delta, s, wp);
            if beta.is_zero() {
                return k.clone();
            }
            let a = info.piece.value(&(Rational::one() + s / d));
            k - &(&beta * &(k - &a))
        }
        Half::Second => {
            let w = smooth::transition_complement(&(d - &info.delta_bar), d, s, wp);
            if w.is_zero() {
                return k.clone();
            }
            let a = info.next.value(&(s / d - Rational::one()));
            k - &(&w * &(k - &a))
        }
    }
}

/// `σ(t)` rounded to `prec` bits.
pub fn sigma_eval(t: &PointSpec, cfg: &SigmaConfig, prec: usize) -> Result<BigReal> {
    let d = cfg.d();
    let (m, s) = t.split(d)?;
    let wp = guard_prec(prec);
    let value = if m.is_negative() || (m.is_zero() && &s < d) {
        // d - t = (1 - m) d - s > 0
        let gap = affine_unreduced(&(BigInt::one() - &m), d, &-&s);
        let p1 = piece::cached_piece(&BigIndex::one(), cfg, wp)?;
        let top = &(&BigReal::one(wp) + &p1.m) / &BigReal::from_i64(2, wp);
        let u = Rational::new_raw(gap.denom().clone(), gap.numer().clone());
        &BigReal::one_minus_exp_neg(&u, wp) * &top
    } else if m.is_zero() {
        piece::cached_piece(&BigIndex::one(), cfg, wp)?.value(&Rational::zero())
    } else if m.is_odd() {
        let n = BigIndex::new(((m + 1u32) >> 1u32).magnitude().clone());
        piece::cached_piece(&n, cfg, wp)?.value(&(s / d))
    } else {
        let n = BigIndex::new((m >> 1u32).magnitude().clone());
        let info = piece::piece_info_at(&n, cfg, wp)?;
        let half = if &s * Rational::from_integer(2.into()) <= *d {
            Half::First
        } else {
            Half::Second
        };
        eval_half(&info, half, &s, d, wp)
    };
    Ok(value.with_prec(prec))
}

/// `σ` on the grid `from, from + step, …` strictly below `to`.
pub fn sigma_table(
    from: &Rational,
    to: &Rational,
    step: &Rational,
    cfg: &SigmaConfig,
    prec: usize,
) -> Result<Vec<(Rational, BigReal)>> {
    if !step.is_positive() {
        return Err(Error::Domain(format!("table step must be positive, got {step}")));
    }
    if from >= to {
        return Ok(Vec::new());
    }
    let count = ((to - from) / step).ceil().to_integer();
    let count = count
        .to_usize()
        .filter(|&c| c <= 10_000_000)
        .ok_or_else(|| Error::Domain("table would have more than 10^7 rows".into()))?;
    (0..count)
        .map(|i| {
            let t = from + step * Rational::from_integer(i.into());
            let v = sigma_eval(&PointSpec::Real(t.clone()), cfg, prec)?;
            Ok((t, v))
        })
        .collect()
}
