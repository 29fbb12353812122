use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use super::target::TargetFunction;
use crate::enumeration::{cf_from_poly, index_of_poly, simplest_rational_in, BigIndex, MonicPoly};
use crate::{BigReal, Error, Poly, Rational, Result};

fn half() -> Rational {
    Rational::new(1.into(), 2.into())
}

/// `g(x) = f(a + (b - a) x)` on `[0, 1]`.
pub struct PulledBack<'f> {
    f: &'f dyn TargetFunction,
    a: Rational,
    b: Rational,
}

pub fn pull_back<'f>(f: &'f dyn TargetFunction, a: &Rational, b: &Rational) -> Result<PulledBack<'f>> {
    if a >= b {
        return Err(Error::Domain(format!("empty interval [{a}, {b}]")));
    }
    Ok(PulledBack {
        f,
        a: a.clone(),
        b: b.clone(),
    })
}

impl PulledBack<'_> {
    pub fn a(&self) -> &Rational {
        &self.a
    }

    pub fn b(&self) -> &Rational {
        &self.b
    }

    pub fn width(&self) -> Rational {
        &self.b - &self.a
    }

    fn center(&self) -> Rational {
        (&self.a + &self.b) * half()
    }

    /// Maps `x ∈ [0, 1]` to `t = a + (b - a) x`.
    pub fn to_original(&self, x: &Rational) -> Rational {
        &self.a + self.width() * x
    }

    /// Inverse map `x = (t - a) / (b - a)`.
    pub fn to_unit(&self, t: &Rational) -> Rational {
        (t - &self.a) / self.width()
    }

    pub fn eval(&self, x: &Rational, prec: usize) -> BigReal {
        self.f.eval(&self.to_original(x), prec)
    }

    /// `g` exactly, when `f` is a polynomial.
    pub fn as_polynomial(&self) -> Option<Poly> {
        Some(self.f.as_polynomial()?.compose_affine(&self.a, &self.width()))
    }

    /// Taylor coefficients of `g` about `1/2`: `g_i = f_i(c) d^i`.
    pub fn taylor(&self, k: usize) -> Result<Vec<Rational>> {
        let c = self.f.taylor(&self.center(), k).ok_or_else(|| {
            Error::Domain(format!(
                "{} has no expansion about {}; use an interval centred at 0",
                self.f.name(),
                self.center()
            ))
        })?;
        let d = self.width();
        let mut scale = Rational::one();
        Ok(c
            .into_iter()
            .map(|ci| {
                let v = ci * &scale;
                scale *= &d;
                v
            })
            .collect())
    }

    /// Bound on `sup_{[0,1]} |g - T_k|`.
    pub fn tail_bound(&self, k: usize) -> Option<Rational> {
        self.f.tail_bound(&self.center(), &(self.width() * half()), k)
    }
}

/// The Taylor polynomial chosen for a budget.
#[derive(Clone, Debug)]
pub struct DegreeChoice {
    pub k: usize,
    /// `T_k` in powers of `x` on `[0, 1]`.
    pub t: Poly,
    /// Proven bound on `|g - T_k|`, or `None` in grid-checked mode.
    pub tail: Option<Rational>,
}

impl DegreeChoice {
    pub fn rigorous(&self) -> bool {
        self.tail.is_some()
    }
}

pub const DEFAULT_MAX_DEGREE: usize = 80;

/// Smallest `k` whose truncation error is at most `eps / 2`.
pub fn choose_degree(g: &PulledBack<'_>, eps: &Rational, k_max: usize) -> Result<DegreeChoice> {
    if !eps.is_positive() {
        return Err(Error::Domain(format!("eps must be positive, got {eps}")));
    }
    let budget = eps * half();
    let build = |k: usize| -> Result<Poly> {
        Ok(Poly::from_shifted(g.taylor(k)?, &half()))
    };
    if g.tail_bound(0).is_some() {
        for k in 0..=k_max {
            let tail = g.tail_bound(k).expect("bound available");
            if tail <= budget {
                let t = match g.as_polynomial() {
                    Some(p) if p.degree().unwrap_or(0) <= k => p,
                    _ => build(k)?,
                };
                return Ok(DegreeChoice { k, t, tail: Some(tail) });
            }
        }
        return Err(Error::Infeasible(format!(
            "truncation bound still above {budget} at degree {k_max}"
        )));
    }
    // No analytic bound: accept the first degree that passes a dense grid.
    const GRID: i64 = 2000;
    for k in 0..=k_max {
        let t = build(k)?;
        let ok = (0..=GRID).all(|i| {
            let x = Rational::new(i.into(), GRID.into());
            let err = (&g.eval(&x, 96) - &BigReal::from_rational(&t.eval(&x), 96)).abs();
            err.to_f64() <= 0.9 * crate::bigreal::rational_to_f64(&budget)
        });
        if ok {
            return Ok(DegreeChoice { k, t, tail: None });
        }
    }
    Err(Error::Infeasible(format!(
        "grid error still above {budget} at degree {k_max}"
    )))
}

/// A rational polynomial `p = p0 u` with `u = u_n`.
#[derive(Clone, Debug)]
pub struct Rationalized {
    pub p0: Rational,
    pub u: MonicPoly,
    pub n: BigIndex,
}

impl Rationalized {
    pub fn poly(&self) -> Poly {
        self.u.as_poly().scale(&self.p0)
    }
}

/// Best budget for one degree: `(bits, tail, budget, p0, u)`.
type DegreeBest = (u64, Rational, Rational, Rational, Option<MonicPoly>);

/// Largest index, in bits, that synthesis will build by default.
pub const DEFAULT_MAX_INDEX_BITS: u64 = 1 << 26;

/// Bits of the index of `u`, computed from its continued fraction without
/// building the index. `None` when it exceeds `cap`.
fn index_bits(u: &MonicPoly, cap: u64) -> Result<Option<u64>> {
    // A coefficient whose own Calkin–Wilf index has more than 64 bits already
    // pushes a continued fraction term, and so the index, past 2^63 bits.
    for c in u.lower() {
        if c.is_zero() {
            continue;
        }
        let cf = crate::enumeration::cf_encode(&c.abs())?;
        if cf.term_sum() > BigUint::from(62u32) {
            return Ok(None);
        }
    }
    let bits = cf_from_poly(u)?.term_sum();
    Ok(bits.to_u64().filter(|&b| b <= cap))
}

fn finish(p0: Rational, u: MonicPoly, cap: u64) -> Result<Rationalized> {
    match index_bits(&u, cap)? {
        Some(_) => {
            let n = index_of_poly(&u)?;
            Ok(Rationalized { p0, u, n })
        }
        None => Err(Error::Infeasible(format!(
            "index of {u} has more than {cap} bits"
        ))),
    }
}

/// Uses the coefficients of `t` as they are: `p0` = leading coefficient.
pub fn rationalize_exact(t: &Poly, max_index_bits: u64) -> Result<Rationalized> {
    let Some(lead) = t.leading().cloned() else {
        return Ok(Rationalized {
            p0: Rational::zero(),
            u: MonicPoly::one(),
            n: BigIndex::one(),
        });
    };
    let lower = t.coeffs()[..t.coeffs().len() - 1]
        .iter()
        .map(|c| c / &lead)
        .collect();
    finish(lead, MonicPoly::from_lower(lower), max_index_bits)
}

/// Monic shifted Chebyshev polynomials `M_i = T_i(2x - 1) / 2^(2i-1)` for
/// `i <= k` (`M_0 = 1`), coefficients in powers of `x`. `|M_i| <= 2^(1-2i)`
/// on `[0, 1]`, the least sup norm of any monic polynomial of degree `i`.
fn monic_chebyshev(k: usize) -> Vec<Vec<Rational>> {
    let int = |v: i64| Rational::from_integer(v.into());
    let mut t: Vec<Vec<Rational>> = vec![vec![int(1)], vec![int(-1), int(2)]];
    while t.len() <= k {
        let (prev, cur) = (&t[t.len() - 2], &t[t.len() - 1]);
        let mut next = vec![Rational::zero(); cur.len() + 1];
        for (j, c) in cur.iter().enumerate() {
            next[j + 1] += c * int(4);
            next[j] -= c * int(2);
        }
        for (j, c) in prev.iter().enumerate() {
            next[j] -= c;
        }
        t.push(next);
    }
    t.truncate(k + 1);
    t.into_iter()
        .enumerate()
        .map(|(i, c)| {
            let lead = c[i].clone();
            c.into_iter().map(|x| x / &lead).collect()
        })
        .collect()
}

/// Rounds `t` to `p0 u` with `sup_{[0,1]} |p0 u - t| <= budget`; `None` when
/// the zero polynomial already fits.
///
/// Coefficients are fixed from the top down. Rounding the current `x^i`
/// coefficient by `δ_i` is compensated in the lower coefficients through
/// `δ_i M_i`, so that in the end `p - t = Σ δ_i M_i` exactly and the error is
/// at most `Σ |δ_i| 2^(1-2i)`. The budget is split equally over the `k + 1`
/// stages, unused slack carries down, and each stage takes the simplest
/// rational its window allows: `p0` for the leading coefficient, the ratio
/// `α_i` for the others.
fn round_within(t: &Poly, budget: &Rational) -> Result<Option<(Rational, MonicPoly)>> {
    let Some(k) = t.degree() else {
        return Ok(None);
    };
    let cheb = monic_chebyshev(k);
    let share = budget / Rational::from_integer((k + 1).into());
    let mut work = t.coeffs().to_vec();
    let mut slack = Rational::zero();
    let mut p0: Option<Rational> = None;
    let mut chosen = vec![Rational::zero(); k + 1];
    for i in (0..=k).rev() {
        // |M_i| <= 2^(1-2i) lets the x^i coefficient move 2^(2i-1) times further.
        let weight = if i == 0 {
            Rational::one()
        } else {
            Rational::new(BigInt::one(), BigInt::one() << (2 * i - 1))
        };
        let allowed = (&share + &slack) / &weight;
        let target = work[i].clone();
        let value = match &p0 {
            None if target.abs() < allowed => Rational::zero(),
            None => {
                let v = simplest_rational_in(&(&target - &allowed), &(&target + &allowed))?;
                p0 = Some(v.clone());
                v
            }
            Some(p) => {
                let centre = &target / p;
                let r = &allowed / p.abs();
                p * simplest_rational_in(&(&centre - &r), &(&centre + &r))?
            }
        };
        let delta = &value - &target;
        slack = &share + &slack - delta.abs() * &weight;
        // work = work_{<i} + δ (M_i - x^i)
        for (j, m) in cheb[i][..i].iter().enumerate() {
            work[j] += &delta * m;
        }
        chosen[i] = value;
    }
    let Some(p0) = p0 else {
        return Ok(None);
    };
    let top = chosen.iter().rposition(|c| !c.is_zero()).expect("p0 is non-zero");
    let lower = chosen[..top].iter().map(|c| c / &p0).collect();
    Ok(Some((p0, MonicPoly::from_lower(lower))))
}

/// Rounds `t` to a nearby `p0 u_n` with `sup_{[0,1]} |p - t| <= eps/2`.
pub fn rationalize(t: &Poly, eps: &Rational, max_index_bits: u64) -> Result<Rationalized> {
    if !eps.is_positive() {
        return Err(Error::Domain(format!("eps must be positive, got {eps}")));
    }
    match round_within(t, &(eps * half()))? {
        Some((p0, u)) => finish(p0, u, max_index_bits),
        None => rationalize_exact(&Poly::zero(), max_index_bits),
    }
}

/// Highest Taylor degree tried by [`search`].
pub const SEARCH_MAX_DEGREE: usize = 12;

/// Fractional bits kept in the Taylor coefficients during the search.
const DYADIC_BITS: usize = 128;

/// Rounding budgets tried by [`search`]: `2^(-j/4)` for `j = -16..=80`.
fn budget_ladder() -> Vec<Rational> {
    (-16i32..=80)
        .map(|j| Rational::from_float(2f64.powf(-(j as f64) / 4.0)).expect("finite"))
        .collect()
}

/// The cheapest of a fixed family of approximations whose certified error
/// fits `eps`.
#[derive(Clone, Debug)]
pub struct Candidate {
    pub k: usize,
    /// Truncation bound of `T_k`.
    pub tail: Rational,
    /// Bound on the rounding error `|p - T_k|`.
    pub budget: Rational,
    pub rationalized: Rationalized,
}

impl Candidate {
    /// `tail + budget`, a proven bound on `sup_{[0,1]} |g - p|`.
    pub fn certified(&self) -> Rational {
        &self.tail + &self.budget
    }
}

/// Searches every degree `k <= SEARCH_MAX_DEGREE` and every ladder budget `β`
/// with `tail(k) + β <= eps`, returning the smallest index (first in
/// `(k, -β)` order on ties). The family does not depend on `eps` and only
/// shrinks as `eps` does, so the index size never decreases with `eps`.
pub fn search(g: &PulledBack<'_>, eps: &Rational, max_index_bits: u64) -> Result<Candidate> {
    if !eps.is_positive() {
        return Err(Error::Domain(format!("eps must be positive, got {eps}")));
    }
    let ladder = budget_ladder();
    let per_degree = (0..=SEARCH_MAX_DEGREE)
        .into_par_iter()
        .map(|k| -> Result<Option<DegreeBest>> {
            let Some(tail) = g.tail_bound(k) else {
                return Ok(None);
            };
            let t = Poly::from_shifted(g.taylor(k)?, &half());
            // Dyadic coefficients keep the rounding arithmetic small; the
            // change is added to the certified tail.
            let scale = Rational::from_integer(BigInt::one() << DYADIC_BITS);
            let coarse: Vec<Rational> = t
                .coeffs()
                .iter()
                .map(|c| (c * &scale).round() / &scale)
                .collect();
            let moved: Rational = t.coeffs().iter().zip(&coarse).map(|(a, b)| (a - b).abs()).sum();
            let tail = tail + moved;
            if tail >= *eps {
                return Ok(None);
            }
            let t = Poly::new(coarse);
            let mut best: Option<DegreeBest> = None;
            for beta in ladder.iter().filter(|b| &tail + *b <= *eps) {
                let (bits, p0, u) = match round_within(&t, beta)? {
                    None => (1, Rational::zero(), None),
                    Some((p0, u)) => match index_bits(&u, max_index_bits)? {
                        Some(bits) => (bits, p0, Some(u)),
                        None => continue,
                    },
                };
                if best.as_ref().is_none_or(|b| bits < b.0) {
                    best = Some((bits, tail.clone(), beta.clone(), p0, u));
                }
            }
            Ok(best)
        })
        .collect::<Result<Vec<_>>>()?;
    let (k, (_, tail, budget, p0, u)) = per_degree
        .into_iter()
        .enumerate()
        .filter_map(|(k, c)| c.map(|c| (k, c)))
        .reduce(|best, cur| if cur.1 .0 < best.1 .0 { cur } else { best })
        .ok_or_else(|| {
            Error::Infeasible(format!(
                "no approximation up to degree {SEARCH_MAX_DEGREE} fits eps = {eps} within {max_index_bits} index bits"
            ))
        })?;
    let rationalized = match u {
        Some(u) => finish(p0, u, max_index_bits)?,
        None => rationalize_exact(&Poly::zero(), max_index_bits)?,
    };
    Ok(Candidate {
        k,
        tail,
        budget,
        rationalized,
    })
}
