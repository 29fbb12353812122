use std::collections::HashMap;
use std::sync::{Arc, LazyLock, RwLock};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use super::{guard_prec, SigmaConfig};
use crate::enumeration::{poly_at_index, BigIndex, MonicPoly};
use crate::{BigReal, Error, Rational, Result};

/// Data of the polynomial piece `σ = a_n + b_n u_n(y)` on `[(2n-1)d, 2nd]`.
#[derive(Clone, Debug)]
pub struct Piece {
    pub n: BigIndex,
    pub u: MonicPoly,
    pub b1: Rational,
    pub b2: Rational,
    /// `M_n = h((2n+1)d)`.
    pub m: BigReal,
    /// `1 - M_n`, computed without cancellation.
    pub one_minus_m: BigReal,
    pub a: BigReal,
    pub b: BigReal,
    /// Bound on `|u_n'|` over `(1, 1.5)`.
    pub c: Rational,
    /// Bound on `|u_n'|` over `[-0.5, 0]`.
    pub c_bar: Rational,
    prec: usize,
}

impl Piece {
    fn build(n: &BigIndex, cfg: &SigmaConfig, prec: usize) -> Result<Self> {
        n.require_positive("piece")?;
        let u = poly_at_index(n)?;
        let (b1, b2) = affine_bounds(&u);
        let twice_n = BigInt::from(n.value().clone()) * 2;
        let arg = super::affine_unreduced(&twice_n, cfg.d(), &Rational::one());
        let one_minus_m = super::one_minus_h_at(&arg, cfg, prec)?;
        let m = &BigReal::one(prec) - &one_minus_m;
        let three = BigReal::from_i64(3, prec);
        let (a, b) = if n.value().is_one() {
            let half = BigReal::from_rational(&Rational::new(1.into(), 2.into()), prec);
            (half.clone(), &m * &half)
        } else {
            let b = &one_minus_m / &(&three * &BigReal::from_rational(&(&b2 - &b1), prec));
            let a = &(&(&BigReal::one(prec) + &(&m + &m)) / &three) - &b.mul_rational(&b1);
            (a, b)
        };
        let c = u.as_poly().derivative_bound(&Rational::new(3.into(), 2.into()));
        let c_bar = u.as_poly().derivative_bound(&Rational::new(1.into(), 2.into()));
        Ok(Piece {
            n: n.clone(),
            u,
            b1,
            b2,
            m,
            one_minus_m,
            a,
            b,
            c,
            c_bar,
            prec,
        })
    }

    /// `a_n + b_n u_n(y)` for an exact local coordinate `y`.
    pub fn value(&self, y: &Rational) -> BigReal {
        let uy = self.u.as_poly().eval(y);
        if self.n.value().is_one() {
            return &self.a + &self.b.mul_rational(&uy);
        }
        // Equal to a_n + b_n u_n(y), but free of the a_n / b_n B1 cancellation.
        let three = BigReal::from_i64(3, self.prec);
        let base = &(&BigReal::one(self.prec) + &(&self.m + &self.m)) / &three;
        &base + &self.b.mul_rational(&(uy - &self.b1))
    }

    /// `min(ε d / (b_n C), d/2)` with `ε = (1 - M_n)/6`. For `n >= 2` the
    /// `1 - M_n` factors cancel, leaving `d (B2 - B1) / (2C)`.
    pub fn delta(&self, d: &Rational) -> Rational {
        self.radius(&self.c, d)
    }

    /// The same radius computed with the `[-0.5, 0]` derivative bound, used
    /// when this piece is the right neighbour of a transition.
    pub fn delta_bar(&self, d: &Rational) -> Rational {
        self.radius(&self.c_bar, d)
    }

    fn radius(&self, bound: &Rational, d: &Rational) -> Rational {
        let half = d / Rational::from_integer(2.into());
        if bound.is_zero() || self.n.value().is_one() {
            return half;
        }
        let r = d * (&self.b2 - &self.b1) / (bound * Rational::from_integer(2.into()));
        r.min(half)
    }
}

/// `B1 = α0 + Σ min(αi, 0)` and `B2 = α0 + Σ max(αi, 0) + 1` over the
/// non-leading coefficients; `(0, 1)` for the constant polynomial.
pub fn affine_bounds(u: &MonicPoly) -> (Rational, Rational) {
    let lower = u.lower();
    let Some((a0, rest)) = lower.split_first() else {
        return (Rational::zero(), Rational::one());
    };
    let zero = Rational::zero();
    let b1 = rest.iter().fold(a0.clone(), |acc, c| acc + c.min(&zero));
    let b2 = rest.iter().fold(a0.clone(), |acc, c| acc + c.max(&zero)) + Rational::one();
    (b1, b2)
}

/// Everything needed to evaluate `σ` on `[(2n-1)d, (2n+1)d]`: piece `n`, its
/// right neighbour and the transition constants between them.
#[derive(Clone, Debug)]
pub struct PieceInfo {
    pub piece: Arc<Piece>,
    pub next: Arc<Piece>,
    /// `K_n = (σ(2nd) + σ((2n+1)d)) / 2`.
    pub k: BigReal,
    pub delta: Rational,
    pub delta_bar: Rational,
}

impl PieceInfo {
    pub fn n(&self) -> &BigIndex {
        &self.piece.n
    }
}

type Key = (BigUint, Rational, Rational, usize);

const CACHE_LIMIT: usize = 4096;

static CACHE: LazyLock<RwLock<HashMap<Key, Arc<Piece>>>> =
    LazyLock::new(|| RwLock::new(HashMap::new()));

/// Cached piece `n` at internal precision `prec`. Concurrent fills of the
/// same key compute identical values, so a lost race is harmless.
pub(crate) fn cached_piece(n: &BigIndex, cfg: &SigmaConfig, prec: usize) -> Result<Arc<Piece>> {
    let key = (n.value().clone(), cfg.d().clone(), cfg.lambda().clone(), prec);
    if let Some(p) = CACHE.read().map_err(poisoned)?.get(&key) {
        return Ok(p.clone());
    }
    let piece = Arc::new(Piece::build(n, cfg, prec)?);
    let mut map = CACHE.write().map_err(poisoned)?;
    if map.len() >= CACHE_LIMIT {
        map.clear();
    }
    Ok(map.entry(key).or_insert(piece).clone())
}

fn poisoned<T>(_: T) -> Error {
    Error::Arithmetic("piece cache lock poisoned".into())
}

/// Piece `n` alone, at output precision `prec`.
pub fn piece(n: &BigIndex, cfg: &SigmaConfig, prec: usize) -> Result<Arc<Piece>> {
    cached_piece(n, cfg, guard_prec(prec))
}

/// Piece `n` together with its transition data, at output precision `prec`.
pub fn piece_info(n: &BigIndex, cfg: &SigmaConfig, prec: usize) -> Result<PieceInfo> {
    piece_info_at(n, cfg, guard_prec(prec))
}

pub(crate) fn piece_info_at(n: &BigIndex, cfg: &SigmaConfig, wp: usize) -> Result<PieceInfo> {
    let piece = cached_piece(n, cfg, wp)?;
    let next = cached_piece(&BigIndex::new(n.value() + 1u32), cfg, wp)?;
    let left = piece.value(&Rational::one());
    let right = next.value(&Rational::zero());
    let k = &(&left + &right) / &BigReal::from_i64(2, wp);
    let d = cfg.d();
    Ok(PieceInfo {
        delta: piece.delta(d),
        delta_bar: next.delta_bar(d),
        piece,
        next,
        k,
    })
}
