use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::pipeline::{
    choose_degree, pull_back, rationalize, rationalize_exact, search, Rationalized,
    DEFAULT_MAX_DEGREE, DEFAULT_MAX_INDEX_BITS,
};
use super::target::TargetFunction;
use crate::enumeration::{index_of_poly, BigIndex, MonicPoly};
use crate::format::{fixed, fixed_real, parse_rational, round_half_even, scientific, Scientific};
use crate::sigma::{self, Piece, PointSpec, SigmaConfig};
use crate::{BigReal, Error, Rational, Result};

/// Decimals of the θ1 mantissa in files and reports.
const THETA_DECIMALS: usize = 6;

/// Indices whose decimal form would exceed this many digits are not written.
const MAX_EXACT_DIGITS: u64 = 1_000_000;

#[derive(Clone, Debug)]
pub struct SynthOptions {
    pub k_max: usize,
    pub max_index_bits: u64,
    /// Represent polynomial targets with their exact coefficients whenever
    /// the resulting index stays under `max_index_bits`.
    pub exact_polynomials: bool,
}

impl Default for SynthOptions {
    fn default() -> Self {
        SynthOptions {
            k_max: DEFAULT_MAX_DEGREE,
            max_index_bits: DEFAULT_MAX_INDEX_BITS,
            exact_polynomials: true,
        }
    }
}

/// Piece `n` and piece 1 at one working precision.
type PiecePair = (Arc<Piece>, Arc<Piece>);

/// `θ1 = b - 2n(b - a)`, kept exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Theta1 {
    pub a: Rational,
    pub b: Rational,
    pub n: BigIndex,
}

impl Theta1 {
    pub fn value(&self) -> Rational {
        // Built by hand: generic reduction runs a binary gcd against the huge
        // numerator, while reducing modulo the small denominator first is cheap.
        let w = &self.b - &self.a;
        let twice_n = BigInt::from(self.n.value().clone()) * 2;
        let numer = self.b.numer() * w.denom() - twice_n * w.numer() * self.b.denom();
        let denom = self.b.denom() * w.denom();
        let g = denom.gcd(&(&numer % &denom));
        Rational::new_raw(numer / &g, denom / g)
    }

    pub fn scientific(&self, decimals: usize) -> Scientific {
        scientific(&round_half_even(&self.value()), decimals)
    }

    /// Plain decimal up to 12 integer digits, scientific beyond.
    pub fn display(&self, places: usize) -> String {
        let approx_digits = (self.n.bits() as f64 * std::f64::consts::LOG10_2) as u64;
        if approx_digits <= 10 {
            let v = self.value();
            if v.abs() < Rational::from_integer(BigInt::from(10u64).pow(12)) {
                return if v.is_integer() { v.to_integer().to_string() } else { fixed(&v, places) };
            }
        }
        self.scientific(places).to_string()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Provenance {
    pub target: String,
    pub p0: Rational,
    pub u: MonicPoly,
    pub n: BigIndex,
    pub eps: Rational,
    pub a: Rational,
    pub b: Rational,
    pub lambda: Rational,
    pub degree: usize,
    /// Proven bound on the truncation error, absent in grid-checked mode.
    pub tail: Option<Rational>,
    /// Bound on the rounding error `|p - T_k|`.
    pub budget: Rational,
}

impl Provenance {
    pub fn rigorous(&self) -> bool {
        self.tail.is_some()
    }
}

/// A synthesized network `c1 σ(x - θ1) + c2 σ(x - θ2)`.
pub struct Network {
    pub c1: BigReal,
    pub c2: BigReal,
    pub theta1: Theta1,
    pub theta2: Rational,
    pub provenance: Provenance,
    cfg: SigmaConfig,
    prec: usize,
    pieces: Mutex<HashMap<usize, PiecePair>>,
}

impl Clone for Network {
    fn clone(&self) -> Self {
        Network {
            c1: self.c1.clone(),
            c2: self.c2.clone(),
            theta1: self.theta1.clone(),
            theta2: self.theta2.clone(),
            provenance: self.provenance.clone(),
            cfg: self.cfg.clone(),
            prec: self.prec,
            pieces: Mutex::new(HashMap::new()),
        }
    }
}

impl fmt::Debug for Network {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Network")
            .field("c1", &self.c1)
            .field("c2", &self.c2)
            .field("theta1", &self.theta1.display(THETA_DECIMALS))
            .field("theta2", &self.theta2)
            .field("n_bits", &self.provenance.n.bits())
            .finish()
    }
}

/// Result of a grid check.
#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub max_error: BigReal,
    pub argmax: Rational,
    pub points: usize,
}

fn magnitude_bits(x: &BigReal) -> usize {
    x.exponent().map_or(0, |e| e.max(0) as usize)
}

pub fn synthesize(
    f: &dyn TargetFunction,
    a: &Rational,
    b: &Rational,
    eps: &Rational,
    cfg: &SigmaConfig,
    prec: usize,
) -> Result<Network> {
    synthesize_with(f, a, b, eps, cfg, prec, &SynthOptions::default())
}

pub fn synthesize_with(
    f: &dyn TargetFunction,
    a: &Rational,
    b: &Rational,
    eps: &Rational,
    cfg: &SigmaConfig,
    prec: usize,
    opts: &SynthOptions,
) -> Result<Network> {
    let g = pull_back(f, a, b)?;
    if *cfg.d() != g.width() {
        return Err(Error::Domain(format!(
            "d = {} must equal b - a = {}",
            cfg.d(),
            g.width()
        )));
    }
    if !eps.is_positive() {
        return Err(Error::Domain(format!("eps must be positive, got {eps}")));
    }
    let exact = match g.as_polynomial() {
        Some(p) if opts.exact_polynomials => match rationalize_exact(&p, opts.max_index_bits) {
            Ok(r) => Some((p.degree().unwrap_or(0), Some(Rational::zero()), Rational::zero(), r)),
            Err(Error::Infeasible(_)) => None,
            Err(e) => return Err(e),
        },
        _ => None,
    };
    let (degree, tail, budget, rat) = match exact {
        Some(found) => found,
        None if g.tail_bound(0).is_some() => {
            let c = search(&g, eps, opts.max_index_bits)?;
            (c.k, Some(c.tail), c.budget, c.rationalized)
        }
        None => {
            // Grid-checked mode: the plain ε/2 + ε/2 split.
            let choice = choose_degree(&g, eps, opts.k_max)?;
            let rat = rationalize(&choice.t, eps, opts.max_index_bits)?;
            (choice.k, None, eps * Rational::new(1.into(), 2.into()), rat)
        }
    };
    let Rationalized { p0, u, n } = rat;
    let provenance = Provenance {
        target: f.name(),
        p0,
        u,
        n,
        eps: eps.clone(),
        a: a.clone(),
        b: b.clone(),
        lambda: cfg.lambda().clone(),
        degree,
        tail,
        budget,
    };
    Network::from_provenance(provenance, cfg.clone(), prec)
}

impl Network {
    /// Builds `c1 = p0/b_n` and `c2 = -2 p0 a_n / (b_n (1 + h(3d)))` at a
    /// precision that leaves `prec` bits after the `c1`/`c2` cancellation.
    pub fn from_provenance(provenance: Provenance, cfg: SigmaConfig, prec: usize) -> Result<Self> {
        let n = provenance.n.clone();
        let p0 = provenance.p0.clone();
        let coeffs = |wp: usize| -> Result<(BigReal, BigReal)> {
            let pn = sigma::piece(&n, &cfg, wp)?;
            let p1 = sigma::piece(&BigIndex::one(), &cfg, wp)?;
            let c1 = &BigReal::from_rational(&p0, wp) / &pn.b;
            let denom = &pn.b * &(&BigReal::one(wp) + &p1.m);
            let c2 = -(pn.a.mul_rational(&(&p0 * Rational::from_integer(2.into()))) / denom);
            Ok((c1, c2))
        };
        let (rough, _) = coeffs(prec + 64)?;
        let wp = prec + magnitude_bits(&rough) + 64;
        let (c1, c2) = coeffs(wp)?;
        Ok(Self::assemble(c1, c2, provenance, cfg, prec))
    }

    fn assemble(c1: BigReal, c2: BigReal, provenance: Provenance, cfg: SigmaConfig, prec: usize) -> Self {
        let theta1 = Theta1 {
            a: provenance.a.clone(),
            b: provenance.b.clone(),
            n: provenance.n.clone(),
        };
        let theta2 = Rational::from_integer(2.into()) * &provenance.a - &provenance.b;
        Network {
            c1,
            c2,
            theta1,
            theta2,
            provenance,
            cfg,
            prec,
            pieces: Mutex::new(HashMap::new()),
        }
    }

    pub fn config(&self) -> &SigmaConfig {
        &self.cfg
    }

    /// Precision the network was synthesized for.
    pub fn prec(&self) -> usize {
        self.prec
    }

    fn working_prec(&self, prec: usize) -> usize {
        prec + magnitude_bits(&self.c1) + 64
    }

    /// Piece `n` and piece 1 at working precision `wp`, cached per network so
    /// that huge indices are never hashed on the hot path.
    fn pieces_at(&self, wp: usize) -> Result<PiecePair> {
        let mut map = self
            .pieces
            .lock()
            .map_err(|_| Error::Arithmetic("network cache lock poisoned".into()))?;
        if let Some(p) = map.get(&wp) {
            return Ok(p.clone());
        }
        let pn = sigma::piece(&self.provenance.n, &self.cfg, wp)?;
        let p1 = sigma::piece(&BigIndex::one(), &self.cfg, wp)?;
        map.insert(wp, (pn.clone(), p1.clone()));
        Ok((pn, p1))
    }

    /// `c1 σ(x - θ1) + c2 σ(x - θ2)`. Both arguments are addressed by interval
    /// index and offset: `x - θ1 = (2n - 1 + m) d + s` and `x - θ2 = (1 + m) d + s`
    /// with `x - a = m d + s`.
    pub fn eval(&self, x: &Rational, prec: usize) -> Result<BigReal> {
        if self.provenance.p0.is_zero() {
            return Ok(BigReal::zero(prec));
        }
        let wp = self.working_prec(prec);
        let d = self.cfg.d();
        let off = x - &self.provenance.a;
        let mut m = (&off / d).floor().to_integer();
        let mut s = &off - Rational::from_integer(m.clone()) * d;
        if m.is_one() && s.is_zero() {
            m = BigInt::zero();
            s = d.clone();
        }
        let (s1, s2) = if m.is_zero() {
            let (pn, p1) = self.pieces_at(wp)?;
            let y = &s / d;
            (pn.value(&y), p1.value(&y))
        } else {
            let twice_n = BigInt::from(self.provenance.n.value().clone()) * 2;
            let first = PointSpec::Interval {
                index: twice_n - 1 + &m,
                offset: s.clone(),
            };
            let second = PointSpec::Interval {
                index: m + 1,
                offset: s,
            };
            (
                sigma::sigma_eval(&first, &self.cfg, wp)?,
                sigma::sigma_eval(&second, &self.cfg, wp)?,
            )
        };
        let c1 = self.c1.with_prec(wp);
        let c2 = self.c2.with_prec(wp);
        Ok((&(&c1 * &s1) + &(&c2 * &s2)).with_prec(prec))
    }

    /// Max of `|f - N|` over `grid` uniform points of `[a, b]`, with the first
    /// maximiser reported.
    pub fn verify(&self, f: &dyn TargetFunction, grid: usize, prec: usize) -> Result<VerifyReport> {
        if grid < 2 {
            return Err(Error::Domain(format!("verify needs at least 2 grid points, got {grid}")));
        }
        self.pieces_at(self.working_prec(prec))?;
        let a = &self.provenance.a;
        let step = (&self.provenance.b - a) / Rational::from_integer((grid - 1).into());
        let errors = (0..grid)
            .into_par_iter()
            .map(|i| {
                let x = a + &step * Rational::from_integer(i.into());
                let e = (&f.eval(&x, prec + 32) - &self.eval(&x, prec + 32)?).abs();
                Ok((x, e))
            })
            .collect::<Result<Vec<_>>>()?;
        let (argmax, max_error) = errors
            .into_iter()
            .reduce(|best, cur| if cur.1 > best.1 { cur } else { best })
            .expect("grid is non-empty");
        Ok(VerifyReport {
            max_error: max_error.with_prec(prec),
            argmax,
            points: grid,
        })
    }

    /// Serialises the network. Every number is written as a decimal string.
    pub fn to_json(&self) -> String {
        let wp = self.working_prec(self.prec);
        let places = (wp as f64 * std::f64::consts::LOG10_2).ceil() as usize + 2;
        let sci = self.theta1.scientific(THETA_DECIMALS);
        let exact_n = (self.provenance.n.bits() as f64 * std::f64::consts::LOG10_2) as u64;
        let file = NetworkFile {
            c1: fixed_real(&self.c1, places),
            c2: fixed_real(&self.c2, places),
            theta1: Theta1File {
                sign: sci.sign,
                mantissa: sci.mantissa,
                exp10: sci.exp10,
                exact_n: (exact_n < MAX_EXACT_DIGITS).then(|| self.provenance.n.to_string()),
            },
            theta2: self.theta2.to_string(),
            provenance: ProvenanceFile {
                target: self.provenance.target.clone(),
                n_bits: self.provenance.n.bits(),
                p0: self.provenance.p0.to_string(),
                u: self.provenance.u.to_string(),
                eps: self.provenance.eps.to_string(),
                a: self.provenance.a.to_string(),
                b: self.provenance.b.to_string(),
                d: self.cfg.d().to_string(),
                lambda: self.provenance.lambda.to_string(),
                degree: self.provenance.degree,
                rigorous: self.provenance.rigorous(),
                tail_bound: self.provenance.tail.as_ref().map(|t| t.to_string()),
                budget: self.provenance.budget.to_string(),
                prec: self.prec,
            },
        };
        serde_json::to_string_pretty(&file).expect("network serialises")
    }

    /// Reloads a network written by [`to_json`](Self::to_json). The index is
    /// recomputed from `u` and checked against every redundant field.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: NetworkFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("network JSON: {e}")))?;
        let pf = file.provenance;
        let num = |s: &str| parse_rational(s);
        let a = num(&pf.a)?;
        let b = num(&pf.b)?;
        let cfg = SigmaConfig::new(num(&pf.d)?, num(&pf.lambda)?)?;
        if *cfg.d() != &b - &a {
            return Err(Error::Validation("d does not equal b - a".into()));
        }
        let u: MonicPoly = pf.u.parse()?;
        let n = index_of_poly(&u)?;
        let mismatch = |what: &str| Err(Error::Validation(format!("{what} does not match u")));
        if n.bits() != pf.n_bits {
            return mismatch("n_bits");
        }
        if let Some(exact) = &file.theta1.exact_n {
            if exact.parse::<BigIndex>()? != n {
                return mismatch("exact_n");
            }
        }
        let tail = pf.tail_bound.as_deref().map(num).transpose()?;
        if tail.is_some() != pf.rigorous {
            return Err(Error::Validation("rigorous flag disagrees with tail_bound".into()));
        }
        let provenance = Provenance {
            target: pf.target,
            p0: num(&pf.p0)?,
            u,
            n,
            eps: num(&pf.eps)?,
            a,
            b,
            lambda: cfg.lambda().clone(),
            degree: pf.degree,
            tail,
            budget: num(&pf.budget)?,
        };
        let c1r = num(&file.c1)?;
        let bits = c1r.abs().to_integer().bits() as usize;
        let wp = pf.prec + bits + 64;
        let c1 = BigReal::from_rational(&c1r, wp);
        let c2 = BigReal::from_rational(&num(&file.c2)?, wp);
        let net = Self::assemble(c1, c2, provenance, cfg, pf.prec);
        if net.theta2 != num(&file.theta2)? {
            return mismatch("theta2");
        }
        let sci = net.theta1.scientific(THETA_DECIMALS);
        if sci.sign != file.theta1.sign || sci.exp10 != file.theta1.exp10 || sci.mantissa != file.theta1.mantissa {
            return mismatch("theta1");
        }
        Ok(net)
    }

    /// `c1 b_n`, which should reproduce `p0`.
    pub fn c1_times_bn(&self) -> Result<BigReal> {
        let wp = self.working_prec(self.prec);
        let (pn, _) = self.pieces_at(wp)?;
        Ok(&self.c1.with_prec(wp) * &pn.b)
    }

    /// `σ(x - θ2)` on `[a, b]`, which is the constant `(1 + h(3d))/2`.
    pub fn sigma_theta2_constant(&self, prec: usize) -> Result<BigReal> {
        let (_, p1) = self.pieces_at(self.working_prec(prec))?;
        Ok(p1.value(&Rational::zero()).with_prec(prec))
    }

    /// Rough magnitude of `c1` as `f64`, for reports.
    pub fn c1_f64(&self) -> f64 {
        self.c1.to_f64()
    }

    pub fn index_bits(&self) -> u64 {
        self.provenance.n.bits()
    }

    pub fn index_decimal_digits(&self) -> u64 {
        (self.provenance.n.bits() as f64 * std::f64::consts::LOG10_2)
            .to_u64()
            .unwrap_or(u64::MAX)
    }
}

#[derive(Serialize, Deserialize)]
struct NetworkFile {
    c1: String,
    c2: String,
    theta1: Theta1File,
    theta2: String,
    provenance: ProvenanceFile,
}

#[derive(Serialize, Deserialize)]
struct Theta1File {
    sign: i8,
    mantissa: String,
    exp10: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    exact_n: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct ProvenanceFile {
    target: String,
    n_bits: u64,
    p0: String,
    u: String,
    eps: String,
    a: String,
    b: String,
    d: String,
    lambda: String,
    degree: usize,
    rigorous: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tail_bound: Option<String>,
    budget: String,
    prec: usize,
}
