//! Heaviside step networks, the comparator for the two-neuron construction.
//!
//! With `N` units on a uniform grid of `[a, b]` the network is the step
//! function that takes the value of `f` at each cell midpoint, so its error
//! shrinks only like `1/N`.

use rayon::prelude::*;

use crate::synthesis::TargetFunction;
use crate::{bigreal::rational_to_f64, Error, Rational, Result};

/// `Σ c_i H(x - θ_i)` with `H(t) = 1` for `t >= 0` and `0` otherwise.
#[derive(Clone, Debug, PartialEq)]
pub struct StepNetwork {
    /// `(θ_i, c_i)`, thresholds strictly increasing.
    pub units: Vec<(f64, f64)>,
}

impl StepNetwork {
    pub fn count(&self) -> usize {
        self.units.len()
    }

    pub fn eval(&self, x: f64) -> f64 {
        // Thresholds are sorted, so only a prefix contributes.
        let on = self.units.partition_point(|&(t, _)| t <= x);
        self.units[..on].iter().map(|&(_, c)| c).sum()
    }
}

fn sample(f: &dyn TargetFunction, x: &Rational) -> f64 {
    f.eval(x, 64).to_f64()
}

pub fn heaviside_fit(f: &dyn TargetFunction, a: &Rational, b: &Rational, n: usize) -> Result<StepNetwork> {
    if n == 0 {
        return Err(Error::Domain("a step network needs at least one unit".into()));
    }
    if a >= b {
        return Err(Error::Domain(format!("empty interval [{a}, {b}]")));
    }
    let h = (b - a) / Rational::from_integer(n.into());
    let half = Rational::new(1.into(), 2.into());
    let values: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| sample(f, &(a + &h * (Rational::from_integer(i.into()) + &half))))
        .collect();
    let units = (0..n)
        .map(|i| {
            let theta = rational_to_f64(&(a + &h * Rational::from_integer(i.into())));
            let jump = if i == 0 { values[0] } else { values[i] - values[i - 1] };
            (theta, jump)
        })
        .collect();
    Ok(StepNetwork { units })
}

/// Max of `|f - S|` over `grid` uniform points of `[a, b]`.
pub fn baseline_error(
    f: &dyn TargetFunction,
    a: &Rational,
    b: &Rational,
    n: usize,
    grid: usize,
) -> Result<f64> {
    if grid < 2 {
        return Err(Error::Domain(format!("need at least 2 grid points, got {grid}")));
    }
    let net = heaviside_fit(f, a, b, n)?;
    let step = (b - a) / Rational::from_integer((grid - 1).into());
    let errors: Vec<f64> = (0..grid)
        .into_par_iter()
        .map(|i| {
            let x = a + &step * Rational::from_integer(i.into());
            (sample(f, &x) - net.eval(rational_to_f64(&x))).abs()
        })
        .collect();
    Ok(errors.into_iter().fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthesis::{cubic, PolyTarget};
    use crate::Poly;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn line_with_one_unit() {
        let f = PolyTarget::new("line", Poly::from_integers(&[0, 3]));
        let err = baseline_error(&f, &q(0, 1), &q(1, 1), 1, 1001).unwrap();
        assert!((err - 1.5).abs() < 1e-12);
    }

    #[test]
    fn constants_are_exact() {
        for c in [0, 7] {
            let f = PolyTarget::new("c", Poly::from_integers(&[c]));
            assert_eq!(baseline_error(&f, &q(-1, 1), &q(1, 1), 13, 501).unwrap(), 0.0);
        }
    }

    #[test]
    fn structure() {
        let net = heaviside_fit(&cubic(), &q(-1, 1), &q(1, 1), 4).unwrap();
        assert_eq!(net.count(), 4);
        assert!(net.units.windows(2).all(|w| w[0].0 < w[1].0));
        assert_eq!(net.eval(-2.0), 0.0);
        assert!(heaviside_fit(&cubic(), &q(-1, 1), &q(1, 1), 0).is_err());
    }

    #[test]
    fn cubic_with_512_units() {
        let err = baseline_error(&cubic(), &q(-1, 1), &q(1, 1), 512, 10001).unwrap();
        // Lipschitz constant 16/3 times half the spacing 1/256.
        assert!(err <= 16.0 / 3.0 / 512.0 + 1e-12);
        assert!(err <= 0.05);
    }
}
