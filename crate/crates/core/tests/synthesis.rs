use num_bigint::BigInt;
use num_traits::One;
use proptest::prelude::*;

use sigmanet::sigma::{h_eval, PointSpec, SigmaConfig};
use sigmanet::synthesis::{
    by_name, cubic, exp_partial, synthesize, synthesize_with, Network, PolyTarget, SynthOptions,
    TargetFunction,
};
use sigmanet::{BigReal, Poly, Rational};

const PREC: usize = 128;

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn pow2(e: i64) -> BigReal {
    let r = if e >= 0 {
        Rational::from_integer(BigInt::one() << e as usize)
    } else {
        Rational::new(BigInt::one(), BigInt::one() << (-e) as usize)
    };
    BigReal::from_rational(&r, 4 * PREC)
}

fn unit_cfg() -> SigmaConfig {
    SigmaConfig::new(q(2, 1), q(1, 4)).unwrap()
}

fn net(f: &dyn TargetFunction, eps: &Rational) -> Network {
    synthesize(f, &q(-1, 1), &q(1, 1), eps, &unit_cfg(), PREC).unwrap()
}

fn approximate(f: &dyn TargetFunction, eps: &Rational) -> Network {
    let opts = SynthOptions { exact_polynomials: false, ..SynthOptions::default() };
    synthesize_with(f, &q(-1, 1), &q(1, 1), eps, &unit_cfg(), PREC, &opts).unwrap()
}

#[test]
fn certified_on_the_grid() {
    for name in ["exp-partial", "rational", "sincos"] {
        let f = by_name(name).unwrap();
        for eps in [q(3, 5), q(1, 10)] {
            let n = approximate(f.as_ref(), &eps);
            assert!(n.provenance.rigorous());
            let report = n.verify(f.as_ref(), 2001, PREC).unwrap();
            assert!(report.max_error <= BigReal::from_rational(&eps, PREC), "{name} at {eps}");
        }
    }
}

#[test]
fn polynomial_targets_are_exact() {
    let f = cubic();
    for eps in [q(1, 2), q(1, 1_000_000)] {
        let n = net(&f, &eps);
        let report = n.verify(&f, 2001, PREC).unwrap();
        assert!(report.max_error <= pow2(-(PREC as i64 - 16)));
    }
}

#[test]
fn threshold_structure_and_constant_neuron() {
    let cfg = unit_cfg();
    for name in ["cubic", "rational"] {
        let f = by_name(name).unwrap();
        let n = net(f.as_ref(), &q(1, 10));
        assert_eq!(n.theta2, q(-3, 1));
        // (1 + h(3d)) / 2 with 3d = 6.
        let h = h_eval(&PointSpec::Real(q(6, 1)), &cfg, PREC + 32).unwrap();
        let want = &(&BigReal::one(PREC + 32) + &h) / &BigReal::from_i64(2, PREC + 32);
        let got = n.sigma_theta2_constant(PREC).unwrap();
        assert!((&got - &want.with_prec(PREC)).abs() <= pow2(-(PREC as i64 - 2)));
    }
}

#[test]
fn theta1_follows_the_index() {
    let n = net(&cubic(), &q(1, 100));
    let idx = BigInt::from(n.provenance.n.value().clone());
    assert_eq!(n.theta1.value(), Rational::from_integer(BigInt::from(1) - idx * 4));
}

#[test]
fn c1_times_bn_is_p0() {
    for (f, eps) in [(by_name("cubic").unwrap(), q(1, 100)), (by_name("sincos").unwrap(), q(1, 25))] {
        let n = net(f.as_ref(), &eps);
        let prod = n.c1_times_bn().unwrap();
        let p0 = BigReal::from_rational(&n.provenance.p0, prod.prec());
        let rel = &(&prod - &p0).abs() / &p0.abs();
        assert!(rel <= pow2(-(PREC as i64)), "{}", f.name());
    }
}

#[test]
fn cost_is_monotone_in_eps() {
    let eps = [q(95, 100), q(60, 100), q(35, 100), q(10, 100), q(4, 100), q(1, 100)];
    for name in ["exp-partial", "rational", "sincos"] {
        let f = by_name(name).unwrap();
        let bits: Vec<u64> = eps.iter().map(|e| approximate(f.as_ref(), e).index_bits()).collect();
        assert!(bits.windows(2).all(|w| w[0] <= w[1]), "{name}: {bits:?}");
    }
}

#[test]
fn evaluation_is_precision_robust_for_large_c1() {
    // The exact exp-partial network has a 2.1 million bit index and |c1| > 10^7.
    let n = net(&exp_partial(), &q(1, 100));
    assert!(n.c1_f64().abs() >= 1e6);
    let tol = pow2(-(PREC as i64 - 8));
    for i in 0..200 {
        let x = q(-1, 1) + q(2 * i, 199);
        let lo = n.eval(&x, PREC).unwrap();
        let hi = n.eval(&x, 2 * PREC).unwrap();
        assert!((&lo - &hi.with_prec(PREC)).abs() <= tol, "x = {x}");
    }
}

#[test]
fn json_round_trip_preserves_the_network() {
    let f = by_name("sincos").unwrap();
    let n = approximate(f.as_ref(), &q(1, 10));
    let text = n.to_json();
    let back = Network::from_json(&text).unwrap();
    assert_eq!(back.to_json(), text);
    assert_eq!(back.theta1, n.theta1);
    assert_eq!(back.theta2, n.theta2);
    let a = n.verify(f.as_ref(), 501, PREC).unwrap();
    let b = back.verify(f.as_ref(), 501, PREC).unwrap();
    assert!((&a.max_error - &b.max_error).abs() <= pow2(-(PREC as i64 - 8)));
}

#[test]
fn synthesis_is_deterministic() {
    let f = by_name("rational").unwrap();
    let a = approximate(f.as_ref(), &q(1, 25)).to_json();
    let b = approximate(f.as_ref(), &q(1, 25)).to_json();
    assert_eq!(a, b);
}

#[test]
fn other_intervals_and_zero_target() {
    let f = PolyTarget::new("line", Poly::from_integers(&[1, 2]));
    let cfg = SigmaConfig::new(q(3, 1), q(1, 4)).unwrap();
    let n = synthesize(&f, &q(0, 1), &q(3, 1), &q(1, 100), &cfg, PREC).unwrap();
    assert_eq!(n.theta2, q(-3, 1));
    assert!(n.verify(&f, 301, PREC).unwrap().max_error <= pow2(-(PREC as i64 - 16)));

    let zero = PolyTarget::new("zero", Poly::zero());
    let n = net(&zero, &q(1, 10));
    assert!(n.verify(&zero, 101, PREC).unwrap().max_error.is_zero());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn random_small_polynomials_are_exact(coeffs in proptest::collection::vec((-4i64..=4, 1i64..=3), 1..4)) {
        let p = Poly::new(coeffs.iter().map(|&(n, d)| q(n, d)).collect());
        let f = PolyTarget::new("p", p);
        let n = synthesize(&f, &q(-1, 1), &q(1, 1), &q(1, 10), &unit_cfg(), PREC).unwrap();
        let report = n.verify(&f, 201, PREC).unwrap();
        prop_assert!(report.max_error <= pow2(-(PREC as i64 - 16)));
    }
}
