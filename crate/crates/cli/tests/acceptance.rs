//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines are always printed; exits non-zero if any fails.

use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sigmanet::baseline::baseline_error;
use sigmanet::enumeration::{cw_index, cw_rational, index_of_poly, poly_at_index};
use sigmanet::sigma::{h_eval, piece, piece_info, sigma_eval, transition_half, Half, PointSpec, SigmaConfig};
use sigmanet::synthesis::{by_name, cubic, exp_partial, synthesize, Network, PolyTarget, TargetFunction};
use sigmanet::{BigIndex, BigReal, MonicPoly, Poly, Rational};

const PREC: usize = 128;

const TABLE1: [(&str, &str); 50] = [
    ("0.0", "0.37462"), ("0.4", "0.44248"), ("0.8", "0.53832"), ("1.2", "0.67932"), ("1.6", "0.87394"),
    ("2.0", "0.95210"), ("2.4", "0.95210"), ("2.8", "0.95210"), ("3.2", "0.95210"), ("3.6", "0.95210"),
    ("4.0", "0.95210"), ("4.4", "0.95146"), ("4.8", "0.95003"), ("5.2", "0.95003"), ("5.6", "0.94924"),
    ("6.0", "0.94787"), ("6.4", "0.94891"), ("6.8", "0.95204"), ("7.2", "0.95725"), ("7.6", "0.96455"),
    ("8.0", "0.97394"), ("8.4", "0.96359"), ("8.8", "0.96359"), ("9.2", "0.96314"), ("9.6", "0.95312"),
    ("10.0", "0.95325"), ("10.4", "0.95792"), ("10.8", "0.96260"), ("11.2", "0.96727"), ("11.6", "0.97195"),
    ("12.0", "0.97662"), ("12.4", "0.97848"), ("12.8", "0.97233"), ("13.2", "0.97204"), ("13.6", "0.97061"),
    ("14.0", "0.96739"), ("14.4", "0.96565"), ("14.8", "0.96478"), ("15.2", "0.96478"), ("15.6", "0.96565"),
    ("16.0", "0.96739"), ("16.4", "0.96309"), ("16.8", "0.96309"), ("17.2", "0.96307"), ("17.6", "0.96067"),
    ("18.0", "0.95879"), ("18.4", "0.95962"), ("18.8", "0.96209"), ("19.2", "0.96621"), ("19.6", "0.97198"),
];

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn pow2(e: i64, prec: usize) -> BigReal {
    let r = if e >= 0 {
        Rational::from_integer(BigInt::one() << e as usize)
    } else {
        Rational::new(BigInt::one(), BigInt::one() << (-e) as usize)
    };
    BigReal::from_rational(&r, prec)
}

fn cfg() -> SigmaConfig {
    SigmaConfig::new(q(2, 1), q(1, 4)).unwrap()
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

/// Runs the checks of one criterion, collecting the failed ones.
struct Checks(Vec<String>);

impl Checks {
    fn new() -> Self {
        Checks(Vec::new())
    }

    fn check(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.0.push(what.into());
        }
    }

    fn finish(self, summary: String) -> Outcome {
        if self.0.is_empty() {
            outcome(true, summary)
        } else {
            outcome(false, format!("{summary}; failed: {}", self.0.join("; ")))
        }
    }
}

fn table1() -> Outcome {
    let exe = env!("CARGO_BIN_EXE_sigmanet");
    let args = ["sigma", "table", "--from", "0", "--to", "20", "--step", "0.4", "--d", "2", "--lambda", "1/4"];
    let start = Instant::now();
    let run = Command::new(exe).args(args).output().expect("binary runs");
    let elapsed = start.elapsed();
    let mut c = Checks::new();
    c.check(run.status.success(), "exit status");
    let text = String::from_utf8_lossy(&run.stdout);
    let rows: Vec<(String, String)> = text
        .lines()
        .skip(1)
        .filter_map(|l| l.split_once(',').map(|(t, s)| (t.to_string(), s.to_string())))
        .collect();
    c.check(rows.len() == 50, format!("{} rows", rows.len()));
    let mut matched = 0;
    for ((t, want), (got_t, got)) in TABLE1.iter().zip(&rows) {
        if t == got_t && want == got {
            matched += 1;
        } else {
            c.check(false, format!("σ({t}) = {got}, published {want}"));
        }
    }
    c.check(elapsed < Duration::from_secs(1), format!("runtime {elapsed:?}"));
    c.finish(format!("{matched}/50 values match, runtime {:.3} s", elapsed.as_secs_f64()))
}

fn cubic_exact() -> Outcome {
    let f = cubic();
    let net = synthesize(&f, &q(-1, 1), &q(1, 1), &q(1, 100), &cfg(), PREC).unwrap();
    let c1 = net.c1.to_f64();
    let c2 = net.c2.to_f64();
    let report = net.verify(&f, 10001, PREC).unwrap();
    let mut c = Checks::new();
    c.check(net.theta1.value() == q(-467, 1), format!("θ1 = {} (expected -467)", net.theta1.display(6)));
    c.check(net.theta2 == q(-3, 1), format!("θ2 = {}", net.theta2));
    c.check((c1 - 2059.373597).abs() <= 1e-5, format!("c1 = {c1:.6} (expected 2059.373597)"));
    c.check((c2 + 2120.974727).abs() <= 1e-4, format!("c2 = {c2:.6} (expected -2120.974727)"));
    let max = report.max_error.to_f64();
    c.check(max <= 1e-20, format!("max error {max:e}"));
    c.finish(format!(
        "n = {}, θ1 = {}, θ2 = {}, c1 = {c1:.6}, c2 = {c2:.6}, max error {max:.3e}",
        net.provenance.n,
        net.theta1.display(6),
        net.theta2
    ))
}

fn self_certified() -> Outcome {
    let start = Instant::now();
    let eps = [q(95, 100), q(60, 100), q(35, 100), q(10, 100), q(4, 100), q(1, 100)];
    let thousand = Rational::from_integer(1000.into());
    let mut c = Checks::new();
    let mut summary = Vec::new();
    for name in ["exp-partial", "rational", "sincos"] {
        let f = by_name(name).unwrap();
        let mut magnitudes: Vec<(i64, f64)> = Vec::new();
        for e in &eps {
            let net = match synthesize(f.as_ref(), &q(-1, 1), &q(1, 1), e, &cfg(), PREC) {
                Ok(n) => n,
                Err(err) => {
                    c.check(false, format!("{name} at {e}: {err}"));
                    continue;
                }
            };
            let back = Network::from_json(&net.to_json()).unwrap();
            let report = back.verify(f.as_ref(), 10001, PREC).unwrap();
            c.check(
                report.max_error <= BigReal::from_rational(e, PREC),
                format!("{name} at {e}: max error {:e}", report.max_error.to_f64()),
            );
            c.check(back.theta2 == q(-3, 1), format!("{name} at {e}: θ2 = {}", back.theta2));
            let theta = back.theta1.value();
            let sci = back.theta1.scientific(4);
            if num_traits::Signed::abs(&theta) < thousand {
                c.check(false, format!("{name} at {e}: |θ1| = {} < 10^3", back.theta1.display(4).trim_start_matches('-')));
            }
            magnitudes.push((sci.exp10, sci.mantissa.parse::<f64>().unwrap()));
        }
        if magnitudes.windows(2).any(|w| w[1] < w[0]) {
            c.check(false, format!("{name}: |θ1| decreases as ε shrinks"));
        }
        let row: Vec<String> = magnitudes.iter().map(|(e, m)| format!("{m}e{e}")).collect();
        summary.push(format!("{name} |θ1| {}", row.join(" ")));
    }
    let elapsed = start.elapsed();
    c.check(elapsed < Duration::from_secs(300), format!("runtime {elapsed:?}"));
    c.finish(format!("18 networks of 2 neurons in {:.1} s; {}", elapsed.as_secs_f64(), summary.join("; ")))
}

/// `q_1 = 1`, `q_{n+1} = 1 / (2⌊q_n⌋ - q_n + 1)`.
fn cw_oracle(count: usize) -> Vec<Rational> {
    let mut out = vec![Rational::zero()];
    let mut cur = Rational::one();
    for _ in 0..count {
        out.push(cur.clone());
        cur = (cur.floor() * q(2, 1) - &cur + Rational::one()).recip();
    }
    out
}

fn enumeration() -> Outcome {
    let start = Instant::now();
    let mut c = Checks::new();
    let listed = ["1", "x^2", "x", "x^2 - x", "x^2 - 1", "x^3", "x - 1", "x^2 + x"];
    for (i, text) in listed.iter().enumerate() {
        let want: MonicPoly = text.parse().unwrap();
        let got = poly_at_index(&BigIndex::from(i as u64 + 1)).unwrap();
        c.check(got == want, format!("u_{} = {got}", i + 1));
    }
    let cw = cw_oracle(100_000);
    let mut bad_cw = 0;
    let mut bad_trip = 0;
    for (n, want) in cw.iter().enumerate().skip(1) {
        let idx = BigIndex::from(n as u64);
        if &cw_rational(&idx).unwrap().to_rational() != want {
            bad_cw += 1;
        }
        if index_of_poly(&poly_at_index(&idx).unwrap()).unwrap() != idx {
            bad_trip += 1;
        }
    }
    c.check(bad_cw == 0, format!("{bad_cw} Calkin–Wilf mismatches"));
    c.check(bad_trip == 0, format!("{bad_trip} round-trip failures up to 10^5"));
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut bad_big = 0;
    for _ in 0..100 {
        let mut bytes = vec![0u8; 1250];
        rng.fill_bytes(&mut bytes);
        bytes[1249] |= 0x80;
        let idx = BigIndex::new(BigUint::from_bytes_le(&bytes));
        let u = poly_at_index(&idx).unwrap();
        let cf = cw_rational(&idx).unwrap();
        if index_of_poly(&u).unwrap() != idx || cw_index(&cf.to_rational()).unwrap() != idx {
            bad_big += 1;
        }
    }
    c.check(bad_big == 0, format!("{bad_big} of 100 random 10^4-bit indices fail"));
    let elapsed = start.elapsed();
    c.check(elapsed < Duration::from_secs(30), format!("runtime {elapsed:?}"));
    c.finish(format!("round trips and Calkin–Wilf oracle up to 10^5, 100 random 10^4-bit indices, {:.1} s", elapsed.as_secs_f64()))
}

fn centred_difference(t: &Rational, h: &Rational, k: usize) -> f64 {
    let stencil: &[(i64, i64)] = match k {
        1 => &[(1, 1), (-1, -1)],
        2 => &[(2, 1), (0, -2), (-2, 1)],
        _ => &[(3, 1), (1, -3), (-1, 3), (-3, -1)],
    };
    let mut sum = BigReal::zero(PREC);
    for &(shift, w) in stencil {
        let x = t + h * q(shift, 2);
        let s = sigma_eval(&PointSpec::Real(x), &cfg(), PREC).unwrap();
        sum = &sum + &s.mul_rational(&Rational::from_integer(w.into()));
    }
    let mut v = sum;
    for _ in 0..k {
        v = v.mul_rational(&h.clone().recip());
    }
    v.to_f64().abs()
}

fn sigma_suite() -> Outcome {
    let c0 = cfg();
    let d = c0.d().clone();
    let at = |index: i64, offset: Rational| PointSpec::Interval { index: index.into(), offset };
    let eval = |p: &PointSpec| sigma_eval(p, &c0, PREC).unwrap();
    let mut c = Checks::new();

    let one = BigReal::one(PREC);
    let three = BigReal::from_i64(3, PREC);
    let slack = pow2(-120, PREC);
    let mut chain_bad = 0;
    for n in 1..=200i64 {
        let m = piece(&BigIndex::from(n as u64), &c0, PREC).unwrap().m.with_prec(PREC);
        let lower = &(&one + &(&m + &m)) / &three;
        let upper = &(&BigReal::from_i64(2, PREC) + &m) / &three;
        for j in 0..100 {
            let x = at(2 * n - 1, &d * q(j, 99));
            let s = eval(&x);
            let h = h_eval(&x, &c0, PREC).unwrap();
            let ok = h < m && m < lower && &lower - &slack <= s && s <= &upper + &slack && upper < one;
            if !ok {
                chain_bad += 1;
            }
        }
    }
    c.check(chain_bad == 0, format!("bound chain fails at {chain_bad} points"));

    let lam = BigReal::from_rational(&c0.lambda_eff(), PREC);
    let mut close_bad = 0;
    for i in 0..4000 {
        let t = PointSpec::Real(q(2, 1) + q(398 * i, 3999));
        if (&eval(&t) - &h_eval(&t, &c0, PREC).unwrap()).abs() > lam {
            close_bad += 1;
        }
    }
    c.check(close_bad == 0, format!("|σ - h| > λ at {close_bad} points of [d, 200d]"));

    let mut prev = eval(&PointSpec::Real(q(-40, 1)));
    let mut mono_bad = 0;
    for i in 1..800 {
        let s = eval(&PointSpec::Real(q(-40, 1) + q(21 * i, 400)));
        if s <= prev {
            mono_bad += 1;
        }
        prev = s;
    }
    c.check(mono_bad == 0, format!("left tail not increasing at {mono_bad} points"));

    let tol = pow2(-120, PREC);
    let mut worst = BigReal::zero(PREC);
    let half_d = &d * q(1, 2);
    for n in 1..=60i64 {
        let idx = BigIndex::from(n as u64);
        let info = piece_info(&idx, &c0, PREC).unwrap();
        let first = |s: &Rational| transition_half(&idx, Half::First, s, &c0, PREC).unwrap();
        let second = |s: &Rational| transition_half(&idx, Half::Second, s, &c0, PREC).unwrap();
        let k = info.k.with_prec(PREC);
        let pairs = [
            (info.piece.value(&Rational::one()).with_prec(PREC), first(&Rational::zero())),
            (first(&info.delta), k.clone()),
            (first(&half_d), second(&half_d)),
            (second(&(&d - &info.delta_bar)), k),
            (second(&d), info.next.value(&Rational::zero()).with_prec(PREC)),
            (eval(&at(2 * n - 1, d.clone())), eval(&at(2 * n, Rational::zero()))),
        ];
        for (x, y) in &pairs {
            worst = worst.max(&(x - y).abs());
        }
    }
    let tail = eval(&PointSpec::Real(q(2, 1) - Rational::new(BigInt::one(), BigInt::one() << 200)));
    worst = worst.max(&(&tail - &eval(&PointSpec::Real(q(2, 1)))).abs());
    c.check(worst <= tol, format!("knot jump {:e}", worst.to_f64()));

    let mut fd_bad = Vec::new();
    let junctions = [q(2, 1), q(5, 1), q(9, 1), q(13, 1)];
    for t in &junctions {
        for k in 1..=3 {
            let diffs: Vec<f64> =
                [q(1, 8), q(1, 32), q(1, 128)].iter().map(|h| centred_difference(t, h, k)).collect();
            if !(diffs[2] <= diffs[0] && diffs[2] < 1e-6) {
                fd_bad.push(format!("t={t} order {k}: {diffs:?}"));
            }
        }
    }
    c.check(fd_bad.is_empty(), format!("finite differences {}", fd_bad.join(", ")));
    c.finish(format!(
        "bound chain 20000 points, λ-closeness 4000, tail monotone 800, max knot jump {:.2e}, flat junctions",
        worst.to_f64()
    ))
}

fn cancellation() -> Outcome {
    let one = PolyTarget::new("one", Poly::constant(Rational::one()));
    let mut c = Checks::new();
    let mut notes = Vec::new();
    for (name, f) in [("constant 1", &one as &dyn TargetFunction), ("exp-partial", &exp_partial())] {
        let net = synthesize(f, &q(-1, 1), &q(1, 1), &q(1, 100), &cfg(), PREC).unwrap();
        let tol = pow2(-(PREC as i64 - 8), 2 * PREC);
        let mut worst = BigReal::zero(2 * PREC);
        for i in 0..1000 {
            let x = q(-1, 1) + q(2 * i, 999);
            let lo = net.eval(&x, PREC).unwrap().with_prec(2 * PREC);
            let hi = net.eval(&x, 2 * PREC).unwrap();
            worst = worst.max(&(&lo - &hi).abs());
        }
        c.check(worst <= tol, format!("{name}: disagreement {:e}", worst.to_f64()));
        notes.push(format!("{name} |c1| = {:.3e}, worst {:.2e}", net.c1_f64().abs(), worst.to_f64()));
        if name == "exp-partial" {
            c.check(net.c1_f64().abs() >= 1e6, format!("|c1| = {:e} below 10^6", net.c1_f64()));
        }
    }
    c.finish(notes.join("; "))
}

fn baseline() -> Outcome {
    let f = cubic();
    let mut c = Checks::new();
    let counts = [8usize, 16, 32, 64, 128, 256, 512];
    let errs: Vec<f64> =
        counts.iter().map(|&n| baseline_error(&f, &q(-1, 1), &q(1, 1), n, 10001).unwrap()).collect();
    c.check(errs.windows(2).all(|w| w[1] < w[0]), format!("not strictly decreasing: {errs:?}"));
    let net = synthesize(&f, &q(-1, 1), &q(1, 1), &q(1, 100), &cfg(), PREC).unwrap();
    let two = net.verify(&f, 10001, PREC).unwrap().max_error.to_f64();
    let last = *errs.last().unwrap();
    c.check(two < last, format!("2-neuron error {two:e} not below 512-unit error {last}"));
    let row: Vec<String> = counts.iter().zip(&errs).map(|(n, e)| format!("{n}:{e:.6}")).collect();
    c.finish(format!("step errors {}; 2-neuron error {two:.2e}", row.join(" ")))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 7] = [
        ("Reference σ values", table1),
        ("Cubic exact representation", cubic_exact),
        ("Self-certified ε-approximation", self_certified),
        ("Enumeration correctness", enumeration),
        ("σ property suite", sigma_suite),
        ("Cancellation robustness", cancellation),
        ("Baseline contrast", baseline),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        if !o.pass {
            failed += 1;
        }
        println!("{tag} [{}] {name}: {}", i + 1, o.detail);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
