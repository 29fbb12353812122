//! Command-line front end: σ tables, enumeration queries, synthesis,
//! verification and the Heaviside baseline.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 verification failure,
//! 3 synthesis infeasible.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use num_traits::Zero;

use sigmanet::baseline::baseline_error;
use sigmanet::enumeration::{cw_rational, index_of_poly, poly_at_index};
use sigmanet::format::{decimal_string, fixed, fixed_real, parse_rational};
use sigmanet::sigma::{sigma_eval, sigma_table, PointSpec, SigmaConfig};
use sigmanet::synthesis::{by_name, synthesize_with, Network, PolyTarget, SynthOptions, TargetFunction};
use sigmanet::{BigIndex, BigReal, MonicPoly, Poly, Rational};

#[derive(Parser)]
#[command(name = "sigmanet", version, about = "Two-neuron networks with a fixed sigmoidal activation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate or tabulate the activation σ.
    #[command(subcommand)]
    Sigma(SigmaCommand),
    /// Calkin–Wilf and polynomial enumeration queries.
    #[command(subcommand)]
    Enum(EnumCommand),
    /// Build a two-neuron approximator and certify it on a grid.
    Synth(SynthArgs),
    /// Re-check a saved network against its target.
    Verify(VerifyArgs),
    /// Error of the Heaviside step network with N units.
    Baseline(BaselineArgs),
}

#[derive(Args, Clone)]
struct SigmaParams {
    #[arg(long, default_value = "2", value_parser = rational)]
    d: Rational,
    #[arg(long, default_value = "1/4", value_parser = rational)]
    lambda: Rational,
    #[arg(long, default_value_t = 128)]
    prec: usize,
    /// Decimal places, rounded half to even.
    #[arg(long, default_value_t = 5)]
    places: usize,
}

impl SigmaParams {
    fn config(&self) -> anyhow::Result<SigmaConfig> {
        Ok(SigmaConfig::new(self.d.clone(), self.lambda.clone())?)
    }
}

#[derive(Subcommand)]
enum SigmaCommand {
    Eval {
        #[arg(long, allow_hyphen_values = true, value_parser = rational)]
        x: Rational,
        #[command(flatten)]
        params: SigmaParams,
    },
    /// Values on `from, from + step, …` below `to`.
    Table {
        #[arg(long, allow_hyphen_values = true, value_parser = rational)]
        from: Rational,
        #[arg(long, allow_hyphen_values = true, value_parser = rational)]
        to: Rational,
        #[arg(long, value_parser = rational)]
        step: Rational,
        /// Number of (t, σ) column pairs; rows fill column by column.
        #[arg(long, default_value_t = 1)]
        columns: usize,
        #[command(flatten)]
        params: SigmaParams,
    },
    /// Write a `t,sigma` CSV for plotting.
    Plot {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long, default_value = "0", allow_hyphen_values = true, value_parser = rational)]
        from: Rational,
        #[arg(long, default_value = "20", allow_hyphen_values = true, value_parser = rational)]
        to: Rational,
        #[arg(long, default_value = "1/20", value_parser = rational)]
        step: Rational,
        #[command(flatten)]
        params: SigmaParams,
    },
}

#[derive(Subcommand)]
enum EnumCommand {
    /// The monic polynomial u_n.
    Poly {
        #[arg(long)]
        index: BigIndex,
    },
    /// The index n with u_n equal to the given polynomial.
    Index {
        #[arg(long)]
        poly: MonicPoly,
    },
    /// The Calkin–Wilf rational q_n.
    Cw {
        #[arg(long)]
        index: BigIndex,
    },
}

#[derive(Args)]
struct SynthArgs {
    /// Catalog name (cubic, exp-partial, rational, sincos) or `poly:EXPR`.
    #[arg(long)]
    target: String,
    #[arg(long, default_value = "-1", allow_hyphen_values = true, value_parser = rational)]
    a: Rational,
    #[arg(long, default_value = "1", allow_hyphen_values = true, value_parser = rational)]
    b: Rational,
    #[arg(long, value_parser = rational)]
    eps: Rational,
    /// Interval width of σ; defaults to b - a.
    #[arg(long, value_parser = rational)]
    d: Option<Rational>,
    #[arg(long, default_value = "1/4", value_parser = rational)]
    lambda: Rational,
    #[arg(long, default_value_t = 128)]
    prec: usize,
    #[arg(long, default_value_t = 10001)]
    grid: usize,
    /// Network JSON output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// `x,f,N` CSV of the target and the network.
    #[arg(long)]
    plot: Option<PathBuf>,
    #[arg(long, default_value_t = 401)]
    plot_points: usize,
    /// Approximate polynomial targets instead of representing them exactly.
    #[arg(long)]
    approximate: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    net: PathBuf,
    /// Defaults to the target recorded in the file.
    #[arg(long)]
    target: Option<String>,
    /// Defaults to the budget recorded in the file.
    #[arg(long, value_parser = rational)]
    eps: Option<Rational>,
    #[arg(long, default_value_t = 10001)]
    grid: usize,
    /// Defaults to the precision recorded in the file.
    #[arg(long)]
    prec: Option<usize>,
}

#[derive(Args)]
struct BaselineArgs {
    #[arg(long)]
    target: String,
    /// One or more unit counts.
    #[arg(long, num_args = 1.., required = true)]
    neurons: Vec<usize>,
    #[arg(long, default_value = "-1", allow_hyphen_values = true, value_parser = rational)]
    a: Rational,
    #[arg(long, default_value = "1", allow_hyphen_values = true, value_parser = rational)]
    b: Rational,
    #[arg(long, default_value_t = 10001)]
    grid: usize,
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn rational(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

/// A grid check that came out above the budget.
#[derive(Debug)]
struct VerificationFailed(String);

impl std::fmt::Display for VerificationFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for VerificationFailed {}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<VerificationFailed>().is_some() {
        return 2;
    }
    match err.downcast_ref::<sigmanet::Error>() {
        Some(sigmanet::Error::Infeasible(_)) => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let result = run(cli, &mut out).and_then(|()| Ok(out.flush()?));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = out.flush();
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(cli: Cli, out: &mut impl Write) -> anyhow::Result<()> {
    match cli.command {
        Command::Sigma(cmd) => sigma(cmd, out),
        Command::Enum(cmd) => enumerate(cmd, out),
        Command::Synth(args) => synth(args, out),
        Command::Verify(args) => verify(args, out),
        Command::Baseline(args) => baseline(args, out),
    }
}

fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(BufWriter::new(file))
}

/// Shortest decimal for a grid abscissa, exact when the point is.
fn coordinate(t: &Rational) -> String {
    for places in 1..=12 {
        let text = fixed(t, places);
        if parse_rational(&text).ok().as_ref() == Some(t) {
            return text;
        }
    }
    fixed(t, 12)
}

fn sigma(cmd: SigmaCommand, out: &mut impl Write) -> anyhow::Result<()> {
    match cmd {
        SigmaCommand::Eval { x, params } => {
            let v = sigma_eval(&PointSpec::Real(x), &params.config()?, params.prec)?;
            writeln!(out, "{}", fixed_real(&v, params.places))?;
        }
        SigmaCommand::Table { from, to, step, columns, params } => {
            if columns == 0 {
                bail!("--columns must be at least 1");
            }
            if from >= to {
                bail!("empty range: --from must be below --to");
            }
            let rows = sigma_table(&from, &to, &step, &params.config()?, params.prec)?;
            let cells: Vec<String> = rows
                .iter()
                .map(|(t, v)| format!("{},{}", coordinate(t), fixed_real(v, params.places)))
                .collect();
            writeln!(out, "{}", vec!["t,sigma"; columns].join(","))?;
            let height = cells.len().div_ceil(columns);
            for r in 0..height {
                let line: Vec<&str> =
                    (0..columns).filter_map(|c| cells.get(c * height + r).map(String::as_str)).collect();
                writeln!(out, "{}", line.join(","))?;
            }
        }
        SigmaCommand::Plot { csv, from, to, step, params } => {
            if from >= to {
                bail!("empty range: --from must be below --to");
            }
            let rows = sigma_table(&from, &to, &step, &params.config()?, params.prec)?;
            let mut file = create(&csv)?;
            writeln!(file, "t,sigma")?;
            for (t, v) in &rows {
                writeln!(file, "{},{}", coordinate(t), fixed_real(v, params.places))?;
            }
            file.flush()?;
            writeln!(out, "wrote {} rows to {}", rows.len(), csv.display())?;
        }
    }
    Ok(())
}

fn enumerate(cmd: EnumCommand, out: &mut impl Write) -> anyhow::Result<()> {
    match cmd {
        EnumCommand::Poly { index } => writeln!(out, "{}", poly_at_index(&index)?)?,
        EnumCommand::Index { poly } => writeln!(out, "{}", index_of_poly(&poly)?)?,
        EnumCommand::Cw { index } => {
            let q = cw_rational(&index)?.to_rational();
            let num = decimal_string(q.numer().magnitude());
            let den = decimal_string(q.denom().magnitude());
            writeln!(out, "{num}/{den}")?;
        }
    }
    Ok(())
}

fn target(spec: &str) -> anyhow::Result<Box<dyn TargetFunction>> {
    match spec.strip_prefix("poly:") {
        Some(expr) => {
            let p: Poly = expr.parse()?;
            Ok(Box::new(PolyTarget::new(spec, p)))
        }
        None => Ok(by_name(spec)?),
    }
}

/// `1.234567e-8` style, six significant decimals.
fn error_text(e: &BigReal) -> String {
    if e.is_zero() {
        return "0".into();
    }
    format!("{:.6e}", e.to_f64())
}

fn synth(args: SynthArgs, out: &mut impl Write) -> anyhow::Result<()> {
    let f = target(&args.target)?;
    if args.a >= args.b {
        bail!("empty interval: --a must be below --b");
    }
    let width = &args.b - &args.a;
    let cfg = SigmaConfig::new(args.d.unwrap_or(width), args.lambda.clone())?;
    let opts = SynthOptions {
        exact_polynomials: !args.approximate,
        ..SynthOptions::default()
    };
    let net = synthesize_with(f.as_ref(), &args.a, &args.b, &args.eps, &cfg, args.prec, &opts)?;
    if let Some(path) = &args.out {
        let mut file = create(path)?;
        file.write_all(net.to_json().as_bytes())?;
        writeln!(file)?;
        file.flush()?;
    }
    let report = net.verify(f.as_ref(), args.grid, args.prec)?;
    writeln!(out, "neurons,c1,c2,theta1,theta2,max_error")?;
    writeln!(
        out,
        "2,{},{},{},{},{}",
        fixed_real(&net.c1, 6),
        fixed_real(&net.c2, 6),
        net.theta1.display(6),
        net.theta2,
        error_text(&report.max_error)
    )?;
    let p = &net.provenance;
    writeln!(
        out,
        "# index bits {}, degree {}, {}",
        p.n.bits(),
        p.degree,
        if p.rigorous() { "rigorous tail bound" } else { "grid-checked only" }
    )?;
    if let Some(path) = &args.plot {
        plot(&net, f.as_ref(), &args.a, &args.b, args.plot_points, args.prec, path)?;
    }
    check(&report.max_error, &args.eps)
}

fn plot(
    net: &Network,
    f: &dyn TargetFunction,
    a: &Rational,
    b: &Rational,
    points: usize,
    prec: usize,
    path: &Path,
) -> anyhow::Result<()> {
    if points < 2 {
        bail!("--plot-points must be at least 2");
    }
    let step = (b - a) / Rational::from_integer((points - 1).into());
    let mut file = create(path)?;
    writeln!(file, "x,f,N")?;
    for i in 0..points {
        let x = a + &step * Rational::from_integer(i.into());
        let fx = f.eval(&x, prec);
        let nx = net.eval(&x, prec)?;
        writeln!(file, "{},{},{}", coordinate(&x), fixed_real(&fx, 10), fixed_real(&nx, 10))?;
    }
    Ok(file.flush()?)
}

fn check(max_error: &BigReal, eps: &Rational) -> anyhow::Result<()> {
    let bound = BigReal::from_rational(eps, max_error.prec());
    if max_error > &bound {
        return Err(VerificationFailed(format!(
            "max error {} exceeds eps {}",
            error_text(max_error),
            eps
        ))
        .into());
    }
    Ok(())
}

fn verify(args: VerifyArgs, out: &mut impl Write) -> anyhow::Result<()> {
    let text = std::fs::read_to_string(&args.net)
        .with_context(|| format!("cannot read {}", args.net.display()))?;
    let net = Network::from_json(&text)?;
    let name = args.target.unwrap_or_else(|| net.provenance.target.clone());
    let f = target(&name)?;
    let eps = args.eps.unwrap_or_else(|| net.provenance.eps.clone());
    let prec = args.prec.unwrap_or(net.prec());
    let report = net.verify(f.as_ref(), args.grid, prec)?;
    writeln!(out, "target,points,max_error,argmax,eps")?;
    writeln!(
        out,
        "{name},{},{},{},{eps}",
        report.points,
        error_text(&report.max_error),
        coordinate(&report.argmax)
    )?;
    check(&report.max_error, &eps)
}

fn baseline(args: BaselineArgs, out: &mut impl Write) -> anyhow::Result<()> {
    let f = target(&args.target)?;
    if args.neurons.iter().any(Zero::is_zero) {
        bail!("--neurons must be positive");
    }
    let mut rows = Vec::new();
    for &n in &args.neurons {
        let err = baseline_error(f.as_ref(), &args.a, &args.b, n, args.grid)?;
        rows.push(format!("{n},{err:.6}"));
    }
    writeln!(out, "neurons,max_error")?;
    for row in &rows {
        writeln!(out, "{row}")?;
    }
    if let Some(path) = &args.csv {
        let mut file = create(path)?;
        writeln!(file, "neurons,max_error")?;
        for row in &rows {
            writeln!(file, "{row}")?;
        }
        file.flush()?;
    }
    Ok(())
}
