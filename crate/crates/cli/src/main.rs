mod bench;
mod input;
mod render;
mod validate;

use std::ffi::OsString;
use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use iterfrac::bell::{partial_bell_exp, partial_bell_ord};
use iterfrac::error::Error;
use iterfrac::iterate::{iterate, Method};
use iterfrac::itlog::{default_form, itlog, ItlogForm, Multiplier};
use iterfrac::qcalc::{q_binomial, q_factorial, QContext};
use iterfrac::scalar::{exact_power_feasible, Exponent, Mode, Scalar, DEFAULT_BITS};
use iterfrac::triangle::{max_rel_dev, CoeffTriangle};

use input::{resolve_mode, SeriesArgs};

const EXPONENT_HELP: &str = "Exponent s: an integer (3, -2), a fraction (1/2), or a \
decimal or complex literal (0.3, 0.3+0.2i, 1e-3). Integers and fractions stay exact; \
decimals switch to numeric mode.";

/// Fractional iteration of formal power series.
#[derive(Parser, Debug)]
#[command(name = "iterfrac", version, about, propagate_version = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Coefficient triangle of the iterate f^s.
    Iterate(IterateArgs),
    /// Coefficients of the iterative logarithm of f.
    Itlog(ItlogArgs),
    /// Partial Bell polynomials of the coefficients of f.
    Bell(BellArgs),
    /// Gaussian binomial coefficient qbinom(s, p).
    Qbinom(QbinomArgs),
    /// q-factorial [n]_q!.
    Qfact(QfactArgs),
    /// Run the cross-check battery and print a pass/fail matrix.
    Validate(ValidateArgs),
    /// Time every method over a grid of orders and exponents.
    Bench(BenchArgs),
}

#[derive(Args, Debug, Clone)]
pub struct Precision {
    /// Arithmetic mode; defaults to exact unless an input is a decimal
    /// or q^s has no exact rational value.
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Mantissa bits in numeric mode.
    #[arg(long, env = "ITERFRAC_BITS", default_value_t = DEFAULT_BITS)]
    pub bits: u32,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeArg {
    Exact,
    Numeric,
}

#[derive(Args, Debug)]
struct IterateArgs {
    #[command(flatten)]
    series: SeriesArgs,
    #[arg(long = "s", allow_hyphen_values = true, help = EXPONENT_HELP)]
    s: String,
    /// Highest row N of the triangle.
    #[arg(long, default_value_t = 8)]
    order: usize,
    /// Formula to use: auto, matrix, monkam, bpp, schroder, jabotinsky,
    /// jabotinsky-alt, extracted, qschroder, tambs, lavoie or qextracted.
    #[arg(long, default_value = "auto", value_parser = parse_method, conflicts_with = "all_methods")]
    method: Method,
    /// Run every applicable method and report the largest discrepancy.
    #[arg(long)]
    all_methods: bool,
    /// Largest relative discrepancy accepted by --all-methods (0 in exact mode).
    #[arg(long)]
    tol: Option<f64>,
    /// Print aligned text instead of JSON.
    #[arg(long)]
    table: bool,
    #[command(flatten)]
    precision: Precision,
}

#[derive(Args, Debug)]
struct ItlogArgs {
    #[command(flatten)]
    series: SeriesArgs,
    #[arg(long, default_value_t = 8)]
    order: usize,
    /// pochhammer, discrete or classical; classical for q = 1 and discrete
    /// otherwise when omitted.
    #[arg(long, value_parser = parse_form)]
    form: Option<ItlogForm>,
    #[arg(long)]
    table: bool,
    #[command(flatten)]
    precision: Precision,
}

#[derive(Args, Debug)]
struct BellArgs {
    #[command(flatten)]
    series: SeriesArgs,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[command(flatten)]
    precision: Precision,
}

#[derive(Args, Debug)]
struct QbinomArgs {
    #[arg(long, allow_hyphen_values = true)]
    q: String,
    #[arg(long = "s", allow_hyphen_values = true, help = EXPONENT_HELP)]
    s: String,
    #[arg(long)]
    p: usize,
    #[command(flatten)]
    precision: Precision,
}

#[derive(Args, Debug)]
struct QfactArgs {
    #[arg(long, allow_hyphen_values = true)]
    q: String,
    #[arg(long)]
    n: usize,
    #[command(flatten)]
    precision: Precision,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    #[arg(long, default_value_t = 8)]
    order: usize,
    /// Relative tolerance for numeric comparisons.
    #[arg(long, default_value_t = 1e-25)]
    tol: f64,
    #[arg(long)]
    table: bool,
    #[arg(long, env = "ITERFRAC_BITS", default_value_t = DEFAULT_BITS)]
    bits: u32,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Largest order in the grid; orders run from 4 in steps of 2.
    #[arg(long, default_value_t = 10)]
    order: usize,
    /// Exponents in the grid, comma separated.
    #[arg(long = "s", default_value = "2,5,1/2", value_delimiter = ',')]
    s: Vec<String>,
    #[arg(long, default_value_t = 1e-25)]
    tol: f64,
    #[arg(long)]
    table: bool,
    #[arg(long, env = "ITERFRAC_BITS", default_value_t = DEFAULT_BITS)]
    bits: u32,
}

fn parse_method(text: &str) -> Result<Method, String> {
    text.parse().map_err(|_| {
        let names: Vec<&str> = Method::ALL.iter().map(|m| m.name()).chain(["auto"]).collect();
        format!("unknown method {text:?}; expected one of {}", names.join(", "))
    })
}

fn parse_form(text: &str) -> Result<ItlogForm, String> {
    text.parse()
        .map_err(|_| format!("unknown form {text:?}; expected pochhammer, discrete or classical"))
}

/// Failure of a subcommand after argument parsing.
#[derive(Debug)]
pub enum Failure {
    Domain(Error),
    /// A check or comparison that ran but did not hold.
    Check(String, String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure::Domain(e)
    }
}

type Outcome = Result<String, Failure>;

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("output is serializable")
}

fn exact_or_numeric(mode: Mode) -> &'static str {
    if mode.is_exact() {
        "exact"
    } else {
        "numeric"
    }
}

#[derive(Serialize)]
struct IterateOut<'a> {
    method: &'a str,
    s: String,
    order: usize,
    mode: &'static str,
    q: Scalar,
    ordinary: Vec<Scalar>,
    exponential: Vec<Scalar>,
    triangle: &'a CoeffTriangle,
}

#[derive(Serialize)]
struct MethodReport {
    method: &'static str,
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_rel_dev: Option<f64>,
}

#[derive(Serialize)]
struct CrossCheckOut {
    s: String,
    order: usize,
    mode: &'static str,
    reference: &'static str,
    tol: f64,
    max_discrepancy: f64,
    agree: bool,
    ordinary: Vec<Scalar>,
    methods: Vec<MethodReport>,
}

fn run_iterate(a: &IterateArgs) -> Outcome {
    let s = Exponent::parse(&a.s, a.precision.bits)?;
    let mut mode = resolve_mode(&a.precision, &a.series, matches!(s, Exponent::Num(_)))?;
    let mut f = a.series.load(a.order, mode)?;
    // q^s irrational: fall back to numeric unless exact was asked for.
    if a.precision.mode.is_none() && mode.is_exact() && !exact_power_feasible(&f.q(), &s) {
        mode = Mode::Numeric(a.precision.bits);
        f = a.series.load(a.order, mode)?;
    }
    if !a.all_methods {
        let t = iterate(&f, &s, a.order, a.method)?;
        if a.table {
            return Ok(render::triangle(&t));
        }
        return Ok(json(&IterateOut {
            method: a.method.name(),
            s: s.to_string(),
            order: a.order,
            mode: exact_or_numeric(mode),
            q: f.q(),
            ordinary: t.ordinary_row(),
            exponential: t.exponential_row(),
            triangle: &t,
        }));
    }

    let reference = iterate(&f, &s, a.order, Method::Auto)?;
    let tol = a.tol.unwrap_or(if mode.is_exact() { 0.0 } else { 1e-25 });
    let mut worst = 0.0f64;
    let mut methods = Vec::new();
    for m in Method::ALL {
        let report = if !m.applicable(&f.q(), &s) {
            MethodReport { method: m.name(), status: "skipped", error: None, max_rel_dev: None }
        } else {
            match iterate(&f, &s, a.order, m) {
                Ok(t) => {
                    let d = max_rel_dev(&t, &reference)?;
                    worst = worst.max(d);
                    MethodReport { method: m.name(), status: "ok", error: None, max_rel_dev: Some(d) }
                }
                Err(e) => MethodReport {
                    method: m.name(),
                    status: "error",
                    error: Some(e.name().to_string()),
                    max_rel_dev: None,
                },
            }
        };
        methods.push(report);
    }
    let out = CrossCheckOut {
        s: s.to_string(),
        order: a.order,
        mode: exact_or_numeric(mode),
        reference: Method::Auto.name(),
        tol,
        max_discrepancy: worst,
        agree: worst <= tol,
        ordinary: reference.ordinary_row(),
        methods,
    };
    let text = if a.table { render::cross_check(&out.methods, worst, tol) } else { json(&out) };
    if out.agree {
        Ok(text)
    } else {
        println!("{text}");
        Err(Failure::Check("Disagreement".into(), format!("max discrepancy {worst:e} exceeds {tol:e}")))
    }
}

#[derive(Serialize)]
struct ItlogOut {
    form: &'static str,
    order: usize,
    mode: &'static str,
    multiplier: Multiplier,
    coeffs: Vec<Scalar>,
    ordinary: Vec<Scalar>,
}

fn run_itlog(a: &ItlogArgs) -> Outcome {
    let mode = resolve_mode(&a.precision, &a.series, false)?;
    let f = a.series.load(a.order, mode)?;
    let form = a.form.unwrap_or_else(|| default_form(&f.q()));
    let r = itlog(&f, a.order, form)?;
    let ordinary = body_ordinary(&r.body, mode);
    if a.table {
        return Ok(render::itlog(&r.multiplier, &r.body, &ordinary));
    }
    Ok(json(&ItlogOut {
        form: form.name(),
        order: a.order,
        mode: exact_or_numeric(mode),
        multiplier: r.multiplier,
        coeffs: r.body,
        ordinary,
    }))
}

/// Body coefficients divided by `n!`, the multiplier still factored out.
fn body_ordinary(body: &[Scalar], mode: Mode) -> Vec<Scalar> {
    let mut fact = Scalar::one(mode);
    body.iter()
        .enumerate()
        .map(|(i, b)| {
            fact *= Scalar::from_i64(mode, i as i64 + 1);
            b / &fact
        })
        .collect()
}

#[derive(Serialize)]
struct BellOut {
    n: usize,
    k: usize,
    exponential: Scalar,
    ordinary: Scalar,
}

fn run_bell(a: &BellArgs) -> Outcome {
    let mode = resolve_mode(&a.precision, &a.series, false)?;
    let order = a.n.saturating_sub(a.k) + 1;
    let f = a.series.load(order, mode)?;
    let exp = f.exponential_coeffs();
    let exponential = partial_bell_exp(a.n, a.k, &exp[1..])?;
    let ordinary = partial_bell_ord(a.n, a.k, &f.coeffs()[1..])?;
    Ok(json(&BellOut { n: a.n, k: a.k, exponential, ordinary }))
}

#[derive(Serialize)]
struct ValueOut {
    q: Scalar,
    value: Scalar,
}

fn scalar_mode(p: &Precision, texts: &[&str]) -> Result<Mode, Failure> {
    let exact = texts
        .iter()
        .all(|t| !t.contains(['.', 'e', 'E', 'i']) && Scalar::parse(t, Mode::Exact).is_ok());
    Ok(match p.mode {
        Some(ModeArg::Exact) => Mode::Exact,
        Some(ModeArg::Numeric) => Mode::Numeric(p.bits),
        None if exact => Mode::Exact,
        None => Mode::Numeric(p.bits),
    })
}

fn run_qbinom(a: &QbinomArgs) -> Outcome {
    let s = Exponent::parse(&a.s, a.precision.bits)?;
    let s_exact = !matches!(s, Exponent::Num(_));
    let mut mode = scalar_mode(&a.precision, &[&a.q])?;
    if !s_exact && a.precision.mode.is_none() {
        mode = Mode::Numeric(a.precision.bits);
    }
    let ctx = QContext::new(Scalar::parse(&a.q, mode)?)?;
    let value = q_binomial(&s, a.p, &ctx)?;
    Ok(json(&ValueOut { q: ctx.q().clone(), value }))
}

fn run_qfact(a: &QfactArgs) -> Outcome {
    let mode = scalar_mode(&a.precision, &[&a.q])?;
    let ctx = QContext::new(Scalar::parse(&a.q, mode)?)?;
    let value = q_factorial(a.n, &ctx)?;
    Ok(json(&ValueOut { q: ctx.q().clone(), value }))
}

fn dispatch(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Iterate(a) => run_iterate(a),
        Command::Itlog(a) => run_itlog(a),
        Command::Bell(a) => run_bell(a),
        Command::Qbinom(a) => run_qbinom(a),
        Command::Qfact(a) => run_qfact(a),
        Command::Validate(a) => validate::run(a.order, a.tol, a.bits, a.table),
        Command::Bench(a) => bench::run(a.order, &a.s, a.tol, a.bits, a.table),
    }
}

/// Prints a usage error followed by the flags of the subcommand involved.
fn usage_error(err: clap::Error, args: &[OsString]) -> ExitCode {
    let _ = err.print();
    let mut cmd = Cli::command();
    let sub = args
        .iter()
        .skip(1)
        .filter_map(|a| a.to_str())
        .find(|a| cmd.find_subcommand(a).is_some())
        .map(str::to_owned);
    let help = match sub {
        Some(name) => cmd.find_subcommand_mut(&name).expect("found above").render_help(),
        None => cmd.render_help(),
    };
    eprintln!("\n{help}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let args: Vec<OsString> = std::env::args_os().collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return usage_error(e, &args),
    };
    match dispatch(&cli) {
        Ok(text) => {
            let mut out = std::io::stdout().lock();
            // A closed pipe (e.g. `| head`) is not an error worth reporting.
            let _ = writeln!(out, "{text}").and_then(|_| out.flush());
            ExitCode::SUCCESS
        }
        Err(Failure::Domain(e)) => {
            eprintln!("{}: {e}", e.name());
            ExitCode::from(1)
        }
        Err(Failure::Check(name, msg)) => {
            eprintln!("{name}: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("Io: {msg}");
            ExitCode::from(1)
        }
    }
}
