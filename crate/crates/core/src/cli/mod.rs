//! Command-line front end. Reports go to stdout as JSON, a one-line summary
//! goes to stderr, and the exit code follows [`Error::exit_code`] with 0 for
//! success or membership and 1 for non-membership.

mod bench;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Map, Value};

use crate::algebra::{self, AlgebraOptions};
use crate::error::{Error, Result};
use crate::genfun::{default_power_exponent, GenFunVariant, GeneratorSet, Scale};
use crate::instance::{format_grid, read_candidate, Field, Instance, InstanceFile, ParseEntry};
use crate::linalg::{Matrix, Tolerance};
use crate::modp;
use crate::scalar::Scalar;

pub use bench::{BenchArgs, BenchRow, CSV_HEADER};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NON_MEMBER: i32 = 1;
pub const EXIT_DISAGREEMENT: i32 = 6;

/// Environment variable capping the worker pool size.
pub const THREADS_ENV: &str = "ALGEBRAGEN_THREADS";

#[derive(Debug, Parser)]
#[command(name = "algebragen", version, about = "Dimension, basis and membership for generated matrix algebras")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dimension of the generated algebra.
    Dim {
        instance: PathBuf,
        #[command(flatten)]
        opts: PathOpts,
    },
    /// Whether a candidate matrix lies in the algebra.
    Member {
        generators: PathBuf,
        candidate: PathBuf,
        #[command(flatten)]
        opts: PathOpts,
        /// Attach a word certificate from the word-span oracle.
        #[arg(long)]
        certificate: bool,
    },
    /// A basis of the algebra.
    Basis {
        instance: PathBuf,
        #[command(flatten)]
        opts: PathOpts,
    },
    /// Intersection of two generated algebras.
    Intersect {
        a: PathBuf,
        b: PathBuf,
        #[command(flatten)]
        opts: PathOpts,
    },
    /// Exact dimension of an integer (or rational) instance via random primes.
    #[command(name = "modp-dim")]
    ModpDim {
        instance: PathBuf,
        #[arg(long)]
        nonunital: bool,
        #[arg(long, default_value_t = modp::DEFAULT_TRIALS)]
        trials: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// Use this prime for the first trial.
        #[arg(long)]
        prime: Option<u64>,
    },
    /// Time the generating-matrix method against the word-span oracle.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Args)]
pub struct PathOpts {
    /// Treat the generators as non-unital (no identity word).
    #[arg(long)]
    pub nonunital: bool,
    /// Rank cutoff and membership residual tolerance (approximate fields).
    #[arg(long)]
    pub tol: Option<f64>,
    /// Skip automatic rescaling; fails unless some norm of the Kronecker sum is below 1.
    #[arg(long)]
    pub no_rescale: bool,
    /// Use the truncated power form with exponent K (default from n).
    #[arg(long, num_args = 0..=1, value_name = "K")]
    pub power: Option<Option<usize>>,
    /// Override the field: f64, c64, rational or gfp:<p>.
    #[arg(long, value_parser = parse_field)]
    pub field: Option<Field>,
}

fn parse_field(s: &str) -> std::result::Result<Field, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Result of one command before printing.
pub struct Outcome {
    pub report: Value,
    pub summary: String,
    pub code: i32,
    /// Replaces the JSON report on stdout (CSV output).
    pub stdout: Option<String>,
}

impl Outcome {
    fn ok(report: Value, summary: String) -> Self {
        Outcome {
            report,
            summary,
            code: EXIT_OK,
            stdout: None,
        }
    }
}

pub fn run() -> i32 {
    run_from(std::env::args_os())
}

pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    configure_threads();
    let name = command_name(&cli.command);
    let start = Instant::now();
    match execute(&cli.command) {
        Ok(mut out) => {
            if let Value::Object(map) = &mut out.report {
                map.insert("seconds".into(), json!(start.elapsed().as_secs_f64()));
            }
            match &out.stdout {
                Some(text) => print!("{text}"),
                None => println!("{}", serde_json::to_string_pretty(&out.report).expect("json")),
            }
            eprintln!("{}", out.summary);
            out.code
        }
        Err(e) => {
            let code = e.exit_code();
            let report = json!({ "command": name, "error": e.to_string(), "exit_code": code });
            println!("{}", serde_json::to_string_pretty(&report).expect("json"));
            eprintln!("error: {e}");
            code
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        if n > 0 {
            // Fails only if a pool already exists, which is harmless here.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Dim { .. } => "dim",
        Command::Member { .. } => "member",
        Command::Basis { .. } => "basis",
        Command::Intersect { .. } => "intersect",
        Command::ModpDim { .. } => "modp-dim",
        Command::Bench(_) => "bench",
    }
}

pub fn execute(command: &Command) -> Result<Outcome> {
    match command {
        Command::Dim { instance, opts } => cmd_dim(instance, opts),
        Command::Member {
            generators,
            candidate,
            opts,
            certificate,
        } => cmd_member(generators, candidate, opts, *certificate),
        Command::Basis { instance, opts } => cmd_basis(instance, opts),
        Command::Intersect { a, b, opts } => cmd_intersect(a, b, opts),
        Command::ModpDim {
            instance,
            nonunital,
            trials,
            seed,
            prime,
        } => cmd_modp_dim(instance, *nonunital, *trials, *seed, *prime),
        Command::Bench(args) => bench::cmd_bench(args),
    }
}

pub(crate) fn load(path: &Path, field: Option<Field>, nonunital: bool) -> Result<Instance> {
    InstanceFile::read(path)?.resolve(field, nonunital.then_some(false))
}

fn algebra_options(opts: &PathOpts, n: usize, prime_scale: Option<BigInt>) -> AlgebraOptions {
    let variant = opts
        .power
        .map(|k| GenFunVariant::PowerForm(k.unwrap_or_else(|| default_power_exponent(n))));
    let scale = match (opts.no_rescale, prime_scale) {
        (true, _) => Scale::None,
        (false, Some(b)) => Scale::Explicit(BigRational::from_integer(b)),
        (false, None) => Scale::Auto,
    };
    let tol = match opts.tol {
        Some(t) => Tolerance {
            rank: Some(t),
            residual: t,
        },
        None => Tolerance::default(),
    };
    AlgebraOptions { variant, scale, tol }
}

/// Runs `$body` with `$gs` bound to the typed generator set.
macro_rules! with_set {
    ($inst:expr, $gs:ident => $body:expr) => {
        match $inst {
            Instance::F64($gs) => $body,
            Instance::C64($gs) => $body,
            Instance::Rational($gs) => $body,
            Instance::Gfp { set: $gs, .. } => $body,
        }
    };
}
pub(crate) use with_set;

fn header(command: &str, inputs: &[&Path], inst: &Instance) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("command".into(), json!(command));
    m.insert(
        "inputs".into(),
        json!(inputs.iter().map(|p| p.display().to_string()).collect::<Vec<_>>()),
    );
    m.insert("field".into(), json!(inst.field().to_string()));
    m.insert("n".into(), json!(inst.n()));
    m.insert("unital".into(), json!(inst.unital()));
    m
}

fn tolerance_fields(m: &mut Map<String, Value>, opts: &AlgebraOptions) {
    m.insert("rank_tol_requested".into(), json!(opts.tol.rank));
    m.insert("residual_tol".into(), json!(opts.tol.residual));
}

fn p_fields<T: Scalar>(m: &mut Map<String, Value>, gs: &GeneratorSet<T>, opts: &AlgebraOptions) -> Result<usize> {
    let rep = algebra::generating_matrix(gs, opts)?;
    m.insert("dimension".into(), json!(rep.rank));
    m.insert("variant".into(), json!(rep.variant));
    m.insert("scale".into(), json!(rep.scale.to_string()));
    m.insert("rank_tol".into(), json!(rep.tol));
    m.insert("conditioning_flag".into(), json!(rep.conditioning_flag));
    m.insert("singular_values".into(), json!(rep.spectrum_summary));
    Ok(rep.rank)
}

fn cmd_dim(path: &Path, opts: &PathOpts) -> Result<Outcome> {
    let inst = load(path, opts.field, opts.nonunital)?;
    let aopts = algebra_options(opts, inst.n(), inst.prime_scale()?);
    let mut m = header("dim", &[path], &inst);
    tolerance_fields(&mut m, &aopts);
    let dim = with_set!(&inst, gs => p_fields(&mut m, gs, &aopts))?;
    Ok(Outcome::ok(Value::Object(m), format!("dimension {dim}")))
}

fn max_abs_diff<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>) -> Result<f64> {
    Ok(a.sub(b)?.data().iter().map(|x| x.magnitude()).fold(0.0, f64::max))
}

fn member_fields<T: ParseEntry>(
    m: &mut Map<String, Value>,
    gs: &GeneratorSet<T>,
    candidate: &Path,
    opts: &AlgebraOptions,
    want_certificate: bool,
) -> Result<bool> {
    let z = read_candidate::<T>(candidate, gs.n(), gs.ctx())?;
    let res = algebra::membership_with(gs, &z, want_certificate, opts)?;
    m.insert("member".into(), json!(res.member));
    m.insert("residual".into(), json!(res.residual));
    if let Some(cert) = &res.certificate {
        let err = max_abs_diff(&cert.evaluate(gs)?, &z)?;
        let scale = z.data().iter().map(|x| x.magnitude()).fold(1.0, f64::max);
        let verified = if T::EXACT { err == 0.0 } else { err <= opts.tol.residual * scale };
        m.insert("certificate".into(), json!(cert.to_terms()));
        m.insert("certificate_verified".into(), json!(verified));
        m.insert("certificate_max_error".into(), json!(err));
    }
    if let Some(e) = &res.certificate_error {
        m.insert("certificate_error".into(), json!(e));
    }
    Ok(res.member)
}

fn cmd_member(gens: &Path, candidate: &Path, opts: &PathOpts, certificate: bool) -> Result<Outcome> {
    let inst = load(gens, opts.field, opts.nonunital)?;
    let aopts = algebra_options(opts, inst.n(), inst.prime_scale()?);
    let mut m = header("member", &[gens, candidate], &inst);
    tolerance_fields(&mut m, &aopts);
    let member = with_set!(&inst, gs => member_fields(&mut m, gs, candidate, &aopts, certificate))?;
    let mut out = Outcome::ok(
        Value::Object(m),
        if member { "member".into() } else { "not a member".into() },
    );
    if !member {
        out.code = EXIT_NON_MEMBER;
    }
    Ok(out)
}

fn basis_fields<T: Scalar>(m: &mut Map<String, Value>, b: &algebra::AlgebraBasis<T>) {
    m.insert("dimension".into(), json!(b.dim));
    m.insert("source".into(), json!(b.source));
    m.insert(
        "basis".into(),
        json!(b.basis.iter().map(format_grid).collect::<Vec<_>>()),
    );
}

fn cmd_basis(path: &Path, opts: &PathOpts) -> Result<Outcome> {
    let inst = load(path, opts.field, opts.nonunital)?;
    let aopts = algebra_options(opts, inst.n(), inst.prime_scale()?);
    let mut m = header("basis", &[path], &inst);
    tolerance_fields(&mut m, &aopts);
    let dim = with_set!(&inst, gs => {
        let b = algebra::basis_with(gs, &aopts)?;
        basis_fields(&mut m, &b);
        b.dim
    });
    Ok(Outcome::ok(Value::Object(m), format!("{dim} basis matrices")))
}

fn cmd_intersect(a: &Path, b: &Path, opts: &PathOpts) -> Result<Outcome> {
    let ia = load(a, opts.field, opts.nonunital)?;
    let ib = load(b, opts.field, opts.nonunital)?;
    if ia.field() != ib.field() {
        return Err(Error::Parse(format!("fields differ: {} vs {}", ia.field(), ib.field())));
    }
    // Any common scale above both bounds is valid for both sides.
    let scale = match (ia.prime_scale()?, ib.prime_scale()?) {
        (Some(x), Some(y)) => Some(x.max(y)),
        _ => None,
    };
    let aopts = algebra_options(opts, ia.n(), scale);
    let mut m = header("intersect", &[a, b], &ia);
    tolerance_fields(&mut m, &aopts);
    let basis_dim = match (&ia, &ib) {
        (Instance::F64(x), Instance::F64(y)) => intersect_fields(&mut m, x, y, &aopts)?,
        (Instance::C64(x), Instance::C64(y)) => intersect_fields(&mut m, x, y, &aopts)?,
        (Instance::Rational(x), Instance::Rational(y)) => intersect_fields(&mut m, x, y, &aopts)?,
        (Instance::Gfp { set: x, .. }, Instance::Gfp { set: y, .. }) => intersect_fields(&mut m, x, y, &aopts)?,
        _ => unreachable!("fields checked above"),
    };
    Ok(Outcome::ok(Value::Object(m), format!("intersection dimension {basis_dim}")))
}

fn intersect_fields<T: Scalar>(
    m: &mut Map<String, Value>,
    a: &GeneratorSet<T>,
    b: &GeneratorSet<T>,
    opts: &AlgebraOptions,
) -> Result<usize> {
    let w = algebra::intersect_with(a, b, opts)?;
    basis_fields(m, &w);
    Ok(w.dim)
}

fn cmd_modp_dim(path: &Path, nonunital: bool, trials: usize, seed: Option<u64>, prime: Option<u64>) -> Result<Outcome> {
    let file = InstanceFile::read(path)?;
    let gs = file.rational_set(nonunital.then_some(false))?;
    let cleared = modp::clear_denominators(&gs)?;
    let seed = seed.unwrap_or_else(rand::random);
    let (dim, plan) = modp::certified_dimension_with(&cleared, trials, seed, prime)?;
    let summary = format!(
        "dimension {dim} (failure probability <= {:.3e})",
        plan.failure_probability_bound
    );
    let report = json!({
        "command": "modp-dim",
        "inputs": [path.display().to_string()],
        "field": "rational",
        "n": gs.n(),
        "unital": gs.unital(),
        "dimension": dim,
        "trials": trials,
        "seed": seed,
        "forced_prime": prime,
        "plan": plan,
    });
    Ok(Outcome::ok(report, summary))
}
