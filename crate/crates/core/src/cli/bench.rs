use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use super::{algebra_options, load, with_set, Outcome, PathOpts, EXIT_DISAGREEMENT, EXIT_OK};
use crate::algebra::{self, AlgebraOptions};
use crate::error::{Error, Result};
use crate::genfun::GeneratorSet;
use crate::instance::{Field, Instance};
use crate::oracle;
use crate::random;
use crate::scalar::Scalar;

pub const CSV_HEADER: &str = "n,d,method,dim,seconds,agrees";

/// Entry bound for random rational instances.
const RANDOM_INTEGER_BOUND: i64 = 3;

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    /// Instance file; omit when using --random.
    pub instance: Option<PathBuf>,
    /// Random instances: size, generator count, instance count.
    #[arg(long, num_args = 3, value_names = ["N", "D", "COUNT"])]
    pub random: Option<Vec<usize>>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// f64 (Gaussian entries) or rational (integers in [-3, 3]) for --random.
    #[arg(long, value_parser = super::parse_field)]
    pub field: Option<Field>,
    #[arg(long)]
    pub nonunital: bool,
    /// Write the table as CSV to PATH, or to stdout without a path.
    #[arg(long, num_args = 0..=1, value_name = "PATH")]
    pub csv: Option<Option<PathBuf>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub n: usize,
    pub d: usize,
    pub method: &'static str,
    pub dim: usize,
    pub seconds: f64,
    pub agrees: bool,
}

fn time<R>(f: impl FnOnce() -> Result<R>) -> Result<(R, f64)> {
    let start = Instant::now();
    let r = f()?;
    Ok((r, start.elapsed().as_secs_f64()))
}

/// P-method and oracle on one instance; exact disagreement is flagged.
fn bench_set<T: Scalar>(gs: &GeneratorSet<T>, opts: &AlgebraOptions) -> Result<(Vec<BenchRow>, bool)> {
    let (p_dim, p_secs) = time(|| algebra::dimension_with(gs, opts))?;
    let (o_dim, o_secs) = time(|| oracle::oracle_dimension(gs))?;
    let agrees = p_dim == o_dim;
    let row = |method, dim, seconds| BenchRow {
        n: gs.n(),
        d: gs.len(),
        method,
        dim,
        seconds,
        agrees,
    };
    Ok((
        vec![row("pmethod", p_dim, p_secs), row("oracle", o_dim, o_secs)],
        !agrees && T::EXACT,
    ))
}

pub fn to_csv(rows: &[BenchRow]) -> String {
    let mut out = String::new();
    writeln!(out, "{CSV_HEADER}").expect("string write");
    for r in rows {
        writeln!(out, "{},{},{},{},{:.6},{}", r.n, r.d, r.method, r.dim, r.seconds, r.agrees).expect("string write");
    }
    out
}

fn instances(args: &BenchArgs, seed: u64) -> Result<Vec<Instance>> {
    match (&args.instance, &args.random) {
        (Some(path), None) => Ok(vec![load(path, args.field, args.nonunital)?]),
        (None, Some(shape)) => {
            let (n, d, count) = (shape[0], shape[1], shape[2]);
            if n == 0 {
                return Err(Error::Parse("random instances need n >= 1".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let unital = !args.nonunital;
            (0..count)
                .map(|_| match args.field.unwrap_or(Field::F64) {
                    Field::F64 => Ok(Instance::F64(random::gaussian_set(n, d, unital, &mut rng))),
                    Field::Rational => Ok(Instance::Rational(random::integer_set(
                        n,
                        d,
                        RANDOM_INTEGER_BOUND,
                        unital,
                        &mut rng,
                    ))),
                    other => Err(Error::Unsupported(format!("random {other} instances"))),
                })
                .collect()
        }
        _ => Err(Error::Parse("give exactly one of an instance path or --random N D COUNT".into())),
    }
}

pub(super) fn cmd_bench(args: &BenchArgs) -> Result<Outcome> {
    let seed = args.seed.unwrap_or_else(rand::random);
    let mut rows = Vec::new();
    let mut hard_failure = false;
    for inst in instances(args, seed)? {
        let opts = PathOpts {
            nonunital: args.nonunital,
            tol: None,
            no_rescale: false,
            power: None,
            field: None,
        };
        let aopts = algebra_options(&opts, inst.n(), inst.prime_scale()?);
        let (r, bad) = with_set!(&inst, gs => bench_set(gs, &aopts))?;
        rows.extend(r);
        hard_failure |= bad;
    }
    let all_agree = rows.iter().all(|r| r.agrees);
    let csv = to_csv(&rows);
    let mut stdout = None;
    if let Some(target) = &args.csv {
        match target {
            Some(path) => std::fs::write(path, &csv)
                .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?,
            None => stdout = Some(csv.clone()),
        }
    }
    let report = json!({
        "command": "bench",
        "inputs": args.instance.as_ref().map(|p| vec![p.display().to_string()]).unwrap_or_default(),
        "random": args.random,
        "seed": seed,
        "instances": rows.len() / 2,
        "all_agree": all_agree,
        "rows": rows,
    });
    Ok(Outcome {
        report,
        summary: format!(
            "{} instances, {}",
            rows.len() / 2,
            if all_agree { "all agree" } else { "DISAGREEMENT" }
        ),
        code: if hard_failure { EXIT_DISAGREEMENT } else { EXIT_OK },
        stdout,
    })
}
