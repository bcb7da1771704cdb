//! JSON instance files. Entries are strings so exact rationals survive the
//! round trip; bare JSON numbers are accepted as a convenience.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::algebra::AlgebraOptions;
use crate::error::{Error, Result};
use crate::genfun::{GeneratorSet, Scale};
use crate::linalg::Matrix;
use crate::modp;
use crate::scalar::{Fp, PrimeModulus, Scalar, ScalarKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    F64,
    C64,
    Rational,
    Gfp(u64),
}

impl FromStr for Field {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "f64" => Ok(Field::F64),
            "c64" => Ok(Field::C64),
            "rational" => Ok(Field::Rational),
            other => {
                let p = other
                    .strip_prefix("gfp:")
                    .ok_or_else(|| Error::Parse(format!("unknown field {other:?}")))?;
                let p: u64 = p
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad prime in field {other:?}")))?;
                PrimeModulus::new(p)?;
                Ok(Field::Gfp(p))
            }
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::F64 => f.write_str("f64"),
            Field::C64 => f.write_str("c64"),
            Field::Rational => f.write_str("rational"),
            Field::Gfp(p) => write!(f, "gfp:{p}"),
        }
    }
}

impl From<ScalarKind> for Field {
    fn from(k: ScalarKind) -> Self {
        match k {
            ScalarKind::ApproxReal => Field::F64,
            ScalarKind::ApproxComplex => Field::C64,
            ScalarKind::ExactRational => Field::Rational,
            ScalarKind::PrimeField(p) => Field::Gfp(p),
        }
    }
}

pub type Grid = Vec<Vec<Value>>;

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceFile {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    #[serde(default = "default_true")]
    pub unital: bool,
    pub generators: Vec<Grid>,
}

/// A candidate matrix: a bare grid, `{"matrix": grid}`, or an instance file
/// holding exactly one generator.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum CandidateFile {
    Grid(Grid),
    Wrapped { matrix: Grid },
    Instance(InstanceFile),
}

fn entry_text(v: &Value) -> Result<String> {
    match v {
        Value::String(s) => Ok(s.trim().to_string()),
        Value::Number(n) => Ok(n.to_string()),
        other => Err(Error::Parse(format!("entry {other} is neither a string nor a number"))),
    }
}

/// `"a"` or `"a/b"` with integer `a`, `b` and `b != 0`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("{s:?} is not a rational"));
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.strip_prefix('+').unwrap_or(num).parse().map_err(|_| bad())?;
    let den: BigInt = den.strip_prefix('+').unwrap_or(den).parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(Error::Parse(format!("{s:?} has a zero denominator")));
    }
    Ok(BigRational::new(num, den))
}

fn parse_real(s: &str) -> Result<f64> {
    if let Ok(x) = s.parse::<f64>() {
        if x.is_finite() {
            return Ok(x);
        }
        return Err(Error::Parse(format!("{s:?} is not finite")));
    }
    parse_rational(s)?
        .to_f64()
        .ok_or_else(|| Error::Parse(format!("{s:?} does not fit a float")))
}

/// `"a"`, `"bi"`, `"a+bi"`, `"a-bi"`; the parts are decimals or `p/q`.
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let Some(body) = t.strip_suffix('i') else {
        return Ok(Complex64::new(parse_real(&t)?, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => parse_real(other)?,
    };
    Ok(Complex64::new(parse_real(re)?, im))
}

/// Scalars that can be read from an entry string.
pub trait ParseEntry: Scalar {
    fn parse_entry(s: &str, ctx: Self::Ctx) -> Result<Self>;
}

impl ParseEntry for f64 {
    fn parse_entry(s: &str, _: ()) -> Result<Self> {
        parse_real(s)
    }
}

impl ParseEntry for Complex64 {
    fn parse_entry(s: &str, _: ()) -> Result<Self> {
        parse_complex(s)
    }
}

impl ParseEntry for BigRational {
    fn parse_entry(s: &str, _: ()) -> Result<Self> {
        parse_rational(s)
    }
}

impl ParseEntry for Fp {
    fn parse_entry(s: &str, ctx: PrimeModulus) -> Result<Self> {
        let r = parse_rational(s)?;
        Fp::from_rational(&r, ctx)
            .ok_or_else(|| Error::Parse(format!("{s:?}: denominator vanishes mod {}", ctx.get())))
    }
}

pub fn parse_grid<T: ParseEntry>(grid: &Grid, n: usize, ctx: T::Ctx) -> Result<Matrix<T>> {
    if grid.len() != n || grid.iter().any(|r| r.len() != n) {
        return Err(Error::Parse(format!("grid is not {n}x{n}")));
    }
    let mut data = Vec::with_capacity(n * n);
    for row in grid {
        for v in row {
            data.push(T::parse_entry(&entry_text(v)?, ctx)?);
        }
    }
    Matrix::from_vec(n, n, data, ctx)
}

/// Entry strings that parse back to the same values.
pub fn format_grid<T: Scalar>(m: &Matrix<T>) -> Vec<Vec<String>> {
    m.to_rows()
        .iter()
        .map(|r| r.iter().map(|x| x.to_string()).collect())
        .collect()
}

fn grid_values(rows: Vec<Vec<String>>) -> Grid {
    rows.into_iter()
        .map(|r| r.into_iter().map(Value::String).collect())
        .collect()
}

/// A parsed instance, dispatched on the field.
#[derive(Debug, Clone)]
pub enum Instance {
    F64(GeneratorSet<f64>),
    C64(GeneratorSet<Complex64>),
    Rational(GeneratorSet<BigRational>),
    /// Generators reduced mod p after per-generator denominator clearing;
    /// `lift` keeps the cleared integer generators.
    Gfp {
        set: GeneratorSet<Fp>,
        lift: GeneratorSet<BigRational>,
    },
}

impl Instance {
    pub fn n(&self) -> usize {
        match self {
            Instance::F64(g) => g.n(),
            Instance::C64(g) => g.n(),
            Instance::Rational(g) => g.n(),
            Instance::Gfp { set, .. } => set.n(),
        }
    }

    pub fn field(&self) -> Field {
        match self {
            Instance::F64(_) => Field::F64,
            Instance::C64(_) => Field::C64,
            Instance::Rational(_) => Field::Rational,
            Instance::Gfp { set, .. } => set.kind().into(),
        }
    }

    pub fn unital(&self) -> bool {
        match self {
            Instance::F64(g) => g.unital(),
            Instance::C64(g) => g.unital(),
            Instance::Rational(g) => g.unital(),
            Instance::Gfp { set, .. } => set.unital(),
        }
    }

    /// Scale for GF(p) instances: the automatic bound cannot be computed
    /// from residues, so the bound of the integer lift is used.
    pub fn prime_scale(&self) -> Result<Option<BigInt>> {
        match self {
            Instance::Gfp { lift, .. } => Ok(Some(modp::compute_b(lift.gens())?)),
            _ => Ok(None),
        }
    }

    /// Default options, with the lifted bound as scale over GF(p).
    pub fn default_options(&self) -> Result<AlgebraOptions> {
        let mut opts = AlgebraOptions::default();
        if let Some(b) = self.prime_scale()? {
            opts.scale = Scale::Explicit(BigRational::from_integer(b));
        }
        Ok(opts)
    }
}

impl InstanceFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    pub fn from_set<T: Scalar>(gs: &GeneratorSet<T>) -> Self {
        InstanceFile {
            n: gs.n(),
            field: Some(Field::from(gs.kind()).to_string()),
            unital: gs.unital(),
            generators: gs.gens().iter().map(|g| grid_values(format_grid(g))).collect(),
        }
    }

    /// The declared field, or `rational` when every entry parses as one and
    /// `f64` otherwise.
    pub fn field(&self) -> Result<Field> {
        if let Some(f) = &self.field {
            return f.parse();
        }
        let all_rational = self.generators.iter().flatten().flatten().all(|v| {
            entry_text(v).map(|s| parse_rational(&s).is_ok()).unwrap_or(false)
        });
        Ok(if all_rational { Field::Rational } else { Field::F64 })
    }

    fn set<T: ParseEntry>(&self, ctx: T::Ctx, unital: bool) -> Result<GeneratorSet<T>> {
        let gens = self
            .generators
            .iter()
            .map(|g| parse_grid(g, self.n, ctx))
            .collect::<Result<Vec<_>>>()?;
        GeneratorSet::new(self.n, gens, unital, ctx)
    }

    /// Parses under `field` (or the file's own field) with an optional
    /// unital override.
    pub fn resolve(&self, field: Option<Field>, unital: Option<bool>) -> Result<Instance> {
        if self.n == 0 {
            return Err(Error::Parse("n must be positive".into()));
        }
        let field = match field {
            Some(f) => f,
            None => self.field()?,
        };
        let unital = unital.unwrap_or(self.unital);
        Ok(match field {
            Field::F64 => Instance::F64(self.set((), unital)?),
            Field::C64 => Instance::C64(self.set((), unital)?),
            Field::Rational => Instance::Rational(self.set((), unital)?),
            Field::Gfp(p) => {
                let modulus = PrimeModulus::new(p)?;
                let lift = modp::clear_denominators(&self.set::<BigRational>((), unital)?)?;
                let gens = lift
                    .gens()
                    .iter()
                    .map(|g| g.convert(modulus, |x| Fp::from_rational(x, modulus).expect("integral")))
                    .collect();
                Instance::Gfp {
                    set: GeneratorSet::new(self.n, gens, unital, modulus)?,
                    lift,
                }
            }
        })
    }

    /// Rational generators, for the mod-p path. Fails on non-rational entries.
    pub fn rational_set(&self, unital: Option<bool>) -> Result<GeneratorSet<BigRational>> {
        self.set((), unital.unwrap_or(self.unital))
    }
}

/// Reads a candidate matrix file under the given field.
pub fn read_candidate<T: ParseEntry>(path: impl AsRef<Path>, n: usize, ctx: T::Ctx) -> Result<Matrix<T>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    candidate_from_json(&text, n, ctx)
}

pub fn candidate_from_json<T: ParseEntry>(text: &str, n: usize, ctx: T::Ctx) -> Result<Matrix<T>> {
    let file: CandidateFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let grid = match file {
        CandidateFile::Grid(g) => g,
        CandidateFile::Wrapped { matrix } => matrix,
        CandidateFile::Instance(inst) => {
            if inst.generators.len() != 1 {
                return Err(Error::Parse("candidate instance must hold exactly one matrix".into()));
            }
            inst.generators.into_iter().next().expect("one generator")
        }
    };
    parse_grid(&grid, n, ctx)
}
