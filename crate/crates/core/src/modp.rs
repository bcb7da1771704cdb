//! Randomized exact dimension for integer generators by evaluating the
//! generating matrix modulo a random prime.
//!
//! With `B = sum ||X_i||_F^2 + 1` and `M = B I - sum X_i ⊗ X_i`, the matrix
//! `psi(M^-1)` has the same column space as the rescaled `P`. Reducing modulo
//! a prime can only lose rank, and only for the finitely many primes that
//! divide `det M` or a rank-witnessing minor. Primes dividing `det M` are
//! caught (the inverse fails) and resampled; the others are made unlikely
//! by drawing from a large range, and harmless by keeping the maximum rank
//! over several draws.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::genfun::{sum_kron, GeneratorSet};
use crate::linalg::{self, psi_square, Matrix};
use crate::primes::{is_prime, miller_rabin, SMALL_WITNESSES, SMALL_WITNESS_LIMIT};
use crate::scalar::{Fp, PrimeModulus, Scalar};

/// Floor for the sampling ceiling.
pub const MIN_CEILING: u64 = 1 << 20;

/// Safety factor between the bad-prime bound and the sampling ceiling.
pub const CEILING_FACTOR: f64 = 100.0;

/// Skipped primes tolerated per trial before giving up.
const MAX_ATTEMPTS_PER_TRIAL: usize = 64;

pub const DEFAULT_TRIALS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PrimeOutcome {
    Rank(usize),
    /// `B I - S` is singular modulo `p`.
    SingularSkip,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrimeTrial {
    pub p: u64,
    pub outcome: PrimeOutcome,
    /// Supplied by the caller rather than sampled.
    pub forced: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrimePlan {
    /// Decimal string; may exceed 64 bits.
    pub b: String,
    pub bad_prime_bound: f64,
    pub ceiling_n: u64,
    pub primes_tried: Vec<PrimeTrial>,
    /// Probability bound that every counted prime was bad.
    pub failure_probability_bound: f64,
}

/// Requires every entry to be an integer.
pub fn compute_b(gens: &[Matrix<BigRational>]) -> Result<BigInt> {
    let mut total = BigInt::zero();
    for g in gens {
        for x in g.data() {
            if !x.is_integer() {
                return Err(Error::NotInteger);
            }
            let v = x.to_integer();
            total += &v * &v;
        }
    }
    Ok(total + BigInt::one())
}

fn ln_bigint(b: &BigInt) -> f64 {
    match b.to_f64() {
        Some(x) if x.is_finite() => x.ln(),
        _ => b.bits() as f64 * std::f64::consts::LN_2,
    }
}

/// `n^2 (n^2 + 1) ln B + n (n^2 + 1) + n^2 ln n`, natural logarithms.
pub fn bad_prime_bound(n: usize, b: &BigInt) -> f64 {
    let nf = n as f64;
    let n2 = nf * nf;
    n2 * (n2 + 1.0) * ln_bigint(b) + nf * (n2 + 1.0) + n2 * nf.ln()
}

/// `max(2^20, ceil(100 * bound * ln(100 * bound)))`, or an error when that
/// leaves the deterministic primality range.
pub fn sampling_ceiling(bound: f64) -> Result<u64> {
    let scaled = CEILING_FACTOR * bound.max(1.0);
    let raw = (scaled * scaled.ln()).ceil();
    if !raw.is_finite() || raw >= SMALL_WITNESS_LIMIT as f64 {
        return Err(Error::OutOfRange(format!(
            "sampling ceiling {raw:.3e} exceeds the deterministic primality range \
             ({SMALL_WITNESS_LIMIT}); use the exact rational path"
        )));
    }
    Ok((raw as u64).max(MIN_CEILING))
}

/// Per-prime chance of a wrong rank: `bound * ln N / N`, clamped to 1.
pub fn per_prime_failure(bound: f64, ceiling: u64) -> f64 {
    let nf = ceiling as f64;
    (bound * nf.ln() / nf).min(1.0)
}

/// Uniform odd candidates in `[N/2, N]` until one passes Miller-Rabin.
pub fn sample_prime<R: Rng + ?Sized>(bound: f64, rng: &mut R) -> Result<u64> {
    let ceiling = sampling_ceiling(bound)?;
    let lo = ceiling / 2;
    loop {
        let c = rng.random_range(lo..=ceiling) | 1;
        if c <= ceiling && miller_rabin(c, &SMALL_WITNESSES) {
            return Ok(c);
        }
    }
}

pub fn sample_prime_seeded(bound: f64, seed: u64) -> Result<u64> {
    sample_prime(bound, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Multiplies each generator by the lcm of its denominators. Per-generator
/// rescaling leaves the generated algebra unchanged.
pub fn clear_denominators(gs: &GeneratorSet<BigRational>) -> Result<GeneratorSet<BigRational>> {
    let factors: Vec<BigRational> = gs
        .gens()
        .iter()
        .map(|g| {
            let l = g
                .data()
                .iter()
                .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            BigRational::from_integer(l)
        })
        .collect();
    gs.scaled(&factors)
}

fn reduce_matrix(m: &Matrix<BigRational>, modulus: PrimeModulus) -> Result<Matrix<Fp>> {
    let mut data = Vec::with_capacity(m.data().len());
    for x in m.data() {
        data.push(Fp::from_rational(x, modulus).ok_or(Error::NotInteger)?);
    }
    Matrix::from_vec(m.rows(), m.cols(), data, modulus)
}

/// Rank of `psi(M^-1)` over GF(p) (or of `psi(S M^-1)` for a non-unital
/// set), with `M = B I - S`. Generators must be integral.
pub fn dimension_mod_p(gs: &GeneratorSet<BigRational>, p: u64) -> Result<PrimeOutcome> {
    let b = compute_b(gs.gens())?;
    dimension_mod_p_with_b(gs, &b, p)
}

fn dimension_mod_p_with_b(gs: &GeneratorSet<BigRational>, b: &BigInt, p: u64) -> Result<PrimeOutcome> {
    let modulus = PrimeModulus::new(p)?;
    let gens: Vec<Matrix<Fp>> = gs
        .gens()
        .iter()
        .map(|g| reduce_matrix(g, modulus))
        .collect::<Result<_>>()?;
    let gp = GeneratorSet::new(gs.n(), gens, gs.unital(), modulus)?;
    let s = sum_kron(&gp, false);
    let n2 = gs.n() * gs.n();
    let b_mod = Fp::from_bigint(b, modulus);
    let m = Matrix::identity(n2, modulus).scale(&b_mod).sub(&s)?;
    let m_inv = match linalg::inverse(&m) {
        Ok(inv) => inv,
        Err(Error::Singular) => return Ok(PrimeOutcome::SingularSkip),
        Err(e) => return Err(e),
    };
    let realigned = if gs.unital() { m_inv } else { s.mul(&m_inv)? };
    let p_mat = psi_square(&realigned)?;
    Ok(PrimeOutcome::Rank(linalg::rank(&p_mat, None)))
}

struct TrialRecord {
    tried: Vec<PrimeTrial>,
    rank: usize,
    factor: f64,
}

/// Maximum mod-p rank over `trials` primes that did not hit a singular `M`.
pub fn certified_dimension(
    gs: &GeneratorSet<BigRational>,
    trials: usize,
    seed: u64,
) -> Result<(usize, PrimePlan)> {
    certified_dimension_with(gs, trials, seed, None)
}

/// As [`certified_dimension`], with the first trial starting from
/// `first_prime` instead of a sampled prime. A forced prime carries no
/// probabilistic guarantee, so it contributes a factor of 1 to the failure
/// bound.
pub fn certified_dimension_with(
    gs: &GeneratorSet<BigRational>,
    trials: usize,
    seed: u64,
    first_prime: Option<u64>,
) -> Result<(usize, PrimePlan)> {
    if trials == 0 {
        return Err(Error::Unsupported("trials must be at least 1".into()));
    }
    if let Some(p) = first_prime {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
    }
    let b = compute_b(gs.gens())?;
    let bound = bad_prime_bound(gs.n(), &b);
    let ceiling = sampling_ceiling(bound)?;
    let q = per_prime_failure(bound, ceiling);

    let records: Vec<TrialRecord> = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<TrialRecord> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            let mut tried = Vec::new();
            let mut forced = if t == 0 { first_prime } else { None };
            for _ in 0..MAX_ATTEMPTS_PER_TRIAL {
                let (p, is_forced) = match forced.take() {
                    Some(p) => (p, true),
                    None => (sample_prime(bound, &mut rng)?, false),
                };
                let outcome = dimension_mod_p_with_b(gs, &b, p)?;
                tried.push(PrimeTrial {
                    p,
                    outcome,
                    forced: is_forced,
                });
                if let PrimeOutcome::Rank(r) = outcome {
                    let factor = if is_forced { 1.0 } else { q };
                    return Ok(TrialRecord {
                        tried,
                        rank: r,
                        factor,
                    });
                }
            }
            Err(Error::Numeric(format!(
                "{MAX_ATTEMPTS_PER_TRIAL} consecutive primes made B I - S singular"
            )))
        })
        .collect::<Result<_>>()?;

    let dim = records.iter().map(|r| r.rank).max().unwrap_or(0);
    let failure = records.iter().map(|r| r.factor).product::<f64>();
    let plan = PrimePlan {
        b: b.to_string(),
        bad_prime_bound: bound,
        ceiling_n: ceiling,
        primes_tried: records.into_iter().flat_map(|r| r.tried).collect(),
        failure_probability_bound: failure,
    };
    Ok((dim, plan))
}
