//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits non-zero if any failed.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use algebragen::algebra;
use algebragen::genfun::{build_p, scale_bound, GenFunVariant, Scale};
use algebragen::linalg::{self, kron, psi_square, vec, Matrix};
use algebragen::modp;
use algebragen::oracle;
use algebragen::random;
use algebragen::{Fp, GeneratorSet, PrimeModulus, Scalar};
use num_complex::Complex64;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit_secs: f64) -> Result<(), String> {
    ensure(elapsed.as_secs_f64() < limit_secs, || {
        format!("took {:.2}s, limit {limit_secs}s", elapsed.as_secs_f64())
    })
}

/// Random integer instances shared by criteria 4 to 6.
fn mixed_instances() -> Vec<GeneratorSet<BigRational>> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    (0..200)
        .map(|i| {
            let n = rng.random_range(2..=4);
            let d = rng.random_range(1..=3);
            random::integer_set(n, d, 3, i % 2 == 0, &mut rng)
        })
        .collect()
}

fn c1_golden() -> Outcome {
    let start = Instant::now();
    let gs = upper3(true);
    let rep = build_p(&gs, GenFunVariant::ResolventReal, Scale::None, None).map_err(|e| e.to_string())?;
    #[rustfmt::skip]
    let expected: [[(i64, i64); 9]; 9] = [
        [(9, 8), (0, 1), (0, 1), (0, 1), (1, 1), (0, 1), (0, 1), (0, 1), (1, 1)],
        [(0, 1); 9],
        [(0, 1); 9],
        [(0, 1), (0, 1), (0, 1), (1, 8), (0, 1), (0, 1), (0, 1), (1, 9), (0, 1)],
        [(1, 1), (0, 1), (0, 1), (0, 1), (1, 1), (0, 1), (0, 1), (0, 1), (1, 1)],
        [(0, 1); 9],
        [(0, 1), (0, 1), (0, 1), (0, 1), (0, 1), (0, 1), (1, 72), (0, 1), (0, 1)],
        [(0, 1), (0, 1), (0, 1), (1, 9), (0, 1), (0, 1), (0, 1), (1, 9), (0, 1)],
        [(1, 1), (0, 1), (0, 1), (0, 1), (1, 1), (0, 1), (0, 1), (0, 1), (1, 1)],
    ];
    for (i, row) in expected.iter().enumerate() {
        for (j, &(a, b)) in row.iter().enumerate() {
            ensure(rep.p.get(i, j) == &q(a, b), || {
                format!("P({},{}) = {}, expected {a}/{b}", i + 1, j + 1, rep.p.get(i, j))
            })?;
        }
    }
    ensure(rep.rank == 5, || format!("rank {}", rep.rank))?;
    let b = algebra::basis_with(
        &gs,
        &algebra::AlgebraOptions {
            scale: Scale::None,
            ..Default::default()
        },
    )
    .map_err(|e| e.to_string())?;
    ensure(b.dim == 5, || format!("basis size {}", b.dim))?;
    // The pattern space {[[a,b,c],[0,d,e],[0,0,d]]} has dimension 5, so five
    // independent members of it span it.
    for m in &b.basis {
        let fits = m.get(1, 0).is_zero()
            && m.get(2, 0).is_zero()
            && m.get(2, 1).is_zero()
            && m.get(1, 1) == m.get(2, 2);
        ensure(fits, || format!("basis element outside the pattern: {m:?}"))?;
    }
    let cols = Matrix::from_columns(9, &b.basis.iter().map(|m| vec(m).column(0)).collect::<Vec<_>>(), ());
    ensure(linalg::rank(&cols, None) == 5, || "basis is dependent".into())?;
    within(start.elapsed(), 1.0)?;
    Ok(format!("81 entries exact, rank 5, {:.3}s", start.elapsed().as_secs_f64()))
}

fn c2_membership() -> Outcome {
    let gs = upper3(true);
    let y = upper3_member();
    let res = algebra::membership(&gs, &y, true).map_err(|e| e.to_string())?;
    ensure(res.member, || "member rejected".into())?;
    ensure(res.residual == 0.0, || format!("residual {}", res.residual))?;
    let cert = res.certificate.ok_or("no certificate")?;
    ensure(cert.evaluate(&gs).map_err(|e| e.to_string())? == y, || "certificate does not reconstruct".into())?;
    let res = algebra::membership(&gs, &upper3_nonmember(), false).map_err(|e| e.to_string())?;
    ensure(!res.member, || "non-member accepted".into())?;
    Ok(format!("member with {}-term certificate, non-member rejected", cert.terms.len()))
}

trait RandomEntry: Scalar {
    fn draw<R: Rng>(rng: &mut R, ctx: Self::Ctx) -> Self;
    fn close(a: &Matrix<Self>, b: &Matrix<Self>) -> bool;
}

fn max_diff<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>) -> f64 {
    a.sub(b).unwrap().data().iter().map(|x| x.magnitude()).fold(0.0, f64::max)
}

impl RandomEntry for f64 {
    fn draw<R: Rng>(rng: &mut R, _: ()) -> Self {
        rng.random_range(-1.0..1.0)
    }
    fn close(a: &Matrix<Self>, b: &Matrix<Self>) -> bool {
        max_diff(a, b) <= 1e-12
    }
}

impl RandomEntry for Complex64 {
    fn draw<R: Rng>(rng: &mut R, _: ()) -> Self {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    }
    fn close(a: &Matrix<Self>, b: &Matrix<Self>) -> bool {
        max_diff(a, b) <= 1e-12
    }
}

impl RandomEntry for BigRational {
    fn draw<R: Rng>(rng: &mut R, _: ()) -> Self {
        q(rng.random_range(-9..=9), rng.random_range(1..=7))
    }
    fn close(a: &Matrix<Self>, b: &Matrix<Self>) -> bool {
        a == b
    }
}

impl RandomEntry for Fp {
    fn draw<R: Rng>(rng: &mut R, ctx: PrimeModulus) -> Self {
        Fp::new(rng.random_range(0..ctx.get()), ctx)
    }
    fn close(a: &Matrix<Self>, b: &Matrix<Self>) -> bool {
        a == b
    }
}

fn rand_matrix<T: RandomEntry, R: Rng>(rows: usize, cols: usize, ctx: T::Ctx, rng: &mut R) -> Matrix<T> {
    Matrix::from_fn(rows, cols, ctx, |_, _| T::draw(rng, ctx))
}

fn structural<T: RandomEntry>(ctx: T::Ctx, seed: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for t in 0..1000 {
        let n = rng.random_range(1..=5);
        let a = rand_matrix::<T, _>(n * n, n * n, ctx, &mut rng);
        let back = psi_square(&psi_square(&a).unwrap()).unwrap();
        ensure(T::close(&back, &a), || format!("psi involution failed at trial {t}, n = {n}"))?;

        let (x, y) = (rand_matrix::<T, _>(n, n, ctx, &mut rng), rand_matrix::<T, _>(n, n, ctx, &mut rng));
        let lhs = psi_square(&kron(&x, &y).unwrap()).unwrap();
        let rhs = vec(&x).mul(&vec(&y).transpose()).unwrap();
        ensure(T::close(&lhs, &rhs), || format!("psi(kron) identity failed at trial {t}, n = {n}"))?;

        let dims: Vec<usize> = (0..6).map(|_| rng.random_range(1..=3)).collect();
        let (p, m, r, s, u, v) = (dims[0], dims[1], dims[2], dims[3], dims[4], dims[5]);
        let a = rand_matrix::<T, _>(p, m, ctx, &mut rng);
        let b = rand_matrix::<T, _>(s, u, ctx, &mut rng);
        let c = rand_matrix::<T, _>(m, r, ctx, &mut rng);
        let d = rand_matrix::<T, _>(u, v, ctx, &mut rng);
        let lhs = kron(&a, &b).unwrap().mul(&kron(&c, &d).unwrap()).unwrap();
        let rhs = kron(&a.mul(&c).unwrap(), &b.mul(&d).unwrap()).unwrap();
        ensure(T::close(&lhs, &rhs), || format!("mixed product failed at trial {t}"))?;
    }
    Ok(())
}

fn c3_structural() -> Outcome {
    let start = Instant::now();
    structural::<f64>((), 31)?;
    structural::<Complex64>((), 32)?;
    structural::<BigRational>((), 33)?;
    structural::<Fp>(PrimeModulus::new(1_000_003).unwrap(), 34)?;
    within(start.elapsed(), 30.0)?;
    Ok(format!("3 identities x 1000 trials x 4 backends, {:.1}s", start.elapsed().as_secs_f64()))
}

fn oracle_member(wb: &oracle::WordBasis<BigRational>, z: &Matrix<BigRational>) -> bool {
    oracle::express(wb, z).is_some()
}

fn c4_oracle_equivalence(instances: &[GeneratorSet<BigRational>]) -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(40);
    let mut dims_agree = 0;
    let mut probes_agree = 0;
    let mut members = 0;
    for (i, gs) in instances.iter().enumerate() {
        let d_p = algebra::dimension(gs).map_err(|e| e.to_string())?;
        let wb = oracle::word_span(gs, gs.n() * gs.n());
        ensure(wb.saturated, || format!("instance {i}: oracle unsaturated"))?;
        if d_p == wb.dimension() {
            dims_agree += 1;
        }
        for k in 0..5 {
            let z = if k % 2 == 0 {
                random_word_combination(gs, &mut rng)
            } else {
                random::integer_matrix(gs.n(), 3, &mut rng)
            };
            let via_p = algebra::membership(gs, &z, false).map_err(|e| e.to_string())?.member;
            if via_p == oracle_member(&wb, &z) {
                probes_agree += 1;
            }
            members += via_p as usize;
        }
    }
    ensure(dims_agree == 200, || format!("dimensions agree {dims_agree}/200"))?;
    ensure(probes_agree == 1000, || format!("probes agree {probes_agree}/1000"))?;
    within(start.elapsed(), 300.0)?;
    Ok(format!(
        "dimensions 200/200, probes 1000/1000 ({members} members), {:.1}s",
        start.elapsed().as_secs_f64()
    ))
}

fn c5_psd_scale(instances: &[GeneratorSet<BigRational>]) -> Outcome {
    for (i, gs) in instances.iter().enumerate() {
        let variant = algebra::AlgebraOptions::default();
        let auto = algebra::generating_matrix(gs, &variant).map_err(|e| e.to_string())?;
        ensure(linalg::is_psd(&auto.p, None).map_err(|e| e.to_string())?, || {
            format!("instance {i}: P not PSD")
        })?;
        let b = BigRational::from_integer(scale_bound(gs).map_err(|e| e.to_string())?);
        let four = build_p(
            gs,
            auto.variant,
            Scale::Explicit(b * q(4, 1)),
            None,
        )
        .map_err(|e| e.to_string())?;
        ensure(four.rank == auto.rank, || {
            format!("instance {i}: rank {} under 4x scale vs {}", four.rank, auto.rank)
        })?;
    }
    Ok("200/200 PSD, ranks equal under both scales".into())
}

fn c6_power_form(instances: &[GeneratorSet<BigRational>]) -> Outcome {
    let mut agree = 0;
    for gs in instances {
        let n2 = gs.n() * gs.n();
        let res = algebra::dimension(gs).map_err(|e| e.to_string())?;
        let pow = build_p(gs, GenFunVariant::PowerForm(n2), Scale::Auto, None).map_err(|e| e.to_string())?;
        agree += (pow.rank == res) as usize;
    }
    ensure(agree == 200, || format!("{agree}/200 agree"))?;
    Ok("200/200 agree".into())
}

fn c7_modp() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(70);
    let mut single_agree = 0;
    let mut overcounts = 0;
    let mut triple_agree = 0;
    for i in 0..100u64 {
        let n = rng.random_range(1..=3);
        let d = rng.random_range(1..=2);
        let gs = random::integer_set(n, d, 2, true, &mut rng);
        let exact = oracle::oracle_dimension(&gs).map_err(|e| e.to_string())?;
        let (one, _) = modp::certified_dimension(&gs, 1, 700 + i).map_err(|e| e.to_string())?;
        if one == exact {
            single_agree += 1;
        } else if one > exact {
            overcounts += 1;
        }
        let (three, _) = modp::certified_dimension(&gs, 3, 7000 + i).map_err(|e| e.to_string())?;
        triple_agree += (three == exact) as usize;
    }
    ensure(single_agree >= 99, || format!("single prime agrees {single_agree}/100"))?;
    ensure(overcounts == 0, || format!("{overcounts} over-counts"))?;
    ensure(triple_agree == 100, || format!("three trials agree {triple_agree}/100"))?;
    within(start.elapsed(), 120.0)?;
    Ok(format!(
        "single prime {single_agree}/100, three trials {triple_agree}/100, {:.1}s",
        start.elapsed().as_secs_f64()
    ))
}

fn c8_generic() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(80);
    for i in 0..20 {
        let gs = random::gaussian_set(4, 2, true, &mut rng);
        let rep = algebra::generating_matrix(&gs, &Default::default()).map_err(|e| e.to_string())?;
        ensure(rep.rank == 16, || format!("instance {i}: dimension {}", rep.rank))?;
        ensure(!rep.conditioning_flag, || format!("instance {i}: conditioning flag raised"))?;
    }
    Ok("20/20 of dimension 16, no flags".into())
}

/// Entries `5k / 2^17` with `|k| <= 1024`: exactly representable, and small
/// enough that high-degree words fall below double precision.
fn contractive_pair<R: Rng>(rng: &mut R) -> (GeneratorSet<f64>, GeneratorSet<BigRational>) {
    let ks: Vec<Vec<i64>> = (0..2).map(|_| (0..64).map(|_| rng.random_range(-1024..=1024)).collect()).collect();
    let floats = ks
        .iter()
        .map(|k| Matrix::from_vec(8, 8, k.iter().map(|&x| (5 * x) as f64 / 131072.0).collect(), ()).unwrap())
        .collect();
    let ints = ks
        .iter()
        .map(|k| Matrix::from_vec(8, 8, k.iter().map(|&x| q(5 * x, 1)).collect(), ()).unwrap())
        .collect();
    (
        GeneratorSet::new(8, floats, true, ()).unwrap(),
        GeneratorSet::new(8, ints, true, ()).unwrap(),
    )
}

/// Exact dimension of the rationalized instance. The integer generators
/// are a uniform rescaling, so they generate the same algebra. A word span
/// of full size modulo a prime is a certified lower bound that already hits
/// the maximum; otherwise fall back to the rational oracle.
fn exact_dimension(ints: &GeneratorSet<BigRational>) -> usize {
    let modulus = PrimeModulus::new(1_000_000_007).unwrap();
    let gens = ints
        .gens()
        .iter()
        .map(|g| g.convert(modulus, |x| Fp::from_rational(x, modulus).unwrap()))
        .collect();
    let reduced = GeneratorSet::new(ints.n(), gens, ints.unital(), modulus).unwrap();
    let d = oracle::oracle_dimension(&reduced).unwrap();
    if d == ints.n() * ints.n() {
        d
    } else {
        oracle::oracle_dimension(ints).unwrap()
    }
}

fn c9_conditioning() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(90);
    let mut disagreements = 0;
    let mut flagged = 0;
    for _ in 0..50 {
        let (floats, ints) = contractive_pair(&mut rng);
        let rep = build_p(&floats, GenFunVariant::ResolventReal, Scale::None, None).map_err(|e| e.to_string())?;
        let exact = exact_dimension(&ints);
        if rep.rank != exact {
            disagreements += 1;
            flagged += rep.conditioning_flag as usize;
        }
    }
    ensure(disagreements > 0, || "no disagreement found; instance not hard enough".into())?;
    ensure(flagged == disagreements, || format!("flag fired on {flagged} of {disagreements} disagreements"))?;
    Ok(format!("{disagreements}/50 trials disagree, all flagged"))
}

fn c10_bench() -> Outcome {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_algebragen"))
        .args(["bench", "--random", "10", "3", "2", "--seed", "10", "--csv"])
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || format!("exit status {:?}", out.status.code()))?;
    let csv = String::from_utf8(out.stdout).map_err(|e| e.to_string())?;
    let mut lines = csv.lines();
    ensure(lines.next() == Some("n,d,method,dim,seconds,agrees"), || "bad CSV header".into())?;
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    ensure(rows.len() == 4, || format!("{} rows", rows.len()))?;
    for r in &rows {
        ensure(r.len() == 6, || format!("bad row {r:?}"))?;
        ensure(r[0] == "10" && r[1] == "3", || format!("bad row {r:?}"))?;
        ensure(r[3].parse::<usize>().is_ok() && r[4].parse::<f64>().is_ok(), || format!("bad row {r:?}"))?;
        ensure(r[5] == "true", || format!("methods disagree: {r:?}"))?;
    }
    within(start.elapsed(), 60.0)?;
    Ok(format!("2 instances, both methods agree, {:.1}s", start.elapsed().as_secs_f64()))
}

fn main() {
    let instances = mixed_instances();
    let criteria: Vec<Criterion> = vec![
        ("golden example, exact P", Box::new(c1_golden)),
        ("membership verdicts", Box::new(c2_membership)),
        ("structural identities", Box::new(c3_structural)),
        ("oracle equivalence", Box::new(|| c4_oracle_equivalence(&instances))),
        ("PSD and scale invariance", Box::new(|| c5_psd_scale(&instances))),
        ("power-form agreement", Box::new(|| c6_power_form(&instances))),
        ("mod-p certification", Box::new(c7_modp)),
        ("generic dimension", Box::new(c8_generic)),
        ("conditioning flag", Box::new(c9_conditioning)),
        ("benchmark sanity", Box::new(c10_bench)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {:2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
