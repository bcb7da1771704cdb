mod common;

use algebragen::algebra::{self, AlgebraOptions};
use algebragen::genfun::{build_p, GenFunVariant, Scale};
use algebragen::linalg::{self, frobenius_sq, kron, psi_square, vec, Matrix, Tolerance};
use algebragen::modp::{self, PrimeOutcome};
use algebragen::oracle;
use algebragen::primes::is_prime;
use algebragen::{Fp, GeneratorSet, PrimeModulus, Scalar};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;

fn rat(n: usize, cols: usize, entries: &[i64], den: i64) -> Matrix<BigRational> {
    Matrix::from_fn(n, cols, (), |i, j| q(entries[i * cols + j], den))
}

fn set(n: usize, gens: &[Vec<i64>], den: i64, unital: bool) -> GeneratorSet<BigRational> {
    GeneratorSet::new(n, gens.iter().map(|g| rat(n, n, g, den)).collect(), unital, ()).unwrap()
}

fn to_fp(m: &Matrix<BigRational>, p: u64) -> Matrix<Fp> {
    let modulus = PrimeModulus::new(p).unwrap();
    m.convert(modulus, |x| Fp::from_rational(x, modulus).expect("denominator invertible"))
}

fn square(n: usize, lo: i64, hi: i64) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(lo..=hi, n * n)
}

/// Size, generator entries, and unital flag.
fn instance(max_n: usize, max_d: usize, bound: i64) -> impl Strategy<Value = (usize, Vec<Vec<i64>>, bool)> {
    (1..=max_n, 1..=max_d, any::<bool>()).prop_flat_map(move |(n, d, unital)| {
        (Just(n), prop::collection::vec(square(n, -bound, bound), d), Just(unital))
    })
}

fn column_space_equal(a: &Matrix<BigRational>, b: &Matrix<BigRational>) -> bool {
    let r = linalg::rank(a, None);
    r == linalg::rank(b, None) && r == linalg::rank(&a.hcat(b).unwrap(), None)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn psi_is_an_involution(n in 1usize..=3, e in square(9, -5, 5)) {
        let n2 = n * n;
        let a = Matrix::from_fn(n2, n2, (), |i, j| q(e[i * n2 + j], 1 + ((i + j) % 3) as i64));
        prop_assert_eq!(psi_square(&psi_square(&a).unwrap()).unwrap(), a.clone());
        let f = a.convert((), |x| num_traits::ToPrimitive::to_f64(x).unwrap());
        let back = psi_square(&psi_square(&f).unwrap()).unwrap();
        prop_assert!(back.data().iter().zip(f.data()).all(|(x, y)| (x - y).abs() <= 1e-12));
    }

    #[test]
    fn psi_of_kron_is_outer_product(n in 1usize..=4, a in square(4, -4, 4), b in square(4, -4, 4)) {
        let a = Matrix::from_fn(n, n, (), |i, j| q(a[(i * n + j) % 16], 3));
        let b = Matrix::from_fn(n, n, (), |i, j| q(b[(i * n + j) % 16], 1));
        let lhs = psi_square(&kron(&a, &b).unwrap()).unwrap();
        prop_assert_eq!(lhs, vec(&a).mul(&vec(&b).transpose()).unwrap());
    }

    #[test]
    fn kron_mixed_product(e in prop::collection::vec(-3i64..=3, 4 * 6 + 6 * 2 + 3 * 2 + 2 * 5)) {
        let a = rat(4, 6, &e[0..24], 1);
        let c = rat(6, 2, &e[24..36], 1);
        let b = rat(3, 2, &e[36..42], 1);
        let d = rat(2, 5, &e[42..52], 2);
        let lhs = kron(&a, &b).unwrap().mul(&kron(&c, &d).unwrap()).unwrap();
        prop_assert_eq!(lhs, kron(&a.mul(&c).unwrap(), &b.mul(&d).unwrap()).unwrap());
    }

    #[test]
    fn frobenius_is_multiplicative_on_kron(a in square(3, -5, 5), b in square(2, -5, 5)) {
        let a = rat(3, 3, &a, 2);
        let b = rat(2, 2, &b, 3);
        let lhs = frobenius_sq(&kron(&a, &b).unwrap()).unwrap();
        prop_assert_eq!(lhs, frobenius_sq(&a).unwrap() * frobenius_sq(&b).unwrap());
    }

    #[test]
    fn products_lie_in_the_range(r in 1usize..=5, c in 1usize..=5, e in prop::collection::vec(-4i64..=4, 25), x in prop::collection::vec(-4i64..=4, 5)) {
        let a = rat(r, c, &e, 1);
        let x = rat(c, 1, &x, 1);
        let tol = Tolerance::default();
        prop_assert!(linalg::in_range(&a, &a.mul(&x).unwrap(), &tol).unwrap().member);
        let af = a.convert((), |v| num_traits::ToPrimitive::to_f64(v).unwrap());
        let xf = x.convert((), |v| num_traits::ToPrimitive::to_f64(v).unwrap() + 0.25);
        prop_assert!(linalg::in_range(&af, &af.mul(&xf).unwrap(), &tol).unwrap().member);
    }

    #[test]
    fn fraction_free_rank_matches_rref(r in 1usize..=6, c in 1usize..=6, k in 1usize..=3, e in prop::collection::vec(-3i64..=3, 36), f in prop::collection::vec(-3i64..=3, 36)) {
        // Product of an r x k and a k x c factor, so ranks are often deficient.
        let a = rat(r, k, &e, 2).mul(&rat(k, c, &f, 5)).unwrap();
        prop_assert_eq!(linalg::rank(&a, None), linalg::rref(&a, 0.0).1.len());
    }

    #[test]
    fn exact_inverse_round_trips(n in 1usize..=5, e in square(5, -4, 4)) {
        let a = rat(n, n, &e, 3);
        match linalg::inverse(&a) {
            Ok(inv) => prop_assert_eq!(a.mul(&inv).unwrap(), Matrix::identity(n, ())),
            Err(_) => prop_assert_eq!(exact_det(&a), q(0, 1)),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn generating_matrix_is_psd((n, gens, unital) in instance(3, 2, 3)) {
        let gs = set(n, &gens, 1, unital);
        let rep = algebra::generating_matrix(&gs, &AlgebraOptions::default()).unwrap();
        prop_assert!(linalg::is_psd(&rep.p, None).unwrap());
        let f = to_f64(&gs);
        let rep = algebra::generating_matrix(&f, &AlgebraOptions::default()).unwrap();
        prop_assert!(linalg::is_psd(&rep.p, Some(1e-9)).unwrap());
    }

    #[test]
    fn scaling_choice_keeps_the_range((n, gens, unital) in instance(3, 3, 3)) {
        // Denominator 4nd keeps the unscaled sum inside the unit ball.
        let gs = set(n, &gens, (4 * n * gens.len()) as i64, unital);
        let variant = if unital { GenFunVariant::ResolventReal } else { GenFunVariant::ResolventNonUnital };
        let none = build_p(&gs, variant, Scale::None, None).unwrap();
        let auto = build_p(&gs, variant, Scale::Auto, None).unwrap();
        prop_assert_eq!(none.rank, auto.rank);
        prop_assert!(column_space_equal(&none.p, &auto.p));
    }

    #[test]
    fn power_form_saturates((n, gens, unital) in instance(2, 2, 3)) {
        let gs = set(n, &gens, 1, unital);
        let variant = if unital { GenFunVariant::ResolventReal } else { GenFunVariant::ResolventNonUnital };
        let resolvent = build_p(&gs, variant, Scale::Auto, None).unwrap().rank;
        let ranks: Vec<usize> = (1..=n * n + 2)
            .map(|k| build_p(&gs, GenFunVariant::PowerForm(k), Scale::Auto, None).unwrap().rank)
            .collect();
        prop_assert!(ranks.windows(2).all(|w| w[0] <= w[1]), "ranks {:?}", ranks);
        prop_assert!(ranks[n * n - 1..].iter().all(|&r| r == resolvent), "ranks {:?} vs {}", ranks, resolvent);
    }

    #[test]
    fn truncated_series_matches_the_inverse(e in prop::collection::vec(-1.0f64..1.0, 16)) {
        let s = Matrix::from_vec(4, 4, e, ()).unwrap();
        let fro = frobenius_sq(&s).unwrap().sqrt();
        prop_assume!(fro > 1e-3);
        let s = s.scale(&(0.5 / fro));
        let id = Matrix::identity(4, ());
        let inv = linalg::inverse(&id.sub(&s).unwrap()).unwrap();
        let mut sum = id.clone();
        let mut term = id.clone();
        for _ in 1..=50 {
            term = term.mul(&s).unwrap();
            sum = sum.add(&term).unwrap();
        }
        let worst = inv.data().iter().zip(sum.data()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        prop_assert!(worst <= 2f64.powi(-49), "deviation {worst:e}");
    }

    #[test]
    fn products_of_basis_elements_are_members((n, gens, unital) in instance(3, 2, 2)) {
        let gs = set(n, &gens, 1, unital);
        let b = algebra::basis(&gs).unwrap();
        let wb = oracle::word_span(&gs, n * n);
        for x in &b.basis {
            for y in &b.basis {
                prop_assert!(wb.contains(&x.mul(y).unwrap()));
            }
        }
        if unital {
            prop_assert!(algebra::membership(&gs, &Matrix::identity(n, ()), false).unwrap().member);
        }
    }

    #[test]
    fn generator_scaling_is_invisible((n, gens, unital) in instance(3, 2, 3), t in prop::collection::vec(1i64..=5, 2), z in square(3, -2, 2)) {
        let gs = set(n, &gens, 1, unital);
        let factors: Vec<BigRational> = t.iter().take(gs.len()).enumerate().map(|(i, &v)| q(if i % 2 == 0 { v } else { -v }, 3)).collect();
        let scaled = gs.scaled(&factors).unwrap();
        prop_assert_eq!(algebra::dimension(&gs).unwrap(), algebra::dimension(&scaled).unwrap());
        let z = rat(n, n, &z, 1);
        prop_assert_eq!(
            algebra::membership(&gs, &z, false).unwrap().member,
            algebra::membership(&scaled, &z, false).unwrap().member
        );
        let w = random_word_combination(&gs, &mut ChaCha8Rng::seed_from_u64(t[0] as u64));
        prop_assert!(algebra::membership(&scaled, &w, false).unwrap().member);
    }

    #[test]
    fn more_generators_never_shrink((n, gens, unital) in instance(3, 1, 3), extra in square(3, -3, 3)) {
        let one = set(n, &gens, 1, unital);
        let mut both = gens.clone();
        both.push(extra[..n * n].to_vec());
        let two = set(n, &both, 1, unital);
        prop_assert!(algebra::dimension(&one).unwrap() <= algebra::dimension(&two).unwrap());
    }

    #[test]
    fn oracle_is_deterministic_and_stable((n, gens, unital) in instance(3, 3, 2)) {
        let gs = set(n, &gens, 1, unital);
        let a = oracle::word_span(&gs, n * n);
        let b = oracle::word_span(&gs, n * n);
        prop_assert_eq!(a.words(), b.words());
        prop_assert!(a.saturated);
        prop_assert!(oracle::is_two_sided_stable(&a, &gs));
    }

    #[test]
    fn prime_reduction_never_overcounts((n, gens, unital) in instance(2, 2, 2)) {
        let gs = set(n, &gens, 1, unital);
        let exact = algebra::dimension(&gs).unwrap();
        for p in (2u64..120).filter(|&p| is_prime(p)).chain([65_537, 1_000_003]) {
            if let PrimeOutcome::Rank(r) = modp::dimension_mod_p(&gs, p).unwrap() {
                prop_assert!(r <= exact, "p = {p}: {r} > {exact}");
            }
        }
    }

    #[test]
    fn adjugate_and_inverse_agree_mod_p((n, gens, _) in instance(2, 2, 3), pick in 0usize..8) {
        let gs = set(n, &gens, 1, true);
        let b = modp::compute_b(gs.gens()).unwrap();
        let n2 = n * n;
        let s = algebragen::genfun::sum_kron(&gs, false);
        let m = Matrix::identity(n2, ()).scale(&BigRational::from_integer(b)).sub(&s).unwrap();
        let det = exact_det(&m);
        let adj = linalg::inverse(&m).unwrap().scale(&det);
        let p = [3u64, 5, 7, 11, 13, 17, 101, 65_537][pick];
        let mp = to_fp(&m, p);
        if let Ok(inv) = linalg::inverse(&mp) {
            let lhs = linalg::rank(&psi_square(&to_fp(&adj, p)).unwrap(), None);
            prop_assert_eq!(lhs, linalg::rank(&psi_square(&inv).unwrap(), None));
        }
    }
}

#[test]
fn rational_and_modular_ranks_mostly_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut agree = 0;
    for _ in 0..200 {
        let (r, c, k) = (rng.random_range(1..=6), rng.random_range(1..=6), rng.random_range(1..=6));
        let mut entry = || q(rng.random_range(-9..=9), 1);
        let a = Matrix::from_fn(r, k, (), |_, _| entry()).mul(&Matrix::from_fn(k, c, (), |_, _| entry())).unwrap();
        let p = loop {
            let p = rng.random_range((1u64 << 16) + 1..1 << 24);
            if is_prime(p) {
                break p;
            }
        };
        agree += (linalg::rank(&a, None) == linalg::rank(&to_fp(&a, p), None)) as usize;
    }
    assert!(agree >= 190, "{agree}/200");
}

#[test]
fn sampled_primes_are_spread_out() {
    let bound = modp::bad_prime_bound(3, &BigInt::from(10));
    let ceiling = modp::sampling_ceiling(bound).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let draws: Vec<u64> = (0..1000).map(|_| modp::sample_prime(bound, &mut rng).unwrap()).collect();
    assert!(draws.iter().all(|&p| is_prime(p) && p <= ceiling));
    let mut distinct = draws.clone();
    distinct.sort_unstable();
    distinct.dedup();
    assert!(distinct.len() >= 100, "{} distinct", distinct.len());
}

/// `X = [[1,1],[0,1]]` gives `B = 4` and `det(4I - X⊗X) = 81`.
#[test]
fn singular_prime_is_skipped() {
    let gs = set(2, &[vec![1, 1, 0, 1]], 1, true);
    let b = modp::compute_b(gs.gens()).unwrap();
    let m = Matrix::identity(4, ())
        .scale(&BigRational::from_integer(b))
        .sub(&algebragen::genfun::sum_kron(&gs, false))
        .unwrap();
    let det = exact_det(&m);
    assert_eq!(det, q(81, 1));
    assert_eq!(small_prime_factors(det.numer(), 100), vec![3]);
    assert_eq!(modp::dimension_mod_p(&gs, 3).unwrap(), PrimeOutcome::SingularSkip);

    let (dim, plan) = modp::certified_dimension_with(&gs, 2, 5, Some(3)).unwrap();
    assert_eq!(dim, 2);
    assert_eq!(plan.primes_tried[0].p, 3);
    assert_eq!(plan.primes_tried[0].outcome, PrimeOutcome::SingularSkip);
    assert!(plan.primes_tried.len() >= 3);
}

/// Found by scanning shears `[[1,k],[0,1]]` against small primes: a prime
/// dividing `k` collapses the generator to the identity without making
/// `B I - S` singular.
#[test]
fn undetectable_bad_prime_is_outvoted() {
    let (gs, p) = (1..=12)
        .flat_map(|k| [2u64, 3, 5, 7, 11].map(move |p| (k, p)))
        .find_map(|(k, p)| {
            let gs = set(2, &[vec![1, k, 0, 1]], 1, true);
            let exact = algebra::dimension(&gs).unwrap();
            match modp::dimension_mod_p(&gs, p).unwrap() {
                PrimeOutcome::Rank(r) if r < exact => Some((gs, p)),
                _ => None,
            }
        })
        .expect("a bad prime exists");
    let exact = algebra::dimension(&gs).unwrap();
    let (dim, plan) = modp::certified_dimension_with(&gs, 3, 17, Some(p)).unwrap();
    let forced = &plan.primes_tried[0];
    assert!(forced.forced && matches!(forced.outcome, PrimeOutcome::Rank(r) if r < exact));
    assert_eq!(dim, exact);
}
