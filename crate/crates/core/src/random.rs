//! Random generator sets for benchmarks and tests.

use num_rational::BigRational;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::genfun::GeneratorSet;
use crate::linalg::Matrix;

/// `d` generators with standard Gaussian entries.
pub fn gaussian_set<R: Rng + ?Sized>(n: usize, d: usize, unital: bool, rng: &mut R) -> GeneratorSet<f64> {
    let gens = (0..d)
        .map(|_| Matrix::from_fn(n, n, (), |_, _| StandardNormal.sample(rng)))
        .collect();
    GeneratorSet::new(n, gens, unital, ()).expect("square generators")
}

/// `d` generators with integer entries uniform in `[-bound, bound]`.
pub fn integer_set<R: Rng + ?Sized>(
    n: usize,
    d: usize,
    bound: i64,
    unital: bool,
    rng: &mut R,
) -> GeneratorSet<BigRational> {
    let gens = (0..d).map(|_| integer_matrix(n, bound, rng)).collect();
    GeneratorSet::new(n, gens, unital, ()).expect("square generators")
}

pub fn integer_matrix<R: Rng + ?Sized>(n: usize, bound: i64, rng: &mut R) -> Matrix<BigRational> {
    Matrix::from_fn(n, n, (), |_, _| {
        BigRational::from_integer(rng.random_range(-bound..=bound).into())
    })
}
