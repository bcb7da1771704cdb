#![allow(dead_code)]

use algebragen::linalg::Matrix;
use algebragen::oracle::word_matrix;
use algebragen::GeneratorSet;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

pub fn q(a: i64, b: i64) -> BigRational {
    BigRational::new(a.into(), b.into())
}

pub fn int_matrix(rows: &[&[i64]]) -> Matrix<BigRational> {
    Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| q(x, 1)).collect()).collect(), ()).unwrap()
}

/// Upper-triangular 3x3 example: a diagonal corner and a scaled shift.
pub fn upper3(unital: bool) -> GeneratorSet<BigRational> {
    let third = q(1, 3);
    let x1 = int_matrix(&[&[1, 0, 0], &[0, 0, 0], &[0, 0, 0]]).scale(&third);
    let x2 = int_matrix(&[&[0, 1, 0], &[0, 0, 1], &[0, 0, 0]]).scale(&third);
    GeneratorSet::new(3, vec![x1, x2], unital, ()).unwrap()
}

pub fn upper3_member() -> Matrix<BigRational> {
    int_matrix(&[&[1, 0, 1], &[0, 1, -1], &[0, 0, 1]])
}

pub fn upper3_nonmember() -> Matrix<BigRational> {
    int_matrix(&[&[1, 0, 1], &[0, 1, -1], &[1, 0, 1]])
}

pub fn to_f64(gs: &GeneratorSet<BigRational>) -> GeneratorSet<f64> {
    let gens = gs
        .gens()
        .iter()
        .map(|g| g.convert((), |x| num_traits::ToPrimitive::to_f64(x).unwrap()))
        .collect();
    GeneratorSet::new(gs.n(), gens, gs.unital(), ()).unwrap()
}

/// Random word combination; words are non-empty for non-unital sets.
pub fn random_word_combination<R: Rng>(gs: &GeneratorSet<BigRational>, rng: &mut R) -> Matrix<BigRational> {
    let n = gs.n();
    let mut z = Matrix::zeros(n, n, ());
    if gs.is_empty() {
        return if gs.unital() {
            Matrix::identity(n, ()).scale(&q(rng.random_range(1..=3), 1))
        } else {
            z
        };
    }
    let min_len = if gs.unital() { 0 } else { 1 };
    for _ in 0..3 {
        let len = rng.random_range(min_len..=3);
        let word: Vec<usize> = (0..len).map(|_| rng.random_range(0..gs.len())).collect();
        let c = q(rng.random_range(-3..=3), 1);
        z.add_assign(&word_matrix(gs, &word).unwrap().scale(&c)).unwrap();
    }
    z
}

/// Determinant by plain elimination over the rationals.
pub fn exact_det(m: &Matrix<BigRational>) -> BigRational {
    let n = m.rows();
    let mut a = m.to_rows();
    let mut det = BigRational::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return BigRational::zero();
        };
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        let p = a[col][col].clone();
        det *= &p;
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] / &p;
            let pivot_row = a[col].clone();
            for (x, y) in a[r].iter_mut().zip(&pivot_row).skip(col) {
                *x -= &f * y;
            }
        }
    }
    det
}

/// Prime factors of `|v|` by trial division (small inputs only).
pub fn small_prime_factors(v: &num_bigint::BigInt, limit: u64) -> Vec<u64> {
    use num_traits::Signed;
    let mut x = v.abs();
    let mut out = Vec::new();
    let mut d = 2u64;
    while d <= limit && x > num_bigint::BigInt::one() {
        let db = num_bigint::BigInt::from(d);
        if (&x % &db).is_zero() {
            out.push(d);
            while (&x % &db).is_zero() {
                x /= &db;
            }
        }
        d += 1;
    }
    out
}
