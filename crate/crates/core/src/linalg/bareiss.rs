//! Fraction-free (Bareiss) elimination for rational matrices.
//!
//! Rows are scaled to integers and eliminated with exact integer division,
//! which avoids normalizing a fraction at every step.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::Matrix;

fn lcm_of_denominators<'a>(xs: impl Iterator<Item = &'a BigRational>) -> BigInt {
    xs.fold(BigInt::one(), |l, x| l.lcm(x.denom()))
}

fn scaled(x: &BigRational, l: &BigInt) -> BigInt {
    x.numer() * (l / x.denom())
}

/// Each row multiplied by the lcm of its denominators.
fn integer_rows(m: &Matrix<BigRational>) -> Vec<Vec<BigInt>> {
    m.to_rows()
        .iter()
        .map(|row| {
            let l = lcm_of_denominators(row.iter());
            row.iter().map(|x| scaled(x, &l)).collect()
        })
        .collect()
}

/// The whole matrix multiplied by the lcm of all denominators.
fn integer_matrix(m: &Matrix<BigRational>) -> (Vec<Vec<BigInt>>, BigInt) {
    let l = lcm_of_denominators(m.data().iter());
    let rows = m
        .to_rows()
        .iter()
        .map(|row| row.iter().map(|x| scaled(x, &l)).collect())
        .collect();
    (rows, l)
}

/// Forward elimination in place. Returns the pivot column of each pivot
/// row; rows `0..pivots.len()` then hold an echelon form.
fn eliminate(a: &mut [Vec<BigInt>]) -> Vec<usize> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut prev = BigInt::one();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, pr);
        let (top, rest) = a.split_at_mut(r + 1);
        let pivot_row = &top[r];
        let p = &pivot_row[c];
        for row in rest.iter_mut() {
            let f = std::mem::take(&mut row[c]);
            for j in c + 1..cols {
                let v = p * &row[j] - &f * &pivot_row[j];
                row[j] = if prev.is_one() { v } else { v / &prev };
            }
        }
        prev = p.clone();
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Pivot columns of an echelon form of `m`.
pub(crate) fn pivots(m: &Matrix<BigRational>) -> Vec<usize> {
    eliminate(&mut integer_rows(m))
}

/// Inverse of a square matrix, or `None` when singular.
pub(crate) fn inverse(m: &Matrix<BigRational>) -> Option<Matrix<BigRational>> {
    let n = m.rows();
    let (ints, l) = integer_matrix(m);
    let mut aug: Vec<Vec<BigInt>> = ints
        .into_iter()
        .enumerate()
        .map(|(i, mut row)| {
            row.extend((0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }));
            row
        })
        .collect();
    let piv = eliminate(&mut aug);
    if piv.len() < n || piv[n - 1] != n - 1 {
        return None;
    }
    // Upper triangular system with determinant d = u_nn; solve for d * inverse
    // column by column, every division being exact.
    let d = aug[n - 1][n - 1].clone();
    let mut x = vec![vec![BigInt::zero(); n]; n];
    for col in 0..n {
        for i in (0..n).rev() {
            let mut acc = &d * &aug[i][n + col];
            for j in i + 1..n {
                acc -= &aug[i][j] * &x[j][col];
            }
            x[i][col] = acc / &aug[i][i];
        }
    }
    Some(Matrix::from_fn(n, n, (), |i, j| {
        BigRational::new(&x[i][j] * &l, d.clone())
    }))
}

/// Positive semi-definiteness of a symmetric matrix by symmetric
/// fraction-free elimination with diagonal pivots.
pub(crate) fn is_psd(m: &Matrix<BigRational>) -> bool {
    let (mut a, _) = integer_matrix(m);
    let n = a.len();
    let mut active: Vec<usize> = (0..n).collect();
    let mut prev = BigInt::one();
    while let Some(pos) = active.iter().position(|&k| !a[k][k].is_zero()) {
        let k = active.remove(pos);
        if a[k][k].is_negative() {
            return false;
        }
        let p = a[k][k].clone();
        let pivot_row = a[k].clone();
        for &i in &active {
            let f = a[i][k].clone();
            for &j in &active {
                let v = &p * &a[i][j] - &f * &pivot_row[j];
                a[i][j] = if prev.is_one() { v } else { v / &prev };
            }
        }
        prev = p;
    }
    active.iter().all(|&i| active.iter().all(|&j| a[i][j].is_zero()))
}
