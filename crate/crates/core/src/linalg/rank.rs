//! Rank, column spaces, null spaces, inverses and PSD tests.
//!
//! Exact kinds use Gauss-Jordan elimination; approximate kinds use an SVD
//! and a singular-value cutoff.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::echelon::Accumulator;
use super::Matrix;
use crate::error::{Error, Result};
use crate::scalar::{RealValue, Scalar};

/// A rank cut with a retained/discarded singular-value ratio below this is
/// reported as ill-conditioned.
pub const CONDITIONING_GAP: f64 = 1e3;

/// Default relative residual for approximate membership.
pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    /// Singular-value cutoff; `None` uses `max(rows, cols) * eps * sigma_max`.
    pub rank: Option<f64>,
    /// Relative residual for range membership on approximate kinds.
    pub residual: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            rank: None,
            residual: DEFAULT_RESIDUAL_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankReport {
    pub rank: usize,
    /// Cutoff actually used (approximate kinds only).
    pub tol: Option<f64>,
    pub singular_values: Option<Vec<f64>>,
    pub ill_conditioned: bool,
}

pub fn default_tol(rows: usize, cols: usize, sigma_max: f64) -> f64 {
    rows.max(cols) as f64 * f64::EPSILON * sigma_max
}

/// Reduced row echelon form and the pivot column of each nonzero row.
/// On approximate kinds pivots are chosen by magnitude and entries at most
/// `tol` count as zero.
pub fn rref<T: Scalar>(a: &Matrix<T>, tol: f64) -> (Matrix<T>, Vec<usize>) {
    let (rows, cols) = (a.rows(), a.cols());
    let ctx = a.ctx();
    let mut m = a.to_rows();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let pick = if T::EXACT {
            (r..rows).find(|&i| !m[i][c].is_zero())
        } else {
            (r..rows)
                .max_by(|&i, &j| m[i][c].magnitude().total_cmp(&m[j][c].magnitude()))
                .filter(|&i| m[i][c].magnitude() > tol)
        };
        let Some(pr) = pick else { continue };
        m.swap(r, pr);
        let inv = m[r][c].inv().expect("nonzero pivot");
        for x in m[r].iter_mut() {
            *x = x.mul(&inv);
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x = x.sub(&f.mul(p));
                }
            }
            if !T::EXACT {
                row[c] = T::zero(ctx);
            }
        }
        pivots.push(c);
        r += 1;
    }
    (Matrix::from_rows(m, ctx).unwrap_or_else(|_| Matrix::zeros(rows, cols, ctx)), pivots)
}

fn exact_pivots<T: Scalar>(a: &Matrix<T>) -> Vec<usize> {
    T::fast_pivots(a).unwrap_or_else(|| rref(a, 0.0).1)
}

fn max_magnitude<T: Scalar>(a: &Matrix<T>) -> f64 {
    a.data().iter().map(T::magnitude).fold(0.0, f64::max)
}

pub fn inverse<T: Scalar>(a: &Matrix<T>) -> Result<Matrix<T>> {
    if !a.is_square() {
        return Err(Error::Shape(format!("inverse of {}x{}", a.rows(), a.cols())));
    }
    if let Some(inv) = T::fast_inverse(a) {
        return inv.ok_or(Error::Singular);
    }
    let n = a.rows();
    let tol = if T::EXACT {
        0.0
    } else {
        default_tol(n, n, max_magnitude(a))
    };
    let aug = a.hcat(&Matrix::identity(n, a.ctx()))?;
    let (r, pivots) = rref(&aug, tol);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return Err(Error::Singular);
    }
    Ok(Matrix::from_fn(n, n, a.ctx(), |i, j| r.get(i, n + j).clone()))
}

fn approx_rank(sv: &[f64], rows: usize, cols: usize, tol: Option<f64>) -> RankReport {
    let smax = sv.first().copied().unwrap_or(0.0);
    let tol = tol.unwrap_or_else(|| default_tol(rows, cols, smax));
    let rank = sv.iter().take_while(|&&s| s > tol).count();
    let ill_conditioned = rank > 0
        && rank < sv.len()
        && sv[rank] > 0.0
        && sv[rank - 1] / sv[rank] < CONDITIONING_GAP;
    RankReport {
        rank,
        tol: Some(tol),
        singular_values: Some(sv.to_vec()),
        ill_conditioned,
    }
}

pub fn rank_report<T: Scalar>(a: &Matrix<T>, tol: Option<f64>) -> RankReport {
    if T::EXACT {
        let pivots = exact_pivots(a);
        RankReport {
            rank: pivots.len(),
            tol: None,
            singular_values: None,
            ill_conditioned: false,
        }
    } else {
        let svd = T::svd(a).expect("approximate kinds provide an SVD");
        let mut sv = svd.singular_values;
        sv.truncate(a.rows().min(a.cols()));
        approx_rank(&sv, a.rows(), a.cols(), tol)
    }
}

pub fn rank<T: Scalar>(a: &Matrix<T>, tol: Option<f64>) -> usize {
    rank_report(a, tol).rank
}

/// Basis of the column space: pivot columns of `a` on exact kinds, an
/// orthonormal basis on approximate kinds.
pub fn range_basis<T: Scalar>(a: &Matrix<T>, tol: Option<f64>) -> Matrix<T> {
    if T::EXACT {
        a.select_columns(&exact_pivots(a))
    } else {
        let svd = T::svd(a).expect("approximate kinds provide an SVD");
        let k = a.rows().min(a.cols());
        let r = approx_rank(&svd.singular_values[..k], a.rows(), a.cols(), tol).rank;
        svd.u.select_columns(&(0..r).collect::<Vec<_>>())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InRange {
    pub member: bool,
    /// Exact kinds: 0 for members, otherwise the squared norm of the
    /// remainder (rationals) or its count of nonzero entries (prime fields).
    /// Approximate kinds: Euclidean norm of the least-squares residual.
    pub residual: f64,
}

pub fn in_range<T: Scalar>(a: &Matrix<T>, v: &Matrix<T>, tol: &Tolerance) -> Result<InRange> {
    if v.cols() != 1 || v.rows() != a.rows() {
        return Err(Error::Shape(format!(
            "vector {}x{} against {} rows",
            v.rows(),
            v.cols(),
            a.rows()
        )));
    }
    if a.ctx() != v.ctx() {
        return Err(Error::KindMismatch(a.kind(), v.kind()));
    }
    let target = v.column(0);
    if T::EXACT {
        let independent = match T::fast_pivots(a) {
            Some(piv) => {
                if !T::fast_pivots(&a.hcat(v)?).expect("same backend").contains(&a.cols()) {
                    return Ok(InRange {
                        member: true,
                        residual: 0.0,
                    });
                }
                a.select_columns(&piv)
            }
            None => a.clone(),
        };
        let mut acc = Accumulator::new(a.rows(), a.ctx());
        for col in independent.columns() {
            acc.insert(&col);
        }
        let red = acc.reduce(&target);
        let residual = if red.dependent {
            0.0
        } else {
            let sq: Option<f64> = red
                .remainder
                .iter()
                .map(|x| x.abs_sq().map(|r| r.to_f64()))
                .sum();
            sq.unwrap_or_else(|| red.remainder.iter().filter(|x| !x.is_zero()).count() as f64)
        };
        Ok(InRange {
            member: red.dependent,
            residual,
        })
    } else {
        let basis = range_basis(a, tol.rank);
        let mut rem = target.clone();
        for q in basis.columns() {
            let c = q
                .iter()
                .zip(&rem)
                .fold(T::zero(a.ctx()), |acc, (x, y)| acc.add(&x.conj().mul(y)));
            for (r, x) in rem.iter_mut().zip(&q) {
                *r = r.sub(&c.mul(x));
            }
        }
        let norm = |w: &[T]| -> f64 {
            w.iter()
                .map(|x| x.abs_sq().map_or(0.0, |r| r.to_f64()))
                .sum::<f64>()
                .sqrt()
        };
        let residual = norm(&rem);
        Ok(InRange {
            member: residual <= tol.residual * norm(&target).max(1.0),
            residual,
        })
    }
}

/// Basis of `{x : a x = 0}` as columns.
pub fn null_space<T: Scalar>(a: &Matrix<T>, tol: Option<f64>) -> Matrix<T> {
    let ctx = a.ctx();
    let cols = a.cols();
    if T::EXACT {
        let (r, pivots) = rref(a, 0.0);
        let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
        let vectors: Vec<Vec<T>> = free
            .iter()
            .map(|&f| {
                let mut x = vec![T::zero(ctx); cols];
                x[f] = T::one(ctx);
                for (row, &pc) in pivots.iter().enumerate() {
                    x[pc] = r.get(row, f).neg();
                }
                x
            })
            .collect();
        Matrix::from_columns(cols, &vectors, ctx)
    } else {
        let svd = T::svd(a).expect("approximate kinds provide an SVD");
        let k = a.rows().min(a.cols());
        let r = approx_rank(&svd.singular_values[..k], a.rows(), a.cols(), tol).rank;
        svd.v.select_columns(&(r..cols).collect::<Vec<_>>())
    }
}

/// Basis of `col(u) ∩ col(v)`, assuming each input has independent columns.
/// Every null vector `(x; y)` of `[u | -v]` contributes `u x`.
pub fn subspace_intersect<T: Scalar>(u: &Matrix<T>, v: &Matrix<T>, tol: Option<f64>) -> Result<Matrix<T>> {
    if u.rows() != v.rows() {
        return Err(Error::Shape("subspace_intersect: row counts differ".into()));
    }
    let neg_v = v.map(T::neg);
    let block = u.hcat(&neg_v)?;
    let ns = null_space(&block, tol);
    let x = Matrix::from_fn(u.cols(), ns.cols(), u.ctx(), |i, j| ns.get(i, j).clone());
    let w = u.mul(&x)?;
    if T::EXACT {
        Ok(w)
    } else {
        Ok(range_basis(&w, tol))
    }
}

pub fn is_hermitian<T: Scalar>(a: &Matrix<T>, tol: f64) -> bool {
    if !a.is_square() {
        return false;
    }
    let n = a.rows();
    for i in 0..n {
        for j in i..n {
            let diff = a.get(i, j).sub(&a.get(j, i).conj());
            if T::EXACT {
                if !diff.is_zero() {
                    return false;
                }
            } else if diff.magnitude() > tol {
                return false;
            }
        }
    }
    true
}

/// Positive semi-definiteness. Exact kinds: Hermitian symmetry plus
/// symmetric elimination with diagonal pivots (a negative pivot, or a zero
/// pivot with a nonzero row, refutes PSD). Approximate kinds: smallest
/// eigenvalue at least `-tol` (default `n * eps * max|lambda|`).
pub fn is_psd<T: Scalar>(a: &Matrix<T>, tol: Option<f64>) -> Result<bool> {
    if !a.is_square() {
        return Ok(false);
    }
    let n = a.rows();
    if T::EXACT {
        if !is_hermitian(a, 0.0) {
            return Ok(false);
        }
        if let Some(psd) = T::fast_is_psd(a) {
            return Ok(psd);
        }
        let mut m = a.to_rows();
        let mut active: Vec<usize> = (0..n).collect();
        while let Some(pos) = active.iter().position(|&k| !m[k][k].is_zero()) {
            let k = active.remove(pos);
            let d = m[k][k].clone();
            let sign = d
                .real_sign()
                .ok_or_else(|| Error::Unsupported(format!("PSD test over {}", a.kind())))?;
            if sign == Ordering::Less {
                return Ok(false);
            }
            let inv = d.inv().expect("nonzero pivot");
            let pivot_row = m[k].clone();
            for &i in &active {
                let f = m[i][k].mul(&inv);
                if f.is_zero() {
                    continue;
                }
                for &j in &active {
                    let delta = f.mul(&pivot_row[j]);
                    m[i][j] = m[i][j].sub(&delta);
                }
            }
        }
        // Remaining active block has zero diagonal; PSD forces it to vanish.
        Ok(active.iter().all(|&i| active.iter().all(|&j| m[i][j].is_zero())))
    } else {
        if !is_hermitian(a, tol.unwrap_or_else(|| default_tol(n, n, max_magnitude(a)) * 16.0)) {
            return Ok(false);
        }
        let eigs = T::hermitian_eigenvalues(a).expect("approximate kinds provide eigenvalues");
        let lmax = eigs.iter().map(|x| f64::abs(*x)).fold(0.0f64, f64::max);
        let tol = tol.unwrap_or_else(|| default_tol(n, n, lmax));
        Ok(eigs.iter().all(|&l| l >= -tol))
    }
}
