//! Vectorization, block realignment and the Kronecker product.
//!
//! Conventions (1-based in prose, 0-based in code):
//! - `vec` stacks columns, so entry `(i, j)` of an `r x c` matrix lands at `i + j*r`.
//! - `kron(A, B)` is the block matrix whose `(k, l)` block is `b_kl * A`.
//! - `psi` views its input as a grid of blocks and lists the block
//!   vectorizations as columns, in column-major block order. With these
//!   three conventions `psi(kron(A, B)) = vec(A) vec(B)^T`.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::Matrix;
use crate::error::{Error, Result};
use crate::scalar::{RealValue, Scalar, ScalarKind};

/// Block parameters for [`psi`]: the input is `(n*m) x (p*q)`, an `m x q`
/// grid of `n x p` blocks; the output is `(n*p) x (m*q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockShape {
    pub n: usize,
    pub m: usize,
    pub p: usize,
    pub q: usize,
}

impl BlockShape {
    pub fn square(n: usize) -> Self {
        BlockShape { n, m: n, p: n, q: n }
    }

    /// The shape whose `psi` undoes this one.
    pub fn transposed(self) -> Self {
        BlockShape {
            n: self.n,
            m: self.p,
            p: self.m,
            q: self.q,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormKind {
    Frobenius,
    L1,
    LInf,
}

pub fn kron<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>) -> Result<Matrix<T>> {
    if a.ctx() != b.ctx() {
        return Err(Error::KindMismatch(a.kind(), b.kind()));
    }
    let (n, m) = (a.rows(), a.cols());
    Ok(Matrix::from_fn(n * b.rows(), m * b.cols(), a.ctx(), |r, c| {
        let (i, k) = (r % n, r / n);
        let (j, l) = (c % m, c / m);
        b.get(k, l).mul(a.get(i, j))
    }))
}

pub fn vec<T: Scalar>(a: &Matrix<T>) -> Matrix<T> {
    let r = a.rows();
    Matrix::from_fn(r * a.cols(), 1, a.ctx(), |idx, _| a.get(idx % r, idx / r).clone())
}

pub fn unvec<T: Scalar>(v: &Matrix<T>, rows: usize, cols: usize) -> Result<Matrix<T>> {
    if v.cols() != 1 || v.rows() != rows * cols {
        return Err(Error::Shape(format!(
            "cannot unvec a {}x{} matrix into {rows}x{cols}",
            v.rows(),
            v.cols()
        )));
    }
    Ok(Matrix::from_fn(rows, cols, v.ctx(), |i, j| v.get(i + j * rows, 0).clone()))
}

/// Same as [`unvec`] for a plain slice.
pub fn unvec_slice<T: Scalar>(v: &[T], rows: usize, cols: usize, ctx: T::Ctx) -> Result<Matrix<T>> {
    if v.len() != rows * cols {
        return Err(Error::Shape(format!(
            "cannot unvec {} entries into {rows}x{cols}",
            v.len()
        )));
    }
    Ok(Matrix::from_fn(rows, cols, ctx, |i, j| v[i + j * rows].clone()))
}

pub fn psi<T: Scalar>(a: &Matrix<T>, shape: BlockShape) -> Result<Matrix<T>> {
    let BlockShape { n, m, p, q } = shape;
    if a.rows() != n * m || a.cols() != p * q {
        return Err(Error::Shape(format!(
            "psi with shape ({n},{m},{p},{q}) needs a {}x{} matrix, got {}x{}",
            n * m,
            p * q,
            a.rows(),
            a.cols()
        )));
    }
    // Output column j + l*m is vec of block (j, l); entry a + b*n of that
    // column is A[j*n + a, l*p + b].
    Ok(Matrix::from_fn(n * p, m * q, a.ctx(), |r, c| {
        let (ai, bi) = (r % n, r / n);
        let (j, l) = (c % m, c / m);
        a.get(j * n + ai, l * p + bi).clone()
    }))
}

/// `psi` for an `n^2 x n^2` matrix with all four block parameters equal to `n`.
pub fn psi_square<T: Scalar>(a: &Matrix<T>) -> Result<Matrix<T>> {
    let n = integer_sqrt(a.rows())
        .filter(|&n| n * n == a.cols())
        .ok_or_else(|| Error::Shape(format!("{}x{} is not n^2 x n^2", a.rows(), a.cols())))?;
    psi(a, BlockShape::square(n))
}

fn integer_sqrt(x: usize) -> Option<usize> {
    let r = (x as f64).sqrt().round() as usize;
    (r * r == x).then_some(r)
}

pub fn frobenius_sq<T: Scalar>(a: &Matrix<T>) -> Result<T::Real> {
    let mut acc = T::Real::zero();
    for x in a.data() {
        acc = acc + x.abs_sq().ok_or_else(|| norm_unsupported(a.kind()))?;
    }
    Ok(acc)
}

fn norm_unsupported(kind: ScalarKind) -> Error {
    Error::Unsupported(format!("norms are not defined over {kind}"))
}

fn max_abs_sum<T: Scalar>(a: &Matrix<T>, lines: impl Iterator<Item = Vec<T>>) -> Result<T::Real> {
    let mut best = T::Real::zero();
    for line in lines {
        let mut s = T::Real::zero();
        for x in &line {
            s = s + x.abs_real().ok_or_else(|| norm_unsupported(a.kind()))?;
        }
        if s > best {
            best = s;
        }
    }
    Ok(best)
}

/// Matrix norm. On exact rationals `Frobenius` returns the *squared* norm so
/// the value stays in the field; compare squared quantities there.
pub fn norm<T: Scalar>(a: &Matrix<T>, which: NormKind) -> Result<T::Real> {
    match which {
        NormKind::Frobenius => {
            let sq = frobenius_sq(a)?;
            if T::EXACT {
                Ok(sq)
            } else {
                sq.sqrt()
                    .ok_or_else(|| Error::Numeric("square root of Frobenius norm".into()))
            }
        }
        NormKind::L1 => max_abs_sum(a, a.columns().into_iter()),
        NormKind::LInf => max_abs_sum(a, a.to_rows().into_iter()),
    }
}
