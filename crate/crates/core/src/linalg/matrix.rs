use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::{Scalar, ScalarKind};

/// Dense row-major matrix over one scalar backend.
#[derive(Clone, PartialEq)]
pub struct Matrix<T: Scalar> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
    ctx: T::Ctx,
}

impl<T: Scalar> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} ({})", self.rows, self.cols, self.kind())?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl<T: Scalar> Matrix<T> {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>, ctx: T::Ctx) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|x| x.context() != ctx) {
            return Err(Error::KindMismatch(T::kind(ctx), T::kind(bad.context())));
        }
        Ok(Matrix {
            rows,
            cols,
            data,
            ctx,
        })
    }

    pub fn from_rows(rows: Vec<Vec<T>>, ctx: T::Ctx) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Shape("ragged rows".into()));
        }
        Self::from_vec(r, c, rows.into_iter().flatten().collect(), ctx)
    }

    pub fn from_fn(rows: usize, cols: usize, ctx: T::Ctx, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix {
            rows,
            cols,
            data,
            ctx,
        }
    }

    pub fn zeros(rows: usize, cols: usize, ctx: T::Ctx) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(ctx); rows * cols],
            ctx,
        }
    }

    pub fn identity(n: usize, ctx: T::Ctx) -> Self {
        Self::from_fn(n, n, ctx, |i, j| if i == j { T::one(ctx) } else { T::zero(ctx) })
    }

    /// Builds a matrix whose columns are the given vectors (each of length `rows`).
    pub fn from_columns(rows: usize, columns: &[Vec<T>], ctx: T::Ctx) -> Self {
        Self::from_fn(rows, columns.len(), ctx, |i, j| columns[j][i].clone())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn ctx(&self) -> T::Ctx {
        self.ctx
    }

    pub fn kind(&self) -> ScalarKind {
        T::kind(self.ctx)
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<T>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn map(&self, f: impl Fn(&T) -> T) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
            ctx: self.ctx,
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, self.ctx, |i, j| self.get(j, i).clone())
    }

    /// Entrywise complex conjugate (identity on real kinds).
    pub fn conj(&self) -> Self {
        self.map(T::conj)
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, self.ctx, |i, j| self.get(j, i).conj())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(T::is_zero)
    }

    fn same_kind(&self, other: &Self) -> Result<()> {
        if self.ctx != other.ctx {
            return Err(Error::KindMismatch(self.kind(), other.kind()));
        }
        Ok(())
    }

    fn same_shape(&self, other: &Self, op: &str) -> Result<()> {
        self.same_kind(other)?;
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::Shape(format!(
                "{op}: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other, "add")?;
        Ok(Matrix {
            data: self.data.iter().zip(&other.data).map(|(a, b)| a.add(b)).collect(),
            ..self.clone()
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_shape(other, "sub")?;
        Ok(Matrix {
            data: self.data.iter().zip(&other.data).map(|(a, b)| a.sub(b)).collect(),
            ..self.clone()
        })
    }

    pub fn add_assign(&mut self, other: &Self) -> Result<()> {
        self.same_shape(other, "add")?;
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a = a.add(b);
        }
        Ok(())
    }

    pub fn scale(&self, s: &T) -> Self {
        self.map(|x| x.mul(s))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_kind(other)?;
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "mul: {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols, self.ctx);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                let row_b = other.row(k);
                let row_out = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (o, b) in row_out.iter_mut().zip(row_b) {
                    if !b.is_zero() {
                        *o = o.add(&a.mul(b));
                    }
                }
            }
        }
        Ok(out)
    }

    /// `self^k` by repeated squaring.
    pub fn pow(&self, mut k: u64) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Shape("pow of non-square matrix".into()));
        }
        let mut acc = Self::identity(self.rows, self.ctx);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hcat(&self, other: &Self) -> Result<Self> {
        self.same_kind(other)?;
        if self.rows != other.rows {
            return Err(Error::Shape("hcat: row counts differ".into()));
        }
        Ok(Self::from_fn(self.rows, self.cols + other.cols, self.ctx, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                other.get(i, j - self.cols).clone()
            }
        }))
    }

    pub fn select_columns(&self, idx: &[usize]) -> Self {
        Self::from_fn(self.rows, idx.len(), self.ctx, |i, j| self.get(i, idx[j]).clone())
    }

    /// Applies `f` entrywise into another scalar backend.
    pub fn convert<U: Scalar>(&self, ctx: U::Ctx, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
            ctx,
        }
    }
}
