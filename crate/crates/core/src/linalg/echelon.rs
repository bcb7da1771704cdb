//! Incremental span bookkeeping.
//!
//! On exact kinds each stored row is normalized to 1 at its pivot and has
//! zeros at the pivots of all earlier rows, so reducing against the rows in
//! insertion order clears every pivot coordinate. On approximate kinds the
//! rows are orthonormal and reduction is two passes of modified Gram-Schmidt.

use crate::scalar::{RealValue, Scalar};

/// Relative residual under which an approximate vector counts as dependent.
pub const DEFAULT_INDEPENDENCE_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct Accumulator<T: Scalar> {
    dim: usize,
    ctx: T::Ctx,
    rows: Vec<Vec<T>>,
    pivots: Vec<usize>,
    /// `expressions[k]` writes `rows[k]` in terms of the inserted elements.
    expressions: Option<Vec<Vec<T>>>,
    tol: f64,
}

/// Outcome of reducing a vector against the accumulator.
#[derive(Debug, Clone)]
pub struct Reduction<T: Scalar> {
    pub remainder: Vec<T>,
    /// Coefficient of each stored row that was subtracted.
    pub coefficients: Vec<T>,
    pub dependent: bool,
}

fn norm_sq<T: Scalar>(v: &[T]) -> f64 {
    v.iter()
        .map(|x| x.abs_sq().map_or(0.0, |r| r.to_f64()))
        .sum()
}

impl<T: Scalar> Accumulator<T> {
    pub fn new(dim: usize, ctx: T::Ctx) -> Self {
        Accumulator {
            dim,
            ctx,
            rows: Vec::new(),
            pivots: Vec::new(),
            expressions: None,
            tol: DEFAULT_INDEPENDENCE_TOL,
        }
    }

    /// Also tracks how each stored row is built from the inserted vectors, so
    /// that [`Accumulator::express`] can write members in those terms.
    pub fn with_expressions(dim: usize, ctx: T::Ctx) -> Self {
        Accumulator {
            expressions: Some(Vec::new()),
            ..Self::new(dim, ctx)
        }
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    pub fn reduce(&self, v: &[T]) -> Reduction<T> {
        assert_eq!(v.len(), self.dim, "vector length");
        let mut rem = v.to_vec();
        let mut coeffs = vec![T::zero(self.ctx); self.rows.len()];
        if T::EXACT {
            for (k, (row, &p)) in self.rows.iter().zip(&self.pivots).enumerate() {
                let c = rem[p].clone();
                if c.is_zero() {
                    continue;
                }
                for (r, x) in rem.iter_mut().zip(row) {
                    if !x.is_zero() {
                        *r = r.sub(&c.mul(x));
                    }
                }
                coeffs[k] = c;
            }
            let dependent = rem.iter().all(T::is_zero);
            Reduction {
                remainder: rem,
                coefficients: coeffs,
                dependent,
            }
        } else {
            for _pass in 0..2 {
                for (k, q) in self.rows.iter().enumerate() {
                    let c = q
                        .iter()
                        .zip(&rem)
                        .fold(T::zero(self.ctx), |acc, (a, b)| acc.add(&a.conj().mul(b)));
                    for (r, x) in rem.iter_mut().zip(q) {
                        *r = r.sub(&c.mul(x));
                    }
                    coeffs[k] = coeffs[k].add(&c);
                }
            }
            let scale = norm_sq(v).sqrt().max(1.0);
            let dependent = norm_sq(&rem).sqrt() <= self.tol * scale;
            Reduction {
                remainder: rem,
                coefficients: coeffs,
                dependent,
            }
        }
    }

    /// Inserts `v` if it enlarges the span. Returns whether it did.
    pub fn insert(&mut self, v: &[T]) -> bool {
        let red = self.reduce(v);
        if red.dependent {
            return false;
        }
        let k = self.rows.len();
        let (pivot, scale) = if T::EXACT {
            let p = red
                .remainder
                .iter()
                .position(|x| !x.is_zero())
                .expect("independent remainder is nonzero");
            (p, red.remainder[p].inv().expect("nonzero pivot"))
        } else {
            let nrm = norm_sq(&red.remainder).sqrt();
            (usize::MAX, T::from_f64(1.0 / nrm, self.ctx))
        };
        let row: Vec<T> = red.remainder.iter().map(|x| x.mul(&scale)).collect();
        if let Some(exprs) = self.expressions.as_mut() {
            // row = scale * (e_k - sum_j c_j * rows[j])
            let mut e = vec![T::zero(self.ctx); k + 1];
            e[k] = T::one(self.ctx);
            for (c, expr) in red.coefficients.iter().zip(exprs.iter()) {
                if c.is_zero() {
                    continue;
                }
                for (slot, x) in e.iter_mut().zip(expr) {
                    *slot = slot.sub(&c.mul(x));
                }
            }
            for x in e.iter_mut() {
                *x = x.mul(&scale);
            }
            for expr in exprs.iter_mut() {
                expr.push(T::zero(self.ctx));
            }
            exprs.push(e);
        }
        self.rows.push(row);
        self.pivots.push(pivot);
        true
    }

    /// Coefficients `c` with `sum_k c_k * inserted_k = v`, or `None` when `v`
    /// lies outside the span. Requires expression tracking.
    pub fn express(&self, v: &[T]) -> Option<Vec<T>> {
        let exprs = self
            .expressions
            .as_ref()
            .expect("accumulator built without expression tracking");
        let red = self.reduce(v);
        if !red.dependent {
            return None;
        }
        let mut out = vec![T::zero(self.ctx); self.rows.len()];
        for (c, expr) in red.coefficients.iter().zip(exprs) {
            if c.is_zero() {
                continue;
            }
            for (slot, x) in out.iter_mut().zip(expr) {
                *slot = slot.add(&c.mul(x));
            }
        }
        Some(out)
    }
}
