//! Scalar backends: approximate reals and complexes, exact rationals, and
//! prime fields.
//!
//! Every matrix routine in the crate is generic over [`Scalar`]. Exact kinds
//! go through elimination; approximate kinds route rank-type questions
//! through an SVD (see [`Scalar::svd`]).

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use nalgebra as na;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{bareiss, Matrix};
use crate::primes::{is_prime, mul_mod, pow_mod};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ScalarKind {
    ApproxReal,
    ApproxComplex,
    ExactRational,
    PrimeField(u64),
}

impl ScalarKind {
    pub fn prime_field(p: u64) -> Result<Self> {
        PrimeModulus::new(p).map(|m| ScalarKind::PrimeField(m.get()))
    }

    pub fn is_exact(self) -> bool {
        matches!(self, ScalarKind::ExactRational | ScalarKind::PrimeField(_))
    }
}

impl fmt::Display for ScalarKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarKind::ApproxReal => f.write_str("f64"),
            ScalarKind::ApproxComplex => f.write_str("c64"),
            ScalarKind::ExactRational => f.write_str("rational"),
            ScalarKind::PrimeField(p) => write!(f, "gfp:{p}"),
        }
    }
}

/// A modulus that passed a deterministic primality test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeModulus(u64);

impl PrimeModulus {
    pub fn new(p: u64) -> Result<Self> {
        if is_prime(p) {
            Ok(PrimeModulus(p))
        } else {
            Err(Error::NotPrime(p))
        }
    }

    pub fn get(self) -> u64 {
        self.0
    }
}

/// Ordered magnitude type: `f64` for approximate kinds, `BigRational` for
/// exact rationals.
pub trait RealValue:
    Clone + PartialOrd + fmt::Debug + Zero + One + Add<Output = Self> + Send + Sync
{
    fn to_f64(&self) -> f64;
    fn ceil_int(&self) -> BigInt;
    /// `None` when the root is not representable (irrational rationals).
    fn sqrt(&self) -> Option<Self>;
}

impl RealValue for f64 {
    fn to_f64(&self) -> f64 {
        *self
    }

    fn ceil_int(&self) -> BigInt {
        BigInt::from(self.ceil() as i128)
    }

    fn sqrt(&self) -> Option<Self> {
        Some(f64::sqrt(*self))
    }
}

impl RealValue for BigRational {
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn ceil_int(&self) -> BigInt {
        self.ceil().to_integer()
    }

    fn sqrt(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        let (n, d) = (self.numer().sqrt(), self.denom().sqrt());
        let root = BigRational::new(n, d);
        (&root * &root == *self).then_some(root)
    }
}

/// Thin SVD with singular values sorted in decreasing order.
#[derive(Debug, Clone)]
pub struct Svd<T: Scalar> {
    pub u: Matrix<T>,
    pub singular_values: Vec<f64>,
    /// Right singular vectors as columns.
    pub v: Matrix<T>,
}

pub trait Scalar: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync + 'static {
    /// Runtime data needed to build constants (the modulus for prime fields).
    type Ctx: Copy + Eq + fmt::Debug + Send + Sync;
    type Real: RealValue;
    const EXACT: bool;

    fn kind(ctx: Self::Ctx) -> ScalarKind;
    fn context(&self) -> Self::Ctx;

    fn zero(ctx: Self::Ctx) -> Self;
    fn one(ctx: Self::Ctx) -> Self;
    fn from_i64(v: i64, ctx: Self::Ctx) -> Self;
    /// `None` when the denominator is not invertible in the target field.
    fn from_rational(r: &BigRational, ctx: Self::Ctx) -> Option<Self>;
    /// Only meaningful on approximate kinds; exact kinds convert exactly.
    fn from_f64(x: f64, ctx: Self::Ctx) -> Self;

    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inv(&self) -> Option<Self>;
    fn is_zero(&self) -> bool;

    fn div(&self, rhs: &Self) -> Option<Self> {
        rhs.inv().map(|r| self.mul(&r))
    }

    fn conj(&self) -> Self {
        self.clone()
    }

    /// Absolute value; `None` on prime fields.
    fn abs_real(&self) -> Option<Self::Real>;
    /// `|x|^2`; `None` on prime fields.
    fn abs_sq(&self) -> Option<Self::Real>;

    /// Size used for pivot choice on approximate kinds.
    fn magnitude(&self) -> f64;

    /// Sign of the real part; `None` on prime fields.
    fn real_sign(&self) -> Option<Ordering>;

    fn svd(_m: &Matrix<Self>) -> Option<Svd<Self>> {
        None
    }

    fn hermitian_eigenvalues(_m: &Matrix<Self>) -> Option<Vec<f64>> {
        None
    }

    /// Echelon pivot columns from a specialized exact elimination.
    fn fast_pivots(_m: &Matrix<Self>) -> Option<Vec<usize>> {
        None
    }

    /// Specialized exact inverse; the inner `None` means singular.
    fn fast_inverse(_m: &Matrix<Self>) -> Option<Option<Matrix<Self>>> {
        None
    }

    /// Specialized exact PSD test for a Hermitian matrix.
    fn fast_is_psd(_m: &Matrix<Self>) -> Option<bool> {
        None
    }
}

fn to_dmatrix<T: na::Scalar + Scalar>(m: &Matrix<T>) -> na::DMatrix<T> {
    na::DMatrix::from_row_slice(m.rows(), m.cols(), m.data())
}

fn from_dmatrix<T: na::Scalar + Scalar<Ctx = ()>>(m: &na::DMatrix<T>) -> Matrix<T> {
    let data = (0..m.nrows())
        .flat_map(|i| (0..m.ncols()).map(move |j| (i, j)))
        .map(|(i, j)| m[(i, j)].clone())
        .collect();
    Matrix::from_vec(m.nrows(), m.ncols(), data, ()).expect("shape from nalgebra")
}

fn svd_via_nalgebra<T>(m: &Matrix<T>) -> Svd<T>
where
    T: Scalar<Ctx = ()> + na::ComplexField<RealField = f64>,
{
    // Zero rows do not change the right null space; padding makes V square.
    let rows = m.rows().max(m.cols());
    let mut dm = na::DMatrix::<T>::zeros(rows, m.cols());
    dm.view_mut((0, 0), (m.rows(), m.cols()))
        .copy_from(&to_dmatrix(m));
    let svd = na::linalg::SVD::new(dm, true, true);
    let u = svd.u.expect("u requested");
    let v_t = svd.v_t.expect("v_t requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[b]
            .partial_cmp(&svd.singular_values[a])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let k = order.len();
    let mut u_sorted = na::DMatrix::<T>::zeros(m.rows(), k);
    let mut v_sorted = na::DMatrix::<T>::zeros(m.cols(), k);
    for (dst, &src) in order.iter().enumerate() {
        for i in 0..m.rows() {
            u_sorted[(i, dst)] = u[(i, src)].clone();
        }
        for j in 0..m.cols() {
            v_sorted[(j, dst)] = v_t[(src, j)].clone().conjugate();
        }
    }
    Svd {
        u: from_dmatrix(&u_sorted),
        singular_values: order.iter().map(|&i| svd.singular_values[i]).collect(),
        v: from_dmatrix(&v_sorted),
    }
}

fn hermitian_eigs<T>(m: &Matrix<T>) -> Vec<f64>
where
    T: Scalar<Ctx = ()> + na::ComplexField<RealField = f64>,
{
    let eig = na::SymmetricEigen::new(to_dmatrix(m));
    eig.eigenvalues.iter().copied().collect()
}

impl Scalar for f64 {
    type Ctx = ();
    type Real = f64;
    const EXACT: bool = false;

    fn kind(_: ()) -> ScalarKind {
        ScalarKind::ApproxReal
    }
    fn context(&self) {}
    fn zero(_: ()) -> Self {
        0.0
    }
    fn one(_: ()) -> Self {
        1.0
    }
    fn from_i64(v: i64, _: ()) -> Self {
        v as f64
    }
    fn from_rational(r: &BigRational, _: ()) -> Option<Self> {
        ToPrimitive::to_f64(r)
    }
    fn from_f64(x: f64, _: ()) -> Self {
        x
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Option<Self> {
        (*self != 0.0).then(|| 1.0 / self)
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn abs_real(&self) -> Option<f64> {
        Some(f64::abs(*self))
    }
    fn abs_sq(&self) -> Option<f64> {
        Some(self * self)
    }
    fn magnitude(&self) -> f64 {
        f64::abs(*self)
    }
    fn real_sign(&self) -> Option<Ordering> {
        self.partial_cmp(&0.0)
    }
    fn svd(m: &Matrix<Self>) -> Option<Svd<Self>> {
        Some(svd_via_nalgebra(m))
    }
    fn hermitian_eigenvalues(m: &Matrix<Self>) -> Option<Vec<f64>> {
        Some(hermitian_eigs(m))
    }
}

impl Scalar for Complex64 {
    type Ctx = ();
    type Real = f64;
    const EXACT: bool = false;

    fn kind(_: ()) -> ScalarKind {
        ScalarKind::ApproxComplex
    }
    fn context(&self) {}
    fn zero(_: ()) -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one(_: ()) -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_i64(v: i64, _: ()) -> Self {
        Complex64::new(v as f64, 0.0)
    }
    fn from_rational(r: &BigRational, _: ()) -> Option<Self> {
        ToPrimitive::to_f64(r).map(|x| Complex64::new(x, 0.0))
    }
    fn from_f64(x: f64, _: ()) -> Self {
        Complex64::new(x, 0.0)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Option<Self> {
        (!Scalar::is_zero(self)).then(|| Complex64::new(1.0, 0.0) / self)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn abs_real(&self) -> Option<f64> {
        Some(self.norm())
    }
    fn abs_sq(&self) -> Option<f64> {
        Some(self.norm_sqr())
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn real_sign(&self) -> Option<Ordering> {
        self.re.partial_cmp(&0.0)
    }
    fn svd(m: &Matrix<Self>) -> Option<Svd<Self>> {
        Some(svd_via_nalgebra(m))
    }
    fn hermitian_eigenvalues(m: &Matrix<Self>) -> Option<Vec<f64>> {
        Some(hermitian_eigs(m))
    }
}

impl Scalar for BigRational {
    type Ctx = ();
    type Real = BigRational;
    const EXACT: bool = true;

    fn kind(_: ()) -> ScalarKind {
        ScalarKind::ExactRational
    }
    fn context(&self) {}
    fn zero(_: ()) -> Self {
        <BigRational as Zero>::zero()
    }
    fn one(_: ()) -> Self {
        <BigRational as One>::one()
    }
    fn from_i64(v: i64, _: ()) -> Self {
        BigRational::from_integer(v.into())
    }
    fn from_rational(r: &BigRational, _: ()) -> Option<Self> {
        Some(r.clone())
    }
    fn from_f64(x: f64, _: ()) -> Self {
        BigRational::from_float(x).unwrap_or_else(<BigRational as Zero>::zero)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Option<Self> {
        (!Zero::is_zero(self)).then(|| self.recip())
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn abs_real(&self) -> Option<BigRational> {
        Some(Signed::abs(self))
    }
    fn abs_sq(&self) -> Option<BigRational> {
        Some(self * self)
    }
    fn magnitude(&self) -> f64 {
        RealValue::to_f64(&Signed::abs(self))
    }
    fn real_sign(&self) -> Option<Ordering> {
        Some(self.cmp(&<BigRational as Zero>::zero()))
    }
    fn fast_pivots(m: &Matrix<Self>) -> Option<Vec<usize>> {
        Some(bareiss::pivots(m))
    }
    fn fast_inverse(m: &Matrix<Self>) -> Option<Option<Matrix<Self>>> {
        Some(bareiss::inverse(m))
    }
    fn fast_is_psd(m: &Matrix<Self>) -> Option<bool> {
        Some(bareiss::is_psd(m))
    }
}

/// Element of GF(p). Carries its modulus so arithmetic needs no context.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fp {
    value: u64,
    modulus: u64,
}

impl Fp {
    pub fn new(value: u64, modulus: PrimeModulus) -> Self {
        Fp {
            value: value % modulus.get(),
            modulus: modulus.get(),
        }
    }

    pub fn from_bigint(v: &BigInt, modulus: PrimeModulus) -> Self {
        let p = BigInt::from(modulus.get());
        let r = v.mod_floor(&p);
        Fp {
            value: r.to_u64().expect("reduced residue fits u64"),
            modulus: modulus.get(),
        }
    }

    pub fn value(self) -> u64 {
        self.value
    }

    pub fn modulus(self) -> u64 {
        self.modulus
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Scalar for Fp {
    type Ctx = PrimeModulus;
    type Real = f64;
    const EXACT: bool = true;

    fn kind(ctx: PrimeModulus) -> ScalarKind {
        ScalarKind::PrimeField(ctx.get())
    }
    fn context(&self) -> PrimeModulus {
        PrimeModulus(self.modulus)
    }
    fn zero(ctx: PrimeModulus) -> Self {
        Fp::new(0, ctx)
    }
    fn one(ctx: PrimeModulus) -> Self {
        Fp::new(1, ctx)
    }
    fn from_i64(v: i64, ctx: PrimeModulus) -> Self {
        Fp::from_bigint(&BigInt::from(v), ctx)
    }
    fn from_rational(r: &BigRational, ctx: PrimeModulus) -> Option<Self> {
        let num = Fp::from_bigint(r.numer(), ctx);
        let den = Fp::from_bigint(r.denom(), ctx);
        Scalar::div(&num, &den)
    }
    fn from_f64(x: f64, ctx: PrimeModulus) -> Self {
        BigRational::from_float(x)
            .and_then(|r| Fp::from_rational(&r, ctx))
            .unwrap_or(Fp::zero(ctx))
    }
    fn add(&self, rhs: &Self) -> Self {
        let s = self.value as u128 + rhs.value as u128;
        Fp {
            value: (s % self.modulus as u128) as u64,
            modulus: self.modulus,
        }
    }
    fn sub(&self, rhs: &Self) -> Self {
        let v = if self.value >= rhs.value {
            self.value - rhs.value
        } else {
            self.modulus - (rhs.value - self.value)
        };
        Fp {
            value: v,
            modulus: self.modulus,
        }
    }
    fn mul(&self, rhs: &Self) -> Self {
        Fp {
            value: mul_mod(self.value, rhs.value, self.modulus),
            modulus: self.modulus,
        }
    }
    fn neg(&self) -> Self {
        Fp {
            value: if self.value == 0 {
                0
            } else {
                self.modulus - self.value
            },
            modulus: self.modulus,
        }
    }
    fn inv(&self) -> Option<Self> {
        (self.value != 0).then(|| Fp {
            value: pow_mod(self.value, self.modulus - 2, self.modulus),
            modulus: self.modulus,
        })
    }
    fn is_zero(&self) -> bool {
        self.value == 0
    }
    fn abs_real(&self) -> Option<f64> {
        None
    }
    fn abs_sq(&self) -> Option<f64> {
        None
    }
    fn magnitude(&self) -> f64 {
        if self.value == 0 {
            0.0
        } else {
            1.0
        }
    }
    fn real_sign(&self) -> Option<Ordering> {
        None
    }
}
