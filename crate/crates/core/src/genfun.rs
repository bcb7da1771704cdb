//! The generating matrix `P` in its resolvent, conjugate, non-unital and
//! power forms.
//!
//! With `S = sum_i X_i ⊗ conj(X_i)` and `psi` the block realignment,
//! `psi(S^k)` is the sum of `vec(w) vec(w)^H` over the words `w` of length
//! `k`. Any combination of powers with positive weights therefore yields a
//! PSD matrix whose column space is the span of the corresponding words.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, frobenius_sq, kron, norm, psi_square, Matrix, NormKind};
use crate::scalar::{RealValue, Scalar, ScalarKind};

/// Generators `X_1..X_d`, all `n x n` over one scalar kind.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSet<T: Scalar> {
    n: usize,
    gens: Vec<Matrix<T>>,
    unital: bool,
    ctx: T::Ctx,
}

impl<T: Scalar> GeneratorSet<T> {
    pub fn new(n: usize, gens: Vec<Matrix<T>>, unital: bool, ctx: T::Ctx) -> Result<Self> {
        if n == 0 {
            return Err(Error::Shape("matrix side must be positive".into()));
        }
        for (i, g) in gens.iter().enumerate() {
            if g.rows() != n || g.cols() != n {
                return Err(Error::Shape(format!(
                    "generator {} is {}x{}, expected {n}x{n}",
                    i + 1,
                    g.rows(),
                    g.cols()
                )));
            }
            if g.ctx() != ctx {
                return Err(Error::KindMismatch(T::kind(ctx), g.kind()));
            }
        }
        Ok(GeneratorSet {
            n,
            gens,
            unital,
            ctx,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gens(&self) -> &[Matrix<T>] {
        &self.gens
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn unital(&self) -> bool {
        self.unital
    }

    pub fn ctx(&self) -> T::Ctx {
        self.ctx
    }

    pub fn kind(&self) -> ScalarKind {
        T::kind(self.ctx)
    }

    pub fn with_unital(mut self, unital: bool) -> Self {
        self.unital = unital;
        self
    }

    /// Same generators, each multiplied by its own scalar.
    pub fn scaled(&self, factors: &[T]) -> Result<Self> {
        if factors.len() != self.gens.len() {
            return Err(Error::Shape("one factor per generator".into()));
        }
        let gens = self.gens.iter().zip(factors).map(|(g, f)| g.scale(f)).collect();
        Self::new(self.n, gens, self.unital, self.ctx)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GenFunVariant {
    /// `psi((I - sum X⊗X)^-1)`; real kinds.
    ResolventReal,
    /// `psi((I - sum X⊗conj X)^-1)`.
    ResolventConjugate,
    /// `psi(S (I - S)^-1)` with `S = sum X⊗conj X`: words of length >= 1.
    ResolventNonUnital,
    /// `psi((I + S)^k)`, minus the identity term for non-unital sets.
    PowerForm(usize),
}

impl GenFunVariant {
    pub fn is_resolvent(self) -> bool {
        !matches!(self, GenFunVariant::PowerForm(_))
    }

    fn conjugates(self) -> bool {
        !matches!(self, GenFunVariant::ResolventReal)
    }
}

/// How generators are shrunk before building `P`: `X_i -> X_i / sqrt(s)`,
/// i.e. `S -> S / s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Scale {
    /// `s = B`, the bound from [`scale_bound`].
    Auto,
    Explicit(BigRational),
    None,
}

#[derive(Debug, Clone)]
pub struct PReport<T: Scalar> {
    pub p: Matrix<T>,
    pub variant: GenFunVariant,
    /// Divisor applied to `S`; 1 when unscaled.
    pub scale: BigRational,
    pub rank: usize,
    /// Singular-value cutoff (approximate kinds).
    pub tol: Option<f64>,
    pub conditioning_flag: bool,
    pub spectrum_summary: Option<Vec<f64>>,
}

/// `sum_i X_i ⊗ X_i`, or `sum_i X_i ⊗ conj(X_i)` when `conjugate` is set.
pub fn sum_kron<T: Scalar>(gs: &GeneratorSet<T>, conjugate: bool) -> Matrix<T> {
    let n2 = gs.n * gs.n;
    let mut s = Matrix::zeros(n2, n2, gs.ctx);
    for g in &gs.gens {
        let right = if conjugate { g.conj() } else { g.clone() };
        let k = kron(g, &right).expect("generators share a kind");
        s.add_assign(&k).expect("same shape");
    }
    s
}

/// `B = ceil(sum_i ||X_i||_F^2) + 1`. Dividing `S` by `B` makes its Frobenius
/// norm strictly less than one, since `||X ⊗ X||_F = ||X||_F^2`.
pub fn scale_bound<T: Scalar>(gs: &GeneratorSet<T>) -> Result<BigInt> {
    let mut total = <T::Real as Zero>::zero();
    for g in &gs.gens {
        total = total + frobenius_sq(g)?;
    }
    Ok(total.ceil_int() + BigInt::one())
}

/// `min(n^2, ceil(2 n log2 n + 4 n))`: a word length by which words are
/// guaranteed to span the whole algebra.
pub fn default_power_exponent(n: usize) -> usize {
    let nf = n as f64;
    let word_bound = (2.0 * nf * nf.log2() + 4.0 * nf).ceil() as usize;
    (n * n).min(word_bound)
}

/// The variant `dimension` and friends use for this generator set.
pub fn auto_variant<T: Scalar>(gs: &GeneratorSet<T>) -> GenFunVariant {
    match (gs.unital, gs.kind()) {
        (false, _) => GenFunVariant::ResolventNonUnital,
        (true, ScalarKind::ApproxComplex) => GenFunVariant::ResolventConjugate,
        (true, _) => GenFunVariant::ResolventReal,
    }
}

/// Passes if any of L1, LInf or Frobenius norm of `s` is below one.
pub fn check_norm_bound<T: Scalar>(s: &Matrix<T>) -> Result<()> {
    let one = T::Real::one();
    let l1 = norm(s, NormKind::L1)?;
    let linf = norm(s, NormKind::LInf)?;
    let fro = norm(s, NormKind::Frobenius)?;
    if l1 < one || linf < one || fro < one {
        return Ok(());
    }
    let fro = if T::EXACT { fro.to_f64().sqrt() } else { fro.to_f64() };
    Err(Error::NormBound {
        l1: l1.to_f64(),
        linf: linf.to_f64(),
        frobenius: fro,
    })
}

fn resolve_scale<T: Scalar>(gs: &GeneratorSet<T>, scale: &Scale) -> Result<BigRational> {
    match scale {
        Scale::None => Ok(<BigRational as One>::one()),
        Scale::Auto => match gs.kind() {
            ScalarKind::PrimeField(_) => Err(Error::Unsupported(
                "automatic scaling over a prime field needs the integer lift; use modp".into(),
            )),
            _ => Ok(BigRational::from_integer(scale_bound(gs)?)),
        },
        Scale::Explicit(s) => {
            if s.is_positive() {
                Ok(s.clone())
            } else {
                Err(Error::Unsupported(format!("scale must be positive, got {s}")))
            }
        }
    }
}

pub fn build_p<T: Scalar>(
    gs: &GeneratorSet<T>,
    variant: GenFunVariant,
    scale: Scale,
    tol: Option<f64>,
) -> Result<PReport<T>> {
    let kind = gs.kind();
    match variant {
        GenFunVariant::ResolventReal if kind == ScalarKind::ApproxComplex => {
            return Err(Error::Unsupported(
                "complex generators need the conjugate form".into(),
            ))
        }
        GenFunVariant::PowerForm(_) if matches!(kind, ScalarKind::PrimeField(_)) => {
            return Err(Error::Unsupported(
                "the power form is offered over characteristic zero only".into(),
            ))
        }
        GenFunVariant::PowerForm(0) => {
            return Err(Error::Unsupported("power form needs k >= 1".into()))
        }
        _ => {}
    }
    if matches!(kind, ScalarKind::PrimeField(_)) && scale == Scale::None {
        return Err(Error::Unsupported(
            "the norm hypothesis cannot be checked over a prime field; pass an explicit scale".into(),
        ));
    }

    let s_value = resolve_scale(gs, &scale)?;
    let inv_scale = T::from_rational(&s_value.recip(), gs.ctx).ok_or_else(|| {
        Error::Unsupported(format!("scale {s_value} is not invertible over {kind}"))
    })?;
    let s = sum_kron(gs, variant.conjugates()).scale(&inv_scale);
    let n2 = gs.n * gs.n;
    let id = Matrix::identity(n2, gs.ctx);

    let realigned = match variant {
        GenFunVariant::PowerForm(k) => {
            let mut m = id.add(&s)?.pow(k as u64)?;
            if !gs.unital {
                m = m.sub(&id)?;
            }
            m
        }
        _ => {
            if scale != Scale::Auto && !matches!(kind, ScalarKind::PrimeField(_)) {
                check_norm_bound(&s)?;
            }
            let resolvent = linalg::inverse(&id.sub(&s)?)?;
            if variant == GenFunVariant::ResolventNonUnital {
                s.mul(&resolvent)?
            } else {
                resolvent
            }
        }
    };
    let p = psi_square(&realigned)?;
    let rr = linalg::rank_report(&p, tol);
    Ok(PReport {
        p,
        variant,
        scale: s_value,
        rank: rr.rank,
        tol: rr.tol,
        conditioning_flag: rr.ill_conditioned,
        spectrum_summary: rr.singular_values,
    })
}
