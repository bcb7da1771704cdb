//! Membership, dimension, basis and intersection through the generating
//! matrix `P`: `Z` belongs to the algebra exactly when `vec Z` is in the
//! column space of `P`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::genfun::{auto_variant, build_p, GenFunVariant, GeneratorSet, PReport, Scale};
use crate::linalg::{self, unvec_slice, vec, Matrix, Tolerance};
use crate::oracle::{self, Certificate};
use crate::scalar::Scalar;

#[derive(Debug, Clone)]
pub struct AlgebraOptions {
    /// `None` picks the resolvent form matching the set's unital flag and kind.
    pub variant: Option<GenFunVariant>,
    pub scale: Scale,
    pub tol: Tolerance,
}

impl Default for AlgebraOptions {
    fn default() -> Self {
        AlgebraOptions {
            variant: None,
            scale: Scale::Auto,
            tol: Tolerance::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct MembershipResult<T: Scalar> {
    pub member: bool,
    pub residual: f64,
    pub certificate: Option<Certificate<T>>,
    /// Set when a certificate was requested but could not be produced.
    pub certificate_error: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BasisSource {
    PMethod,
    Oracle,
}

#[derive(Debug, Clone)]
pub struct AlgebraBasis<T: Scalar> {
    pub dim: usize,
    pub basis: Vec<Matrix<T>>,
    pub source: BasisSource,
}

pub fn generating_matrix<T: Scalar>(gs: &GeneratorSet<T>, opts: &AlgebraOptions) -> Result<PReport<T>> {
    let variant = opts.variant.unwrap_or_else(|| auto_variant(gs));
    build_p(gs, variant, opts.scale.clone(), opts.tol.rank)
}

pub fn dimension<T: Scalar>(gs: &GeneratorSet<T>) -> Result<usize> {
    dimension_with(gs, &AlgebraOptions::default())
}

pub fn dimension_with<T: Scalar>(gs: &GeneratorSet<T>, opts: &AlgebraOptions) -> Result<usize> {
    Ok(generating_matrix(gs, opts)?.rank)
}

pub fn membership<T: Scalar>(
    gs: &GeneratorSet<T>,
    z: &Matrix<T>,
    want_certificate: bool,
) -> Result<MembershipResult<T>> {
    membership_with(gs, z, want_certificate, &AlgebraOptions::default())
}

pub fn membership_with<T: Scalar>(
    gs: &GeneratorSet<T>,
    z: &Matrix<T>,
    want_certificate: bool,
    opts: &AlgebraOptions,
) -> Result<MembershipResult<T>> {
    if z.rows() != gs.n() || z.cols() != gs.n() {
        return Err(Error::Shape(format!(
            "candidate is {}x{}, generators are {n}x{n}",
            z.rows(),
            z.cols(),
            n = gs.n()
        )));
    }
    let rep = generating_matrix(gs, opts)?;
    let verdict = linalg::in_range(&rep.p, &vec(z), &opts.tol)?;
    let mut result = MembershipResult {
        member: verdict.member,
        residual: verdict.residual,
        certificate: None,
        certificate_error: None,
    };
    if want_certificate && verdict.member {
        let cap = gs.n() * gs.n();
        let wb = oracle::word_span(gs, cap);
        if !wb.saturated {
            result.certificate_error = Some(Error::DegreeCap(cap).to_string());
        } else {
            match oracle::express(&wb, z) {
                Some(c) => result.certificate = Some(c),
                None => {
                    result.certificate_error =
                        Some("candidate is not in the word span; no certificate".into())
                }
            }
        }
    }
    Ok(result)
}

fn devectorize<T: Scalar>(cols: &Matrix<T>, n: usize) -> Vec<Matrix<T>> {
    cols.columns()
        .iter()
        .map(|c| unvec_slice(c, n, n, cols.ctx()).expect("n^2 rows"))
        .collect()
}

pub fn basis<T: Scalar>(gs: &GeneratorSet<T>) -> Result<AlgebraBasis<T>> {
    basis_with(gs, &AlgebraOptions::default())
}

pub fn basis_with<T: Scalar>(gs: &GeneratorSet<T>, opts: &AlgebraOptions) -> Result<AlgebraBasis<T>> {
    let rep = generating_matrix(gs, opts)?;
    let cols = linalg::range_basis(&rep.p, opts.tol.rank);
    let basis = devectorize(&cols, gs.n());
    Ok(AlgebraBasis {
        dim: basis.len(),
        basis,
        source: BasisSource::PMethod,
    })
}

/// Basis from the word-span oracle instead of `P`.
pub fn oracle_basis<T: Scalar>(gs: &GeneratorSet<T>) -> Result<AlgebraBasis<T>> {
    let cap = gs.n() * gs.n();
    let wb = oracle::word_span(gs, cap);
    if !wb.saturated {
        return Err(Error::DegreeCap(cap));
    }
    let basis = wb.matrices();
    Ok(AlgebraBasis {
        dim: basis.len(),
        basis,
        source: BasisSource::Oracle,
    })
}

pub fn intersect<T: Scalar>(a: &GeneratorSet<T>, b: &GeneratorSet<T>) -> Result<AlgebraBasis<T>> {
    intersect_with(a, b, &AlgebraOptions::default())
}

pub fn intersect_with<T: Scalar>(
    a: &GeneratorSet<T>,
    b: &GeneratorSet<T>,
    opts: &AlgebraOptions,
) -> Result<AlgebraBasis<T>> {
    if a.n() != b.n() {
        return Err(Error::Shape(format!("sides differ: {} vs {}", a.n(), b.n())));
    }
    if a.ctx() != b.ctx() {
        return Err(Error::KindMismatch(a.kind(), b.kind()));
    }
    if a.unital() != b.unital() {
        return Err(Error::Unsupported(
            "intersection needs both sets to be unital or both non-unital".into(),
        ));
    }
    let pa = generating_matrix(a, opts)?;
    let pb = generating_matrix(b, opts)?;
    let ua = linalg::range_basis(&pa.p, opts.tol.rank);
    let ub = linalg::range_basis(&pb.p, opts.tol.rank);
    let w = linalg::subspace_intersect(&ua, &ub, opts.tol.rank)?;
    let basis = devectorize(&w, a.n());
    Ok(AlgebraBasis {
        dim: basis.len(),
        basis,
        source: BasisSource::PMethod,
    })
}
