//! Dense linear algebra over the four scalar backends, plus the
//! vec / psi / Kronecker maps the generating matrix is built from.

pub(crate) mod bareiss;
mod echelon;
mod matrix;
mod rank;
mod structure;

pub use echelon::{Accumulator, Reduction, DEFAULT_INDEPENDENCE_TOL};
pub use matrix::Matrix;
pub use rank::{
    default_tol, in_range, inverse, is_hermitian, is_psd, null_space, range_basis, rank,
    rank_report, rref, subspace_intersect, InRange, RankReport, Tolerance, CONDITIONING_GAP,
    DEFAULT_RESIDUAL_TOL,
};
pub use structure::{
    frobenius_sq, kron, norm, psi, psi_square, unvec, unvec_slice, vec, BlockShape, NormKind,
};

