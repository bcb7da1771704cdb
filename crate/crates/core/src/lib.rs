//! Membership, dimension and bases for the matrix algebra generated by a
//! finite set of square matrices.
//!
//! The central object is the generating matrix `P = psi((I - sum X_i ⊗ X_i)^-1)`
//! built in [`genfun`]. Its column space is the vectorized algebra, so its
//! rank is the algebra's dimension. [`oracle`] computes the same span by
//! multiplying words and eliminating, and [`modp`] evaluates `P` modulo a
//! random prime for integer generators.

pub mod algebra;
pub mod cli;
pub mod error;
pub mod genfun;
pub mod instance;
pub mod linalg;
pub mod modp;
pub mod oracle;
pub mod primes;
pub mod random;
pub mod scalar;

pub use error::{Error, Result};
pub use genfun::{GenFunVariant, GeneratorSet, PReport, Scale};
pub use linalg::Matrix;
pub use scalar::{Fp, PrimeModulus, Scalar, ScalarKind};
