//! Word-span baseline: multiply out words breadth-first and keep each new
//! product only if elimination shows it enlarges the span.
//!
//! This is deliberately the simple method. It serves as ground truth for the
//! generating-matrix route, produces membership certificates, and is the
//! baseline in the benchmark.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::genfun::GeneratorSet;
use crate::linalg::{vec, Accumulator, Matrix};
use crate::scalar::Scalar;

/// Sequence of 0-based generator indices; the empty word is the identity.
pub type Word = Vec<usize>;

#[derive(Debug, Clone)]
pub struct WordElement<T: Scalar> {
    pub word: Word,
    pub matrix: Matrix<T>,
}

#[derive(Debug, Clone)]
pub struct WordBasis<T: Scalar> {
    pub elements: Vec<WordElement<T>>,
    /// Longest word length examined.
    pub degree_reached: usize,
    /// The search stopped because a whole layer added nothing (or the span
    /// filled the matrix space), not because it hit the cap.
    pub saturated: bool,
    acc: Accumulator<T>,
    n: usize,
}

impl<T: Scalar> WordBasis<T> {
    pub fn dimension(&self) -> usize {
        self.elements.len()
    }

    pub fn words(&self) -> Vec<Word> {
        self.elements.iter().map(|e| e.word.clone()).collect()
    }

    pub fn matrices(&self) -> Vec<Matrix<T>> {
        self.elements.iter().map(|e| e.matrix.clone()).collect()
    }

    /// Whether `m` lies in the span of the basis.
    pub fn contains(&self, m: &Matrix<T>) -> bool {
        self.acc.reduce(&vec(m).column(0)).dependent
    }
}

/// A linear combination of words.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate<T: Scalar> {
    pub terms: Vec<(Word, T)>,
}

impl<T: Scalar> Certificate<T> {
    /// Multiplies the combination back out.
    pub fn evaluate(&self, gs: &GeneratorSet<T>) -> Result<Matrix<T>> {
        let mut out = Matrix::zeros(gs.n(), gs.n(), gs.ctx());
        for (word, c) in &self.terms {
            let m = word_matrix(gs, word)?;
            out.add_assign(&m.scale(c))?;
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificateTerm {
    /// 1-based generator indices.
    pub word: Vec<usize>,
    pub coefficient: String,
}

impl<T: Scalar> Certificate<T> {
    /// Report form with 1-based generator indices.
    pub fn to_terms(&self) -> Vec<CertificateTerm> {
        self.terms
            .iter()
            .map(|(w, c)| CertificateTerm {
                word: w.iter().map(|i| i + 1).collect(),
                coefficient: c.to_string(),
            })
            .collect()
    }
}

/// Product of the generators along `word`.
pub fn word_matrix<T: Scalar>(gs: &GeneratorSet<T>, word: &[usize]) -> Result<Matrix<T>> {
    let mut m = Matrix::identity(gs.n(), gs.ctx());
    for &i in word {
        let g = gs
            .gens()
            .get(i)
            .ok_or_else(|| Error::Shape(format!("word uses generator {} of {}", i + 1, gs.len())))?;
        m = m.mul(g)?;
    }
    Ok(m)
}

/// Breadth-first word exploration up to `degree_cap`, extending each kept
/// word by one generator on the right.
pub fn word_span<T: Scalar>(gs: &GeneratorSet<T>, degree_cap: usize) -> WordBasis<T> {
    let n = gs.n();
    let full = n * n;
    let mut acc = Accumulator::with_expressions(full, gs.ctx());
    let mut elements = Vec::new();
    let identity = Matrix::identity(n, gs.ctx());

    if gs.unital() {
        acc.insert(&vec(&identity).column(0));
        elements.push(WordElement {
            word: Vec::new(),
            matrix: identity.clone(),
        });
    }
    // For non-unital sets the empty word seeds the search without being kept.
    let mut frontier = vec![(Word::new(), identity)];
    let mut degree_reached = 0;
    let mut saturated = false;

    for degree in 1..=degree_cap.max(1) {
        if acc.len() == full {
            saturated = true;
            break;
        }
        degree_reached = degree;
        let mut next = Vec::new();
        for (word, m) in &frontier {
            for (i, g) in gs.gens().iter().enumerate() {
                let cand = m.mul(g).expect("same shape");
                if acc.insert(&vec(&cand).column(0)) {
                    let mut w = word.clone();
                    w.push(i);
                    elements.push(WordElement {
                        word: w.clone(),
                        matrix: cand.clone(),
                    });
                    next.push((w, cand));
                }
            }
        }
        if next.is_empty() {
            saturated = true;
            break;
        }
        frontier = next;
    }
    if !saturated && acc.len() == full {
        saturated = true;
    }

    WordBasis {
        elements,
        degree_reached,
        saturated,
        acc,
        n,
    }
}

/// Number of independent words, with the cap at `n^2`.
pub fn oracle_dimension<T: Scalar>(gs: &GeneratorSet<T>) -> Result<usize> {
    let cap = gs.n() * gs.n();
    let wb = word_span(gs, cap);
    if !wb.saturated {
        return Err(Error::DegreeCap(cap));
    }
    Ok(wb.dimension())
}

/// Writes `z` as a combination of the basis words, or `None` if it lies
/// outside their span. Only conclusive for a saturated basis.
pub fn express<T: Scalar>(wb: &WordBasis<T>, z: &Matrix<T>) -> Option<Certificate<T>> {
    if z.rows() != wb.n || z.cols() != wb.n {
        return None;
    }
    let coeffs = wb.acc.express(&vec(z).column(0))?;
    let terms = wb
        .elements
        .iter()
        .zip(coeffs)
        .filter(|(_, c)| !c.is_zero())
        .map(|(e, c)| (e.word.clone(), c))
        .collect();
    Some(Certificate { terms })
}

/// After saturation both `E X` and `X E` must stay in the span for every
/// basis element `E` and generator `X`.
pub fn is_two_sided_stable<T: Scalar>(wb: &WordBasis<T>, gs: &GeneratorSet<T>) -> bool {
    wb.elements.iter().all(|e| {
        gs.gens().iter().all(|g| {
            let right = e.matrix.mul(g).expect("same shape");
            let left = g.mul(&e.matrix).expect("same shape");
            wb.contains(&right) && wb.contains(&left)
        })
    })
}
