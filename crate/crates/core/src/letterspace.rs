//! Quantum alphabets and the single-letter space they span.
//!
//! Letters are unit vectors in some ambient space of dimension `d`. They need
//! not be orthogonal. The span of the letters is the letter space; an
//! orthonormal basis of it (the basis alphabet) is extracted by Gram-Schmidt in
//! letter order, and everything downstream works in basis-alphabet coordinates
//! of dimension `K = rank`, never in ambient coordinates.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};
use crate::tol;

#[derive(Debug, Clone)]
pub struct QuantumAlphabet {
    letters: Vec<CVector>,
    labels: Vec<String>,
    basis: Vec<CVector>,
    /// Letters expanded in the basis alphabet, `coords[x][a] = ⟨a|x⟩`.
    coords: Vec<CVector>,
}

impl QuantumAlphabet {
    pub fn new(vectors: Vec<CVector>, labels: Vec<String>) -> Result<Self> {
        if vectors.is_empty() {
            return Err(Error::invalid("alphabet has no letters"));
        }
        if vectors.len() != labels.len() {
            return Err(Error::invalid(format!(
                "{} letters but {} labels",
                vectors.len(),
                labels.len()
            )));
        }
        let d = vectors[0].len();
        if d == 0 {
            return Err(Error::invalid("letters must have dimension >= 1"));
        }
        for (v, label) in vectors.iter().zip(&labels) {
            if v.len() != d {
                return Err(Error::invalid(format!(
                    "letter {label:?} has dimension {}, expected {d}",
                    v.len()
                )));
            }
            let norm = v.norm();
            if (norm - 1.0).abs() > tol::NORM {
                return Err(Error::invalid(format!("letter {label:?} has norm {norm}, expected 1")));
            }
        }
        let mut seen = HashSet::new();
        for label in &labels {
            if !seen.insert(label.as_str()) {
                return Err(Error::invalid(format!("duplicate letter label {label:?}")));
            }
        }

        let basis = linalg::orthonormalize(&vectors, tol::RANK);
        let coords = vectors
            .iter()
            .map(|x| CVector::from_iterator(basis.len(), basis.iter().map(|a| a.dotc(x))))
            .collect();
        Ok(Self { letters: vectors, labels, basis, coords })
    }

    /// Number of letters `|Q|`.
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Dimension `K` of the letter space.
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Ambient dimension `d` of the input vectors.
    pub fn ambient_dim(&self) -> usize {
        self.letters[0].len()
    }

    pub fn letters(&self) -> &[CVector] {
        &self.letters
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Basis alphabet vectors, in ambient coordinates.
    pub fn basis(&self) -> &[CVector] {
        &self.basis
    }

    /// `⟨x_i|x_j⟩` for all letter pairs.
    pub fn gram_matrix(&self) -> CMatrix {
        let n = self.len();
        CMatrix::from_fn(n, n, |i, j| self.letters[i].dotc(&self.letters[j]))
    }

    /// Coordinates `⟨a|x⟩` of a letter in the basis alphabet.
    pub fn expand_letter(&self, index: usize) -> Result<&CVector> {
        self.coords.get(index).ok_or_else(|| {
            Error::OutOfRange(format!("letter index {index} for alphabet of {} letters", self.len()))
        })
    }

    /// `ρ = Σ p(x)|x⟩⟨x|` in basis-alphabet coordinates.
    pub fn letter_matrix(&self, priors: &[f64]) -> Result<LetterMatrix> {
        if priors.len() != self.len() {
            return Err(Error::invalid(format!(
                "{} priors for {} letters",
                priors.len(),
                self.len()
            )));
        }
        check_distribution(priors, "letter priors")?;
        let k = self.rank();
        let mut rho = CMatrix::zeros(k, k);
        for (c, &p) in self.coords.iter().zip(priors) {
            if p > 0.0 {
                rho += linalg::weighted_outer(c, p);
            }
        }
        LetterMatrix::new(rho)
    }
}

/// Checks a finite distribution: nonnegative entries summing to one.
pub(crate) fn check_distribution(p: &[f64], what: &str) -> Result<()> {
    if let Some(bad) = p.iter().find(|x| !x.is_finite() || **x < 0.0) {
        return Err(Error::invalid(format!("{what}: entry {bad} is not a nonnegative number")));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > tol::PROB {
        return Err(Error::invalid(format!("{what} sum to {sum}, expected 1")));
    }
    Ok(())
}

/// A single-letter density matrix in basis-alphabet coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct LetterMatrix {
    matrix: CMatrix,
}

impl LetterMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::invalid("letter matrix must be square and non-empty"));
        }
        check_density(&matrix, tol::HERM, "letter matrix")?;
        Ok(Self { matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Eigenpairs `(q(a), |a⟩)`, eigenvalues descending.
    pub fn spectral(&self) -> Vec<(f64, CVector)> {
        let (values, vectors) = linalg::hermitian_eigen(&self.matrix);
        values
            .into_iter()
            .enumerate()
            .map(|(i, q)| (q, vectors.column(i).into_owned()))
            .collect()
    }
}

/// Hermitian within `herm`, unit trace, no eigenvalue below `-PSD`.
pub(crate) fn check_density(m: &CMatrix, herm: f64, what: &str) -> Result<()> {
    let defect = linalg::hermiticity_defect(m);
    if defect > herm {
        return Err(Error::invalid(format!("{what} is not Hermitian (defect {defect:e})")));
    }
    let tr = linalg::trace(m);
    if (tr.re - 1.0).abs() > tol::TRACE || tr.im.abs() > tol::TRACE {
        return Err(Error::invalid(format!("{what} has trace {tr}, expected 1")));
    }
    let (values, _) = linalg::hermitian_eigen(m);
    if let Some(&min) = values.last() {
        if min < -tol::PSD {
            return Err(Error::invalid(format!("{what} has negative eigenvalue {min:e}")));
        }
    }
    Ok(())
}

pub use crate::linalg::real_dvector as real_vector;
