//! Observables on the truncated many-letter space.
//!
//! Diagonal observables (the length operator, its projectors, anything given
//! as a map from basis strings to values) never allocate a `D×D` matrix.
//! Dense observables are capped at `D ≤ 4096`.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::ensembles::MessageMatrix;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, ZERO};
use crate::measurement::Message;
use crate::mstate::{BasisString, ManyLetterState, SpaceShape};
use crate::tol;

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    /// One real value per length sector.
    Sector(Vec<f64>),
    /// Real values on listed strings (keyed by global index), `default` elsewhere.
    Diagonal { values: BTreeMap<usize, f64>, default: f64 },
    Dense(CMatrix),
}

/// A self-adjoint operator on `M^N`.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    shape: SpaceShape,
    repr: Repr,
}

pub(crate) fn check_dense_cap(shape: SpaceShape) -> Result<()> {
    if shape.dim() > tol::DENSE_CAP {
        return Err(Error::ResourceCap(format!(
            "dense operator of dimension {} exceeds cap {}",
            shape.dim(),
            tol::DENSE_CAP
        )));
    }
    Ok(())
}

impl Observable {
    /// `Σ_n value[n] Π_n`.
    pub fn from_sector_values(shape: SpaceShape, values: Vec<f64>) -> Result<Self> {
        if values.len() != shape.max_len() + 1 {
            return Err(Error::shape(format!(
                "{} sector values for N={}",
                values.len(),
                shape.max_len()
            )));
        }
        Ok(Self { shape, repr: Repr::Sector(values) })
    }

    /// `L̂ = Σ_n n Π_n`.
    pub fn length_operator(shape: SpaceShape) -> Self {
        let values = (0..=shape.max_len()).map(|n| n as f64).collect();
        Self { shape, repr: Repr::Sector(values) }
    }

    pub fn identity(shape: SpaceShape) -> Self {
        Self { shape, repr: Repr::Sector(vec![1.0; shape.max_len() + 1]) }
    }

    /// Diagonal observable with explicit values on some strings.
    pub fn diagonal<I>(shape: SpaceShape, values: I, default: f64) -> Result<Self>
    where
        I: IntoIterator<Item = (BasisString, f64)>,
    {
        let mut map = BTreeMap::new();
        for (s, v) in values {
            if !v.is_finite() {
                return Err(Error::invalid(format!("non-finite value for string {s}")));
            }
            map.insert(shape.global_index(&s)?, v);
        }
        Ok(Self { shape, repr: Repr::Diagonal { values: map, default } })
    }

    /// Dense observable; must be Hermitian within the internal tolerance.
    pub fn dense(shape: SpaceShape, matrix: CMatrix) -> Result<Self> {
        check_dense_cap(shape)?;
        if matrix.nrows() != shape.dim() || matrix.ncols() != shape.dim() {
            return Err(Error::shape(format!(
                "{}x{} matrix for D={}",
                matrix.nrows(),
                matrix.ncols(),
                shape.dim()
            )));
        }
        let defect = linalg::hermiticity_defect(&matrix);
        if defect > tol::HERM {
            return Err(Error::invalid(format!("observable not Hermitian (defect {defect:e})")));
        }
        Ok(Self { shape, repr: Repr::Dense(matrix) })
    }

    /// Dense observable from user input: slightly asymmetric matrices are
    /// replaced by `(A + A†)/2`, anything beyond the input tolerance is rejected.
    pub fn dense_hermitized(shape: SpaceShape, matrix: CMatrix) -> Result<Self> {
        check_dense_cap(shape)?;
        if !matrix.is_square() || matrix.nrows() != shape.dim() {
            return Err(Error::shape(format!("matrix does not match D={}", shape.dim())));
        }
        let defect = linalg::hermiticity_defect(&matrix);
        if defect > tol::HERM_INPUT {
            return Err(Error::invalid(format!("observable not Hermitian (defect {defect:e})")));
        }
        let herm = (&matrix + matrix.adjoint()) * Complex64::new(0.5, 0.0);
        Ok(Self { shape, repr: Repr::Dense(herm) })
    }

    pub fn from_message_matrix(sigma: &MessageMatrix) -> Self {
        Self { shape: sigma.shape(), repr: Repr::Dense(sigma.matrix().clone()) }
    }

    pub fn shape(&self) -> SpaceShape {
        self.shape
    }

    pub fn is_diagonal(&self) -> bool {
        !matches!(self.repr, Repr::Dense(_))
    }

    /// Diagonal value at a global index, `None` for dense observables.
    fn diagonal_value(&self, index: usize, length: usize) -> Option<f64> {
        match &self.repr {
            Repr::Sector(v) => Some(v[length]),
            Repr::Diagonal { values, default } => Some(values.get(&index).copied().unwrap_or(*default)),
            Repr::Dense(_) => None,
        }
    }

    fn diagonal_values(&self) -> Option<Vec<f64>> {
        let lengths: Vec<usize> = self.shape.lengths().collect();
        lengths
            .iter()
            .enumerate()
            .map(|(i, &n)| self.diagonal_value(i, n))
            .collect()
    }

    pub fn to_dense(&self) -> Result<CMatrix> {
        check_dense_cap(self.shape)?;
        match &self.repr {
            Repr::Dense(m) => Ok(m.clone()),
            _ => {
                let diag = self.diagonal_values().expect("diagonal representation");
                Ok(CMatrix::from_diagonal(&linalg::real_dvector(&diag)))
            }
        }
    }

    /// `A|φ⟩`, unnormalized.
    pub fn apply(&self, state: &ManyLetterState) -> Result<ManyLetterState> {
        self.check_shape(state.shape())?;
        match &self.repr {
            Repr::Dense(m) => ManyLetterState::from_dense(self.shape, &(m * state.to_dense())),
            _ => {
                let terms: Vec<_> = state
                    .iter_indexed()
                    .map(|(i, a)| {
                        let (n, _) = self.shape.locate(i);
                        let v = self.diagonal_value(i, n).expect("diagonal representation");
                        (self.shape.from_index(i).expect("valid index"), a * v)
                    })
                    .collect();
                ManyLetterState::from_terms(self.shape, terms)
            }
        }
    }

    /// `⟨φ|A|φ⟩` for a normalized state.
    pub fn expectation(&self, state: &ManyLetterState) -> Result<f64> {
        self.check_shape(state.shape())?;
        state.require_normalized()?;
        let value = match &self.repr {
            Repr::Dense(m) => {
                let v = state.to_dense();
                v.dotc(&(m * &v))
            }
            _ => {
                let mut acc = 0.0;
                for (i, a) in state.iter_indexed() {
                    let (n, _) = self.shape.locate(i);
                    acc += a.norm_sqr() * self.diagonal_value(i, n).expect("diagonal representation");
                }
                Complex64::new(acc, 0.0)
            }
        };
        real_part(value)
    }

    /// `Tr{σA}`.
    pub fn ensemble_average(&self, sigma: &MessageMatrix) -> Result<f64> {
        self.check_shape(sigma.shape())?;
        let s = sigma.matrix();
        let value = match &self.repr {
            Repr::Dense(m) => (s * m).trace(),
            _ => {
                let mut acc = ZERO;
                for (i, n) in self.shape.lengths().enumerate() {
                    acc += s[(i, i)] * self.diagonal_value(i, n).expect("diagonal representation");
                }
                acc
            }
        };
        real_part(value)
    }

    fn check_shape(&self, other: SpaceShape) -> Result<()> {
        if self.shape != other {
            return Err(Error::shape(format!(
                "observable on K={}, N={} applied to K={}, N={}",
                self.shape.k(),
                self.shape.max_len(),
                other.k(),
                other.max_len()
            )));
        }
        Ok(())
    }
}

fn real_part(z: Complex64) -> Result<f64> {
    if z.im.abs() > tol::IMAG {
        return Err(Error::invalid(format!(
            "expectation has imaginary part {:e}; observable is not Hermitian",
            z.im
        )));
    }
    Ok(z.re)
}

/// Max-entry norm of `AB − BA`.
pub fn commutator_norm(a: &Observable, b: &Observable) -> Result<f64> {
    a.check_shape(b.shape)?;
    match (a.diagonal_values(), b.diagonal_values()) {
        (Some(_), Some(_)) => Ok(0.0),
        // [D, B]_ij = (d_i − d_j) B_ij
        (Some(d), None) | (None, Some(d)) => {
            let m = match (&a.repr, &b.repr) {
                (Repr::Dense(m), _) | (_, Repr::Dense(m)) => m,
                _ => unreachable!(),
            };
            let mut worst: f64 = 0.0;
            for j in 0..m.ncols() {
                for i in 0..m.nrows() {
                    worst = worst.max(((d[i] - d[j]) * m[(i, j)]).norm());
                }
            }
            Ok(worst)
        }
        (None, None) => {
            let (ma, mb) = (a.to_dense()?, b.to_dense()?);
            Ok(linalg::max_abs(&(&ma * &mb - &mb * &ma)))
        }
    }
}

/// `Π_n`, the projector onto the length-`n` sector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LengthProjector {
    n: usize,
    shape: SpaceShape,
}

impl LengthProjector {
    pub fn new(shape: SpaceShape, n: usize) -> Result<Self> {
        if n > shape.max_len() {
            return Err(Error::OutOfRange(format!("sector {n} beyond N={}", shape.max_len())));
        }
        Ok(Self { n, shape })
    }

    pub fn length(&self) -> usize {
        self.n
    }

    /// `Tr Π_n = K^n`.
    pub fn trace(&self) -> usize {
        self.shape.sector_dim(self.n)
    }

    pub fn apply(&self, state: &ManyLetterState) -> Result<ManyLetterState> {
        if state.shape() != self.shape {
            return Err(Error::shape("projector and state shapes differ"));
        }
        Ok(state.project_length(self.n))
    }

    /// `Π_n M Π_n` for a `D×D` matrix.
    pub fn sandwich(&self, m: &CMatrix) -> Result<CMatrix> {
        if m.nrows() != self.shape.dim() || m.ncols() != self.shape.dim() {
            return Err(Error::shape("projector and matrix shapes differ"));
        }
        let r = self.shape.sector_range(self.n);
        let mut out = CMatrix::zeros(m.nrows(), m.ncols());
        out.view_mut((r.start, r.start), (r.len(), r.len()))
            .copy_from(&m.view((r.start, r.start), (r.len(), r.len())));
        Ok(out)
    }

    pub fn as_observable(&self) -> Observable {
        let mut values = vec![0.0; self.shape.max_len() + 1];
        values[self.n] = 1.0;
        Observable { shape: self.shape, repr: Repr::Sector(values) }
    }
}

/// `L(ρ) = Tr{ρ L̂}` for a pure or mixed message.
pub fn expected_length(message: &Message) -> Result<f64> {
    let l = Observable::length_operator(message.shape());
    match message {
        Message::Pure(phi) => l.expectation(phi),
        Message::Mixed(sigma) => l.ensemble_average(sigma),
    }
}
