//! Simulation of variable-length quantum messages.
//!
//! Letters of a (possibly non-orthogonal) quantum alphabet span a letter space
//! of dimension `K`. Messages of length `n` live in its `n`-fold tensor power,
//! and messages of undetermined length live in the direct sum of all tensor
//! powers up to a maximum length `N`, including the one-dimensional sector of
//! the empty message. The length operator `L̂ = Σ n Π_n` is diagonal in the
//! basis of basis-alphabet strings.
//!
//! Modules:
//! - [`letterspace`]: alphabets, Gram matrices, basis alphabet, letter matrices
//! - [`mstate`]: sparse states of the truncated many-letter space
//! - [`operators`]: length operator, sector projectors, observables
//! - [`ensembles`]: message matrices, eigen-ensembles, canonical and grand canonical sources
//! - [`measurement`]: length and basis measurements, seeded sampling
//! - [`spec`]: JSON input formats
//! - [`cli`]: command-line front end

pub mod cli;
pub mod ensembles;
pub mod error;
pub mod letterspace;
pub mod linalg;
pub mod measurement;
pub mod mstate;
pub mod operators;
pub mod spec;
pub mod tol;

pub use ensembles::{
    canonical_matrix, grand_canonical_ensemble, grand_canonical_matrix, product_ensemble_matrix, BlockDecomposition,
    Ensemble, Equivalence, MessageMatrix,
};
pub use error::{Error, Result};
pub use letterspace::{LetterMatrix, QuantumAlphabet};
pub use measurement::{
    basis_outcome_distribution, dephase_length, length_outcome_distribution, measure_basis, measure_length, sample_statistics, Histogram,
    MeasurementKind, MeasurementOutcome, Message, OutcomeValue,
};
pub use mstate::{BasisString, ManyLetterState, SpaceShape};
pub use operators::{commutator_norm, expected_length, LengthProjector, Observable};
