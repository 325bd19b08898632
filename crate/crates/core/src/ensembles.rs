//! Message ensembles and message matrices.
//!
//! A message matrix `σ = Σ p(φ)|φ⟩⟨φ|` is stored densely over the whole
//! truncated space. Ensembles with equal `σ` cannot be told apart by any
//! measurement, which is what [`Ensemble::equivalent`] checks.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::letterspace::{check_density, check_distribution, LetterMatrix, QuantumAlphabet};
use crate::linalg::{self, CMatrix, CVector, ONE};
use crate::mstate::{BasisString, ManyLetterState, SpaceShape};
use crate::operators::{check_dense_cap, LengthProjector, Observable};
use crate::tol;

/// Density operator of a message source on `M^N`.
#[derive(Debug, Clone, PartialEq)]
pub struct MessageMatrix {
    shape: SpaceShape,
    matrix: CMatrix,
    block_diagonal: bool,
}

impl MessageMatrix {
    /// Validates a dense `D×D` density matrix.
    pub fn new(shape: SpaceShape, matrix: CMatrix) -> Result<Self> {
        check_dense_cap(shape)?;
        if matrix.nrows() != shape.dim() || matrix.ncols() != shape.dim() {
            return Err(Error::shape(format!(
                "{}x{} matrix for D={}",
                matrix.nrows(),
                matrix.ncols(),
                shape.dim()
            )));
        }
        check_density(&matrix, tol::HERM, "message matrix")?;
        Ok(Self::trusted(shape, matrix))
    }

    /// Skips validation; for matrices built here from valid ingredients.
    fn trusted(shape: SpaceShape, matrix: CMatrix) -> Self {
        let block_diagonal = off_block_residual(shape, &matrix) <= tol::BLOCK;
        Self { shape, matrix, block_diagonal }
    }

    /// `|φ⟩⟨φ|`.
    pub fn pure(state: &ManyLetterState) -> Result<Self> {
        Ensemble::new(vec![(state.clone(), 1.0)])?.message_matrix()
    }

    pub fn shape(&self) -> SpaceShape {
        self.shape
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// True when every cross-length block vanishes within `τ_block`.
    pub fn is_block_diagonal(&self) -> bool {
        self.block_diagonal
    }

    /// `Tr{Π_n σ}` for each `n = 0..=N`.
    pub fn sector_probabilities(&self) -> Vec<f64> {
        (0..=self.shape.max_len())
            .map(|n| self.shape.sector_range(n).map(|i| self.matrix[(i, i)].re).sum())
            .collect()
    }

    /// Diagonal entries `⟨a^n|σ|a^n⟩` in enumeration order.
    pub fn basis_probabilities(&self) -> Vec<f64> {
        self.matrix.diagonal().iter().map(|z| z.re).collect()
    }

    /// `q(a^n) = ⟨a^n|σ|a^n⟩`.
    pub fn string_probability(&self, s: &BasisString) -> Result<f64> {
        let i = self.shape.global_index(s)?;
        Ok(self.matrix[(i, i)].re)
    }

    /// The length-`n` diagonal block, in sector coordinates.
    pub fn sector_block(&self, n: usize) -> CMatrix {
        let r = self.shape.sector_range(n);
        self.matrix.view((r.start, r.start), (r.len(), r.len())).into_owned()
    }

    /// The same operator on `M^{max_len}`, zero-padded; fails if support would be lost.
    pub fn embed(&self, max_len: usize) -> Result<Self> {
        let shape = self.shape.with_max_len(max_len)?;
        check_dense_cap(shape)?;
        let d = shape.dim();
        let keep = d.min(self.shape.dim());
        let lost: f64 = self.matrix.iter().map(|z| z.norm_sqr()).sum::<f64>()
            - self.matrix.view((0, 0), (keep, keep)).iter().map(|z| z.norm_sqr()).sum::<f64>();
        if lost > 0.0 {
            return Err(Error::OutOfRange(format!("message matrix has support beyond length {max_len}")));
        }
        let mut m = CMatrix::zeros(d, d);
        m.view_mut((0, 0), (keep, keep)).copy_from(&self.matrix.view((0, 0), (keep, keep)));
        Ok(Self::trusted(shape, m))
    }

    /// Pairs `(q_i, |e_i⟩)` with `q_i > τ_eig`, eigenvalues descending.
    pub fn spectral_decomposition(&self) -> Vec<(f64, ManyLetterState)> {
        let (values, vectors) = linalg::hermitian_eigen(&self.matrix);
        values
            .into_iter()
            .enumerate()
            .filter(|(_, q)| *q > tol::EIG)
            .filter_map(|(i, q)| {
                let v = vectors.column(i).into_owned();
                let state = ManyLetterState::from_dense(self.shape, &v).ok()?.normalize().ok()?;
                Some((q, state))
            })
            .collect()
    }

    /// The ensemble of eigenstates weighted by eigenvalues.
    pub fn eigen_ensemble(&self) -> Result<Ensemble> {
        let pairs = self.spectral_decomposition();
        let total: f64 = pairs.iter().map(|(q, _)| q).sum();
        Ensemble::new(pairs.into_iter().map(|(q, e)| (e, q / total)).collect())
    }

    /// `λ_n = Tr{Π_n σ Π_n}`, normalized blocks and the off-block residual.
    pub fn block_diagonalize(&self) -> BlockDecomposition {
        let lambdas = self.sector_probabilities();
        let blocks = lambdas
            .iter()
            .enumerate()
            .map(|(n, &l)| (l > tol::PROB).then(|| self.sector_block(n) * Complex64::new(1.0 / l, 0.0)))
            .collect();
        BlockDecomposition {
            shape: self.shape,
            lambdas,
            blocks,
            residual: off_block_residual(self.shape, &self.matrix),
        }
    }

    /// `Σ_n Π_n σ Π_n`.
    pub fn dephased(&self) -> Self {
        let mut m = CMatrix::zeros(self.shape.dim(), self.shape.dim());
        for n in 0..=self.shape.max_len() {
            let r = self.shape.sector_range(n);
            m.view_mut((r.start, r.start), (r.len(), r.len()))
                .copy_from(&self.matrix.view((r.start, r.start), (r.len(), r.len())));
        }
        Self { shape: self.shape, matrix: m, block_diagonal: true }
    }

    /// `Π_n σ Π_n / Tr{Π_n σ}`; fails for an empty sector.
    pub fn project_length(&self, n: usize) -> Result<Self> {
        let p = LengthProjector::new(self.shape, n)?;
        let m = p.sandwich(&self.matrix)?;
        let weight = linalg::trace(&m).re;
        if weight <= tol::EIG {
            return Err(Error::ZeroNorm(format!("sector {n} has weight {weight:e}")));
        }
        Ok(Self::trusted(self.shape, m * Complex64::new(1.0 / weight, 0.0)))
    }

    /// `Tr{σ L̂}`.
    pub fn expected_length(&self) -> f64 {
        self.sector_probabilities().iter().enumerate().map(|(n, p)| n as f64 * p).sum()
    }

    /// Frobenius distance to another message matrix.
    pub fn distance(&self, other: &MessageMatrix) -> Result<f64> {
        if self.shape != other.shape {
            return Err(Error::shape("message matrices have different shapes"));
        }
        Ok(linalg::frobenius(&(&self.matrix - &other.matrix)))
    }

    pub fn as_observable(&self) -> Observable {
        Observable::from_message_matrix(self)
    }
}

/// `‖σ − Σ_n Π_n σ Π_n‖_F`.
fn off_block_residual(shape: SpaceShape, m: &CMatrix) -> f64 {
    let lengths: Vec<usize> = shape.lengths().collect();
    let mut acc = 0.0;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            if lengths[i] != lengths[j] {
                acc += m[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// `σ = Σ λ_n σ_n` over length sectors.
#[derive(Debug, Clone)]
pub struct BlockDecomposition {
    shape: SpaceShape,
    /// Length probabilities `λ_0..λ_N`.
    pub lambdas: Vec<f64>,
    /// Unit-trace sector matrices in sector coordinates; `None` where `λ_n ≤ τ_prob`.
    pub blocks: Vec<Option<CMatrix>>,
    /// Frobenius norm of everything outside the diagonal blocks.
    pub residual: f64,
}

impl BlockDecomposition {
    pub fn is_exact(&self) -> bool {
        self.residual <= tol::BLOCK
    }

    /// `Σ λ_n σ_n` as a `D×D` matrix.
    pub fn recombine(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.shape.dim(), self.shape.dim());
        for (n, block) in self.blocks.iter().enumerate() {
            if let Some(b) = block {
                let r = self.shape.sector_range(n);
                m.view_mut((r.start, r.start), (r.len(), r.len()))
                    .copy_from(&(b * Complex64::new(self.lambdas[n], 0.0)));
            }
        }
        m
    }
}

/// Finite probability-weighted list of messages.
#[derive(Debug, Clone)]
pub struct Ensemble {
    shape: SpaceShape,
    entries: Vec<(ManyLetterState, f64)>,
}

/// Result of comparing two ensembles by their message matrices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Equivalence {
    pub equivalent: bool,
    pub distance: f64,
}

impl Ensemble {
    pub fn new(entries: Vec<(ManyLetterState, f64)>) -> Result<Self> {
        let shape = entries
            .first()
            .map(|(s, _)| s.shape())
            .ok_or_else(|| Error::invalid("ensemble has no entries"))?;
        let mut sum = 0.0;
        for (state, p) in &entries {
            if state.shape() != shape {
                return Err(Error::shape("ensemble states have different shapes"));
            }
            state.require_normalized()?;
            if !p.is_finite() || *p <= 0.0 {
                return Err(Error::invalid(format!("ensemble probability {p} is not positive")));
            }
            sum += p;
        }
        if (sum - 1.0).abs() > tol::PROB {
            return Err(Error::invalid(format!("ensemble probabilities sum to {sum}, expected 1")));
        }
        Ok(Self { shape, entries })
    }

    pub fn shape(&self) -> SpaceShape {
        self.shape
    }

    pub fn entries(&self) -> &[(ManyLetterState, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `σ = Σ p(φ)|φ⟩⟨φ|`.
    pub fn message_matrix(&self) -> Result<MessageMatrix> {
        check_dense_cap(self.shape)?;
        let d = self.shape.dim();
        let mut m = CMatrix::zeros(d, d);
        for (state, p) in &self.entries {
            let support: Vec<(usize, Complex64)> = state.iter_indexed().collect();
            for &(j, b) in &support {
                let bj = b.conj() * *p;
                for &(i, a) in &support {
                    m[(i, j)] += a * bj;
                }
            }
        }
        Ok(MessageMatrix::trusted(self.shape, m))
    }

    /// Numerical rank of the span of the ensemble's states.
    pub fn source_rank(&self) -> usize {
        let states: Vec<ManyLetterState> = self.entries.iter().map(|(s, _)| s.clone()).collect();
        linalg::gram_schmidt(
            &states,
            tol::RANK,
            |a, b| a.inner_product(b).expect("same shape"),
            |r, c, b| {
                *r = ManyLetterState::superpose(&[(ONE, &*r), (-c, b)], false).expect("same shape");
            },
            |r, s| {
                *r = ManyLetterState::superpose(&[(Complex64::new(s, 0.0), &*r)], false).expect("same shape");
            },
        )
        .len()
    }

    /// Compares message matrices in Frobenius distance.
    pub fn equivalent(&self, other: &Ensemble, tol: f64) -> Result<Equivalence> {
        if self.shape != other.shape {
            return Err(Error::shape(format!(
                "ensembles on K={}, N={} and K={}, N={}",
                self.shape.k(),
                self.shape.max_len(),
                other.shape.k(),
                other.shape.max_len()
            )));
        }
        let distance = self.message_matrix()?.distance(&other.message_matrix()?)?;
        Ok(Equivalence { equivalent: distance <= tol, distance })
    }
}

/// `ρ^{⊗n}` as a `K^n × K^n` matrix.
pub fn tensor_power(rho: &CMatrix, n: usize) -> CMatrix {
    (0..n).fold(CMatrix::identity(1, 1), |acc, _| linalg::kron(&acc, rho))
}

/// Places a sector-`n` block into a zero `D×D` matrix.
fn embed_block(shape: SpaceShape, n: usize, block: &CMatrix) -> CMatrix {
    let mut m = CMatrix::zeros(shape.dim(), shape.dim());
    let r = shape.sector_range(n);
    m.view_mut((r.start, r.start), (r.len(), r.len())).copy_from(block);
    m
}

/// Product block messages of length `n` drawn from a joint letter distribution.
///
/// `joint` is indexed by the letter string read as a big-endian base-`|Q|`
/// number. Returns `σ` on the length-`n` sector of `M^n` and the per-position
/// marginal letter matrices.
pub fn product_ensemble_matrix(
    alphabet: &QuantumAlphabet,
    n: usize,
    joint: &[f64],
) -> Result<(MessageMatrix, Vec<LetterMatrix>)> {
    let q = alphabet.len();
    let expected = q
        .checked_pow(n as u32)
        .ok_or_else(|| Error::ResourceCap(format!("joint table over {q}^{n} strings")))?;
    if joint.len() != expected {
        return Err(Error::invalid(format!(
            "joint table has {} entries, expected {q}^{n} = {expected}",
            joint.len()
        )));
    }
    check_distribution(joint, "joint probabilities")?;
    let shape = SpaceShape::new(alphabet.rank(), n)?;
    check_dense_cap(shape)?;

    let mut marginals = vec![vec![0.0; q]; n];
    let block_dim = shape.sector_dim(n);
    let mut block = CMatrix::zeros(block_dim, block_dim);
    for (index, &p) in joint.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let letters = BasisString::from_value(q, n, index);
        for (pos, &x) in letters.digits().iter().enumerate() {
            marginals[pos][x] += p;
        }
        let mut v = CVector::from_element(1, ONE);
        for &x in letters.digits() {
            v = v.kronecker(alphabet.expand_letter(x)?);
        }
        block += linalg::weighted_outer(&v, p);
    }
    let sigma = MessageMatrix::trusted(shape, embed_block(shape, n, &block));
    let marginals = marginals
        .iter()
        .map(|p| alphabet.letter_matrix(p))
        .collect::<Result<Vec<_>>>()?;
    Ok((sigma, marginals))
}

/// `σ = ρ^{⊗n}` on the length-`n` sector of `M^n`.
pub fn canonical_matrix(rho: &LetterMatrix, n: usize) -> Result<MessageMatrix> {
    let shape = SpaceShape::new(rho.dim(), n)?;
    check_dense_cap(shape)?;
    Ok(MessageMatrix::trusted(shape, embed_block(shape, n, &tensor_power(rho.matrix(), n))))
}

/// `σ = Σ_n λ_n ρ^{⊗n}` on `M^N` with `N = lambdas.len() − 1`.
pub fn grand_canonical_matrix(rho: &LetterMatrix, lambdas: &[f64]) -> Result<MessageMatrix> {
    if lambdas.is_empty() {
        return Err(Error::invalid("no length probabilities"));
    }
    check_distribution(lambdas, "length probabilities")?;
    let shape = SpaceShape::new(rho.dim(), lambdas.len() - 1)?;
    check_dense_cap(shape)?;
    let mut m = CMatrix::zeros(shape.dim(), shape.dim());
    let mut power = CMatrix::identity(1, 1);
    for (n, &l) in lambdas.iter().enumerate() {
        if n > 0 {
            power = linalg::kron(&power, rho.matrix());
        }
        if l > 0.0 {
            let r = shape.sector_range(n);
            m.view_mut((r.start, r.start), (r.len(), r.len()))
                .copy_from(&(&power * Complex64::new(l, 0.0)));
        }
    }
    Ok(MessageMatrix::trusted(shape, m))
}

/// The explicit ensemble behind a grand canonical source: every letter
/// string `x^n` as a product message with `p(x^n) = λ_n p(x_1)…p(x_n)`.
///
/// Strings of zero probability are left out.
pub fn grand_canonical_ensemble(alphabet: &QuantumAlphabet, priors: &[f64], lambdas: &[f64]) -> Result<Ensemble> {
    if priors.len() != alphabet.len() {
        return Err(Error::invalid(format!(
            "{} priors for {} letters",
            priors.len(),
            alphabet.len()
        )));
    }
    check_distribution(priors, "letter priors")?;
    if lambdas.is_empty() {
        return Err(Error::invalid("no length probabilities"));
    }
    check_distribution(lambdas, "length probabilities")?;
    let shape = SpaceShape::new(alphabet.rank(), lambdas.len() - 1)?;
    let support: Vec<usize> = (0..priors.len()).filter(|&x| priors[x] > 0.0).collect();

    // duplicate product states are merged by letter string, not by state
    let mut entries: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
    let mut layer: Vec<(Vec<usize>, f64)> = vec![(Vec::new(), 1.0)];
    for (n, &l) in lambdas.iter().enumerate() {
        if n > 0 {
            layer = layer
                .iter()
                .flat_map(|(s, p)| {
                    support.iter().map(move |&x| {
                        let mut t = s.clone();
                        t.push(x);
                        (t, p * priors[x])
                    })
                })
                .collect();
        }
        if l > 0.0 {
            for (s, p) in &layer {
                entries.insert(s.clone(), l * p);
            }
        }
        if lambdas[n + 1..].iter().all(|&x| x == 0.0) {
            break;
        }
    }
    let entries = entries
        .into_iter()
        .map(|(s, p)| Ok((ManyLetterState::product_message(alphabet, shape, &s)?, p)))
        .collect::<Result<Vec<_>>>()?;
    Ensemble::new(entries)
}
