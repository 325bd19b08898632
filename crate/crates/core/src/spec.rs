//! JSON file formats for alphabets, states, observables and ensembles.
//!
//! Complex numbers are `[re, im]` pairs. Syntax and schema problems surface as
//! [`Error::Parse`]; well-formed files describing invalid objects surface as
//! validation errors from the constructors.

use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::ensembles::{grand_canonical_matrix, Ensemble, MessageMatrix};
use crate::error::{Error, Result};
use crate::letterspace::{LetterMatrix, QuantumAlphabet};
use crate::linalg::{CMatrix, CVector};
use crate::measurement::Message;
use crate::mstate::{BasisString, ManyLetterState, SpaceShape};
use crate::operators::Observable;

pub type ComplexPair = [f64; 2];

fn complex(z: &ComplexPair) -> Complex64 {
    Complex64::new(z[0], z[1])
}

fn pair(z: Complex64) -> ComplexPair {
    [z.re, z.im]
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LetterSpec {
    pub label: String,
    pub vector: Vec<ComplexPair>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlphabetSpec {
    pub letters: Vec<LetterSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub priors: Option<Vec<f64>>,
}

impl AlphabetSpec {
    pub fn build(&self) -> Result<QuantumAlphabet> {
        let vectors = self
            .letters
            .iter()
            .map(|l| CVector::from_iterator(l.vector.len(), l.vector.iter().map(complex)))
            .collect();
        let labels = self.letters.iter().map(|l| l.label.clone()).collect();
        QuantumAlphabet::new(vectors, labels)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub digits: Vec<usize>,
    pub amp: ComplexPair,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSpec {
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub terms: Vec<TermSpec>,
}

impl StateSpec {
    /// Amplitudes must already be normalized within `τ_norm`.
    pub fn build(&self) -> Result<ManyLetterState> {
        let shape = SpaceShape::new(self.k, self.n)?;
        let terms = self
            .terms
            .iter()
            .map(|t| (BasisString::new(t.digits.clone()), complex(&t.amp)));
        ManyLetterState::from_terms(shape, terms)?.checked_normalized()?.normalize()
    }

    pub fn from_state(state: &ManyLetterState) -> Self {
        let shape = state.shape();
        Self {
            k: shape.k(),
            n: shape.max_len(),
            terms: state
                .iter()
                .map(|(s, a)| TermSpec { digits: s.digits().to_vec(), amp: pair(a) })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagonalEntry {
    pub digits: Vec<usize>,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ObservableSpec {
    Diagonal {
        diagonal: Vec<DiagonalEntry>,
        #[serde(default)]
        default: f64,
    },
    Dense {
        dense: Vec<Vec<ComplexPair>>,
    },
}

impl ObservableSpec {
    pub fn build(&self, shape: SpaceShape) -> Result<Observable> {
        match self {
            ObservableSpec::Diagonal { diagonal, default } => Observable::diagonal(
                shape,
                diagonal.iter().map(|e| (BasisString::new(e.digits.clone()), e.value)),
                *default,
            ),
            ObservableSpec::Dense { dense } => {
                let d = dense.len();
                if dense.iter().any(|row| row.len() != d) {
                    return Err(Error::shape("dense observable rows are not all of equal length"));
                }
                let m = CMatrix::from_fn(d, d, |i, j| complex(&dense[i][j]));
                Observable::dense_hermitized(shape, m)
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlphabetRef {
    Inline(AlphabetSpec),
    File(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateRef {
    Product { product: Vec<usize> },
    Explicit(StateSpec),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntrySpec {
    pub state: StateRef,
    pub p: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrandCanonicalSpec {
    /// Letter priors; falls back to the alphabet's priors.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub priors: Option<Vec<f64>>,
    /// Length probabilities `λ_0, λ_1, …`.
    pub lambdas: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSpec {
    pub alphabet: AlphabetRef,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entries: Option<Vec<EntrySpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grand_canonical: Option<GrandCanonicalSpec>,
}

/// A file read from disk together with its SHA-256 digest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

pub fn read_input(path: &Path) -> Result<(String, InputDigest)> {
    let bytes = fs::read(path).map_err(|source| Error::Io { path: path.display().to_string(), source })?;
    let digest = InputDigest {
        path: path.display().to_string(),
        sha256: Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect(),
    };
    let text = String::from_utf8(bytes).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    Ok((text, digest))
}

pub fn parse<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("{what}: {e}")))
}

pub fn load_alphabet(path: &Path) -> Result<(AlphabetSpec, QuantumAlphabet, InputDigest)> {
    let (text, digest) = read_input(path)?;
    let spec: AlphabetSpec = parse(&text, &path.display().to_string())?;
    let alphabet = spec.build()?;
    Ok((spec, alphabet, digest))
}

/// Where the messages of an ensemble file come from.
#[derive(Debug, Clone)]
pub enum SourceKind {
    Entries(Ensemble),
    GrandCanonical { rho: LetterMatrix, lambdas: Vec<f64> },
}

/// A fully validated ensemble file.
#[derive(Debug, Clone)]
pub struct MessageSource {
    pub alphabet: QuantumAlphabet,
    pub shape: SpaceShape,
    pub kind: SourceKind,
    pub inputs: Vec<InputDigest>,
}

impl MessageSource {
    pub fn message_matrix(&self) -> Result<MessageMatrix> {
        match &self.kind {
            SourceKind::Entries(e) => e.message_matrix(),
            SourceKind::GrandCanonical { rho, lambdas } => grand_canonical_matrix(rho, lambdas),
        }
    }

    /// Single-entry ensembles stay pure (sparse, no dense cap).
    pub fn message(&self) -> Result<Message> {
        match &self.kind {
            SourceKind::Entries(e) if e.len() == 1 => Ok(Message::Pure(e.entries()[0].0.clone())),
            _ => Ok(Message::Mixed(self.message_matrix()?)),
        }
    }
}

/// Loads an ensemble file. `max_length` overrides the file's `N`.
pub fn load_ensemble(path: &Path, max_length: Option<usize>) -> Result<MessageSource> {
    let (text, digest) = read_input(path)?;
    let spec: EnsembleSpec = parse(&text, &path.display().to_string())?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."));
    let mut inputs = vec![digest];
    let alphabet_spec = match &spec.alphabet {
        AlphabetRef::Inline(a) => a.clone(),
        AlphabetRef::File(rel) => {
            let (text, digest) = read_input(&base.join(rel))?;
            inputs.push(digest);
            parse(&text, rel)?
        }
    };
    let mut source = build_source(&spec, &alphabet_spec, max_length)?;
    source.inputs = inputs;
    Ok(source)
}

/// Validates a parsed ensemble description against its alphabet.
pub fn build_source(spec: &EnsembleSpec, alphabet_spec: &AlphabetSpec, max_length: Option<usize>) -> Result<MessageSource> {
    let alphabet = alphabet_spec.build()?;
    let k = alphabet.rank();
    match (&spec.entries, &spec.grand_canonical) {
        (Some(_), Some(_)) => Err(Error::Parse("ensemble has both entries and grand_canonical".into())),
        (None, None) => Err(Error::Parse("ensemble needs entries or grand_canonical".into())),
        (None, Some(gc)) => {
            if gc.lambdas.is_empty() {
                return Err(Error::invalid("grand_canonical.lambdas is empty"));
            }
            let n = max_length.or(spec.n).unwrap_or(gc.lambdas.len() - 1);
            let mut lambdas = gc.lambdas.clone();
            if lambdas.len() > n + 1 {
                if lambdas[n + 1..].iter().any(|&l| l != 0.0) {
                    return Err(Error::invalid(format!("length probabilities beyond N={n} are nonzero")));
                }
                lambdas.truncate(n + 1);
            }
            lambdas.resize(n + 1, 0.0);
            let priors = gc
                .priors
                .as_ref()
                .or(alphabet_spec.priors.as_ref())
                .ok_or_else(|| Error::invalid("grand canonical source needs letter priors"))?;
            let rho = alphabet.letter_matrix(priors)?;
            let shape = SpaceShape::new(k, n)?;
            Ok(MessageSource {
                alphabet,
                shape,
                kind: SourceKind::GrandCanonical { rho, lambdas },
                inputs: Vec::new(),
            })
        }
        (Some(entries), None) => {
            let mut states = Vec::with_capacity(entries.len());
            for e in entries {
                let state = match &e.state {
                    StateRef::Product { product } => {
                        let shape = SpaceShape::new(k, product.len())?;
                        ManyLetterState::product_message(&alphabet, shape, product)?
                    }
                    StateRef::Explicit(s) => {
                        if s.k != k {
                            return Err(Error::shape(format!("state has K={} but alphabet rank is {k}", s.k)));
                        }
                        s.build()?
                    }
                };
                states.push((state, e.p));
            }
            let longest = states
                .iter()
                .filter_map(|(s, _)| s.lengths_present().last().copied())
                .max()
                .unwrap_or(0);
            let n = max_length.or(spec.n).unwrap_or(longest);
            let shape = SpaceShape::new(k, n)?;
            let states = states
                .into_iter()
                .map(|(s, p)| Ok((s.embed(n)?, p)))
                .collect::<Result<Vec<_>>>()?;
            Ok(MessageSource {
                alphabet,
                shape,
                kind: SourceKind::Entries(Ensemble::new(states)?),
                inputs: Vec::new(),
            })
        }
    }
}

/// Ensemble file with an inline alphabet and explicit states.
pub fn ensemble_to_spec(alphabet: AlphabetSpec, ensemble: &Ensemble) -> EnsembleSpec {
    EnsembleSpec {
        alphabet: AlphabetRef::Inline(alphabet),
        n: Some(ensemble.shape().max_len()),
        entries: Some(
            ensemble
                .entries()
                .iter()
                .map(|(s, p)| EntrySpec { state: StateRef::Explicit(StateSpec::from_state(s)), p: *p })
                .collect(),
        ),
        grand_canonical: None,
    }
}
