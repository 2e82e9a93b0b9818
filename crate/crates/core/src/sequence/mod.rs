//! Pulses, nested pulse sequences, error assignments and the compiler.

mod assignment;
mod builders;
mod compiler;
mod dump;

pub use assignment::ErrorAssignment;
pub use builders::{
    bb1_j, bb1_w, bb1_wj, phi_of, substitute, wj_chain, Bb1J, Bb1W, ChainControls,
    CorrectionBuilder, Memoized, Uncorrected,
};
pub use compiler::{CacheStats, Compiler};
pub use dump::parse_dump;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use sha2::{Digest, Sha256};

use crate::error::{domain, Error, Result};
use crate::pauli::Hamiltonian;

/// Name of a control field; every label carries one systematic error.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ControlLabel(String);

impl ControlLabel {
    pub fn new(name: impl Into<String>) -> Result<Self> {
        let name = name.into();
        let valid = name
            .chars()
            .next()
            .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
            && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !valid {
            return Err(domain(format!("invalid control label '{name}'")));
        }
        Ok(Self(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ControlLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// `θ·H` driven on the control `label`.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseTerm {
    pub label: ControlLabel,
    pub theta: f64,
    pub h: Arc<Hamiltonian>,
}

impl PulseTerm {
    pub fn new(label: ControlLabel, theta: f64, h: Arc<Hamiltonian>) -> Self {
        Self { label, theta, h }
    }
}

/// Simultaneously applied terms: `exp(−i Σ θ(1+ε)H)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Pulse {
    terms: Vec<PulseTerm>,
}

impl Pulse {
    pub fn new(terms: Vec<PulseTerm>) -> Result<Self> {
        let Some(first) = terms.first() else {
            return Err(domain("a pulse needs at least one term"));
        };
        let n = first.h.n_qubits();
        for t in &terms {
            if t.h.n_qubits() != n {
                return Err(Error::QubitMismatch {
                    left: n,
                    right: t.h.n_qubits(),
                });
            }
            if !t.theta.is_finite() {
                return Err(domain(format!("non-finite angle on {}", t.label)));
            }
        }
        Ok(Self { terms })
    }

    pub fn single(label: ControlLabel, theta: f64, h: Arc<Hamiltonian>) -> Result<Self> {
        Self::new(vec![PulseTerm::new(label, theta, h)])
    }

    pub fn terms(&self) -> &[PulseTerm] {
        &self.terms
    }

    pub fn n_qubits(&self) -> usize {
        self.terms[0].h.n_qubits()
    }

    /// The same fields with every angle negated.
    pub fn negated(&self) -> Pulse {
        Pulse {
            terms: self
                .terms
                .iter()
                .map(|t| PulseTerm::new(t.label.clone(), -t.theta, t.h.clone()))
                .collect(),
        }
    }
}

/// A nested sequence, optionally run backwards with negated angles.
#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub sequence: Arc<PulseSequence>,
    pub inverse: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Segment {
    Pulse(Pulse),
    Block(Block),
}

/// Time-ordered segments; the compiled product puts later segments on the left.
///
/// Construction caches a structural digest in which labels appear only as
/// indices into the sorted label set, so two blocks with equal structure and
/// equal resolved errors share one compiled unitary.
#[derive(Debug, Clone)]
pub struct PulseSequence {
    segments: Vec<Segment>,
    n_qubits: usize,
    labels: Vec<ControlLabel>,
    pulse_count: usize,
    digest: [u8; 32],
    correlated: BTreeSet<(ControlLabel, ControlLabel)>,
}

impl PartialEq for PulseSequence {
    fn eq(&self, other: &Self) -> bool {
        self.segments == other.segments && self.correlated == other.correlated
    }
}

impl PulseSequence {
    pub fn from_pulses(pulses: Vec<Pulse>) -> Result<Self> {
        Self::from_segments(pulses.into_iter().map(Segment::Pulse).collect())
    }

    pub fn from_segments(segments: Vec<Segment>) -> Result<Self> {
        let n_qubits = match segments.first() {
            None => return Err(domain("a pulse sequence needs at least one pulse")),
            Some(Segment::Pulse(p)) => p.n_qubits(),
            Some(Segment::Block(b)) => b.sequence.n_qubits,
        };
        let mut labels = BTreeSet::new();
        let mut correlated = BTreeSet::new();
        let mut pulse_count = 0usize;
        for seg in &segments {
            let n = match seg {
                Segment::Pulse(p) => {
                    labels.extend(p.terms.iter().map(|t| t.label.clone()));
                    pulse_count += 1;
                    p.n_qubits()
                }
                Segment::Block(b) => {
                    labels.extend(b.sequence.labels.iter().cloned());
                    correlated.extend(b.sequence.correlated.iter().cloned());
                    pulse_count += b.sequence.pulse_count;
                    b.sequence.n_qubits
                }
            };
            if n != n_qubits {
                return Err(Error::QubitMismatch {
                    left: n_qubits,
                    right: n,
                });
            }
        }
        let labels: Vec<ControlLabel> = labels.into_iter().collect();
        let digest = structural_digest(&segments, &labels);
        Ok(Self {
            segments,
            n_qubits,
            labels,
            pulse_count,
            digest,
            correlated,
        })
    }

    /// Declares that `a` and `b` must share one error when compiled.
    pub fn with_correlated(mut self, a: ControlLabel, b: ControlLabel) -> Self {
        if a != b {
            let pair = if a < b { (a, b) } else { (b, a) };
            self.correlated.insert(pair);
        }
        self
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Sorted, deduplicated labels used anywhere in the sequence.
    pub fn labels(&self) -> &[ControlLabel] {
        &self.labels
    }

    /// Number of physical pulses after flattening.
    pub fn len(&self) -> usize {
        self.pulse_count
    }

    pub fn is_empty(&self) -> bool {
        self.pulse_count == 0
    }

    pub fn digest(&self) -> &[u8; 32] {
        &self.digest
    }

    pub fn correlated_pairs(&self) -> impl Iterator<Item = &(ControlLabel, ControlLabel)> {
        self.correlated.iter()
    }

    /// Flattened physical pulses in time order.
    pub fn pulses(&self) -> Vec<Pulse> {
        let mut out = Vec::with_capacity(self.pulse_count);
        self.flatten_into(false, &mut out);
        out
    }

    fn flatten_into(&self, inverse: bool, out: &mut Vec<Pulse>) {
        let mut visit = |seg: &Segment| match seg {
            Segment::Pulse(p) if inverse => out.push(p.negated()),
            Segment::Pulse(p) => out.push(p.clone()),
            Segment::Block(b) => b.sequence.flatten_into(inverse ^ b.inverse, out),
        };
        if inverse {
            self.segments.iter().rev().for_each(&mut visit);
        } else {
            self.segments.iter().for_each(&mut visit);
        }
    }

    /// Flat copy of this sequence with blocks expanded.
    pub fn flattened(&self) -> PulseSequence {
        let mut flat = Self::from_pulses(self.pulses()).expect("flattening preserves validity");
        flat.correlated = self.correlated.clone();
        flat
    }

    /// Reversed order, negated angles: the ideal inverse.
    pub fn inverse(self: &Arc<Self>) -> PulseSequence {
        Self::from_segments(vec![Segment::Block(Block {
            sequence: self.clone(),
            inverse: true,
        })])
        .expect("nonempty")
    }

    /// One line per physical pulse: `label θ expr`, simultaneous terms
    /// separated by ` | `.
    pub fn dump(&self) -> String {
        dump::dump(self)
    }
}

fn structural_digest(segments: &[Segment], labels: &[ControlLabel]) -> [u8; 32] {
    let index: BTreeMap<&ControlLabel, u32> = labels
        .iter()
        .enumerate()
        .map(|(i, l)| (l, i as u32))
        .collect();
    let mut hasher = Sha256::new();
    let mut bytes = Vec::new();
    for seg in segments {
        bytes.clear();
        match seg {
            Segment::Pulse(p) => {
                bytes.push(b'P');
                bytes.extend_from_slice(&(p.terms.len() as u32).to_le_bytes());
                for t in &p.terms {
                    bytes.extend_from_slice(&index[&t.label].to_le_bytes());
                    bytes.extend_from_slice(&t.theta.to_bits().to_le_bytes());
                    t.h.canonical_bytes(&mut bytes);
                }
            }
            Segment::Block(b) => {
                bytes.push(if b.inverse { b'R' } else { b'B' });
                bytes.extend_from_slice(b.sequence.digest());
                bytes.extend_from_slice(&(b.sequence.labels.len() as u32).to_le_bytes());
                for l in &b.sequence.labels {
                    bytes.extend_from_slice(&index[l].to_le_bytes());
                }
            }
        }
        hasher.update(&bytes);
    }
    hasher.finalize().into()
}
