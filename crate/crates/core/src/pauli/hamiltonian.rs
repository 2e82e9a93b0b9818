use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use super::{Pauli, PauliString};
use crate::error::{domain, Error, Result};

/// Real linear combination of Pauli strings, kept canonical: one entry per
/// string, exact zeros dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    n_qubits: usize,
    terms: BTreeMap<PauliString, f64>,
}

impl Hamiltonian {
    pub fn zero(n_qubits: usize) -> Self {
        assert!(n_qubits > 0, "n_qubits must be positive");
        Self {
            n_qubits,
            terms: BTreeMap::new(),
        }
    }

    pub fn term(coefficient: f64, string: PauliString) -> Self {
        let mut h = Self::zero(string.n_qubits());
        h.add_term(coefficient, string)
            .expect("qubit count matches by construction");
        h
    }

    /// Merges duplicate strings; all strings must act on the same qubits.
    pub fn from_terms(
        n_qubits: usize,
        terms: impl IntoIterator<Item = (f64, PauliString)>,
    ) -> Result<Self> {
        if n_qubits == 0 {
            return Err(domain("n_qubits must be positive"));
        }
        let mut h = Self::zero(n_qubits);
        for (c, s) in terms {
            h.add_term(c, s)?;
        }
        Ok(h)
    }

    /// Shorthand for tests and builders: `Hamiltonian::parse("0.5*XX + 0.5*YY")`.
    pub fn parse(expr: &str) -> Result<Self> {
        super::parse_hamiltonian(expr)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PauliString, f64)> {
        self.terms.iter().map(|(s, &c)| (s, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, string: &PauliString) -> f64 {
        self.terms.get(string).copied().unwrap_or(0.0)
    }

    pub fn add_term(&mut self, coefficient: f64, string: PauliString) -> Result<()> {
        if string.n_qubits() != self.n_qubits {
            return Err(Error::QubitMismatch {
                left: self.n_qubits,
                right: string.n_qubits(),
            });
        }
        match self.terms.entry(string) {
            Entry::Occupied(mut e) => {
                *e.get_mut() += coefficient;
                if *e.get() == 0.0 {
                    e.remove();
                }
            }
            Entry::Vacant(v) => {
                if coefficient != 0.0 {
                    v.insert(coefficient);
                }
            }
        }
        Ok(())
    }

    fn check_same(&self, other: &Hamiltonian) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::QubitMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        Ok(())
    }

    pub fn scaled(&self, factor: f64) -> Hamiltonian {
        let mut out = Hamiltonian::zero(self.n_qubits);
        for (s, c) in self.terms() {
            let v = c * factor;
            if v != 0.0 {
                out.terms.insert(s.clone(), v);
            }
        }
        out
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &Hamiltonian, b: f64) -> Result<Hamiltonian> {
        self.check_same(other)?;
        let mut out = self.scaled(a);
        for (s, c) in other.terms() {
            out.add_term(b * c, s.clone())?;
        }
        Ok(out)
    }

    pub fn add(&self, other: &Hamiltonian) -> Result<Hamiltonian> {
        self.combine(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &Hamiltonian) -> Result<Hamiltonian> {
        self.combine(1.0, other, -1.0)
    }

    /// `−i[self, other]`, which is Hermitian again.
    pub fn lie_bracket(&self, other: &Hamiltonian) -> Result<Hamiltonian> {
        self.check_same(other)?;
        let mut out = Hamiltonian::zero(self.n_qubits);
        for (a, ca) in self.terms() {
            for (b, cb) in other.terms() {
                if a.commutes_with(b)? {
                    continue;
                }
                // [P_a, P_b] = 2 P_a P_b = 2·(±i)·P_c
                let prod = a.mul(b)?;
                let sign = if prod.phase == super::Phase::I {
                    1.0
                } else {
                    -1.0
                };
                out.add_term(2.0 * sign * ca * cb, prod.string)?;
            }
        }
        Ok(out)
    }

    /// Coefficient of the identity string.
    pub fn identity_part(&self) -> f64 {
        self.coefficient(&PauliString::identity(self.n_qubits))
    }

    /// The Hamiltonian with its identity component removed.
    pub fn traceless_part(&self) -> Hamiltonian {
        let mut out = self.clone();
        out.terms.remove(&PauliString::identity(self.n_qubits));
        out
    }

    /// True when the non-identity strings pairwise anticommute, so the
    /// traceless part squares to a multiple of the identity.
    pub fn is_anticommuting_sum(&self) -> bool {
        let strings: Vec<_> = self.terms.keys().filter(|s| !s.is_identity()).collect();
        strings.iter().enumerate().all(|(i, a)| {
            strings[i + 1..]
                .iter()
                .all(|b| !a.commutes_with(b).unwrap_or(true))
        })
    }

    /// Sum of squared coefficients (Hilbert-Schmidt norm² / 2^n).
    pub fn norm_sq(&self) -> f64 {
        self.terms.values().map(|c| c * c).sum()
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Coefficient-wise comparison within `tol`.
    pub fn approx_eq(&self, other: &Hamiltonian, tol: f64) -> bool {
        match self.sub(other) {
            Ok(d) => d.max_abs_coefficient() <= tol,
            Err(_) => false,
        }
    }

    /// `Some(k)` when `self ≈ k·other` (relative tolerance `tol`).
    pub fn proportionality(&self, other: &Hamiltonian, tol: f64) -> Option<f64> {
        if self.n_qubits != other.n_qubits || other.is_empty() {
            return None;
        }
        let (s, c) = other
            .terms()
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .expect("nonempty");
        let k = self.coefficient(s) / c;
        let scale = self
            .max_abs_coefficient()
            .max(other.max_abs_coefficient() * k.abs());
        let diff = self.combine(1.0, other, -k).ok()?;
        (diff.max_abs_coefficient() <= tol * scale.max(f64::MIN_POSITIVE)).then_some(k)
    }

    /// Drops terms with |coefficient| ≤ `tol`.
    pub fn pruned(&self, tol: f64) -> Hamiltonian {
        let mut out = self.clone();
        out.terms.retain(|_, c| c.abs() > tol);
        out
    }

    pub(crate) fn canonical_bytes(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&(self.n_qubits as u64).to_le_bytes());
        out.extend_from_slice(&(self.terms.len() as u64).to_le_bytes());
        for (s, c) in &self.terms {
            out.extend(s.letters().iter().map(|p| p.index()));
            out.extend_from_slice(&c.to_bits().to_le_bytes());
        }
    }
}

impl fmt::Display for Hamiltonian {
    /// Same grammar the parser accepts, e.g. `0.5*XX - 0.5*YY`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0*{}", PauliString::identity(self.n_qubits));
        }
        for (i, (s, c)) in self.terms.iter().enumerate() {
            match (i, c.is_sign_negative()) {
                (0, _) => write!(f, "{c}*{s}")?,
                (_, false) => write!(f, " + {c}*{s}")?,
                (_, true) => write!(f, " - {}*{s}", -c)?,
            }
        }
        Ok(())
    }
}

/// `η_j = ½ ⊗_k σ_{digit_k(j)}`, base-4 digit `k` (least significant first)
/// on qubit `k`.
pub fn eta(j: u64, n_qubits: usize) -> Result<Hamiltonian> {
    if n_qubits == 0 || n_qubits > 31 {
        return Err(domain(format!(
            "n_qubits must be in 1..=31, got {n_qubits}"
        )));
    }
    let limit = 1u64 << (2 * n_qubits);
    if j >= limit {
        return Err(domain(format!("generator index {j} outside 0..{limit}")));
    }
    let letters = (0..n_qubits)
        .map(|k| Pauli::from_index(((j >> (2 * k)) & 3) as u8).expect("two-bit digit"))
        .collect();
    Ok(Hamiltonian::term(0.5, PauliString::new(letters)?))
}
