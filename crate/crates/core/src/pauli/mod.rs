//! Exact algebra of n-qubit Pauli strings.
//!
//! Letter `k` of a [`PauliString`] acts on qubit `k + 1`. In dense matrices
//! qubit 1 is the most significant bit of the basis index.

mod commutator;
mod expr;
mod hamiltonian;

pub use commutator::{commutator_class, su2_structure, su2_triple, CommutatorClass, Su2Structure};
pub use expr::{parse_coefficient, parse_hamiltonian};
pub use hamiltonian::{eta, Hamiltonian};

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{domain, Error, Result};

/// A single-qubit Pauli operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    /// `σ_0..σ_3` in the usual order I, X, Y, Z.
    pub fn from_index(index: u8) -> Option<Pauli> {
        match index {
            0 => Some(Pauli::I),
            1 => Some(Pauli::X),
            2 => Some(Pauli::Y),
            3 => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn index(self) -> u8 {
        self as u8
    }

    pub fn from_char(c: char) -> Option<Pauli> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    /// Bits of the symplectic representation: (x, z).
    pub(crate) fn xz(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    /// Single-qubit product `self · other = phase · result`.
    pub fn product(self, other: Pauli) -> (Phase, Pauli) {
        use Pauli::*;
        match (self, other) {
            (I, p) | (p, I) => (Phase::ONE, p),
            (a, b) if a == b => (Phase::ONE, I),
            (X, Y) => (Phase::I, Z),
            (Y, Z) => (Phase::I, X),
            (Z, X) => (Phase::I, Y),
            (Y, X) => (Phase::MINUS_I, Z),
            (Z, Y) => (Phase::MINUS_I, X),
            (X, Z) => (Phase::MINUS_I, Y),
            _ => unreachable!(),
        }
    }
}

/// A power of `i`: `i^k` for `k` in 0..4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_exponent(k: u8) -> Phase {
        Phase(k % 4)
    }

    pub fn exponent(self) -> u8 {
        self.0
    }

    pub fn to_complex(self) -> Complex64 {
        match self.0 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }

    pub fn is_imaginary(self) -> bool {
        self.0 % 2 == 1
    }
}

impl std::ops::Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) % 4)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(["+1", "+i", "-1", "-i"][self.0 as usize])
    }
}

/// Tensor word over {I, X, Y, Z}; letter `k` acts on qubit `k + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    letters: Vec<Pauli>,
}

impl PauliString {
    pub fn new(letters: Vec<Pauli>) -> Result<Self> {
        if letters.is_empty() {
            return Err(domain("a Pauli string needs at least one qubit"));
        }
        Ok(Self { letters })
    }

    pub fn identity(n_qubits: usize) -> Self {
        assert!(n_qubits > 0, "n_qubits must be positive");
        Self {
            letters: vec![Pauli::I; n_qubits],
        }
    }

    /// `pauli` on qubit `qubit` (1-based), identity elsewhere.
    pub fn single(n_qubits: usize, qubit: usize, pauli: Pauli) -> Result<Self> {
        Self::from_sparse(n_qubits, &[(qubit, pauli)])
    }

    /// Builds a word from `(qubit, letter)` pairs with 1-based qubit indices.
    pub fn from_sparse(n_qubits: usize, ops: &[(usize, Pauli)]) -> Result<Self> {
        if n_qubits == 0 {
            return Err(domain("n_qubits must be positive"));
        }
        let mut letters = vec![Pauli::I; n_qubits];
        for &(q, p) in ops {
            if q == 0 || q > n_qubits {
                return Err(domain(format!("qubit {q} outside 1..={n_qubits}")));
            }
            letters[q - 1] = p;
        }
        Ok(Self { letters })
    }

    pub fn n_qubits(&self) -> usize {
        self.letters.len()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    pub fn is_identity(&self) -> bool {
        self.letters.iter().all(|&p| p == Pauli::I)
    }

    pub fn weight(&self) -> usize {
        self.letters.iter().filter(|&&p| p != Pauli::I).count()
    }

    /// Bit masks (x, z) over basis indices, qubit 1 = most significant bit.
    pub(crate) fn masks(&self) -> (usize, usize, u32) {
        let n = self.letters.len();
        let (mut x, mut z, mut ys) = (0usize, 0usize, 0u32);
        for (k, p) in self.letters.iter().enumerate() {
            let bit = 1usize << (n - 1 - k);
            let (px, pz) = p.xz();
            if px {
                x |= bit;
            }
            if pz {
                z |= bit;
            }
            if px && pz {
                ys += 1;
            }
        }
        (x, z, ys)
    }

    fn check_same(&self, other: &PauliString) -> Result<()> {
        if self.n_qubits() != other.n_qubits() {
            return Err(Error::QubitMismatch {
                left: self.n_qubits(),
                right: other.n_qubits(),
            });
        }
        Ok(())
    }

    /// Number of positions where the letters differ and neither is I.
    pub fn anticommuting_positions(&self, other: &PauliString) -> Result<usize> {
        self.check_same(other)?;
        Ok(self
            .letters
            .iter()
            .zip(&other.letters)
            .filter(|(a, b)| **a != Pauli::I && **b != Pauli::I && a != b)
            .count())
    }

    pub fn commutes_with(&self, other: &PauliString) -> Result<bool> {
        Ok(self.anticommuting_positions(other)? % 2 == 0)
    }

    /// Exact product `self · other = phase · word`.
    pub fn mul(&self, other: &PauliString) -> Result<PhasedPauli> {
        self.check_same(other)?;
        let mut phase = Phase::ONE;
        let letters = self
            .letters
            .iter()
            .zip(&other.letters)
            .map(|(&a, &b)| {
                let (ph, p) = a.product(b);
                phase = phase * ph;
                p
            })
            .collect();
        Ok(PhasedPauli {
            phase,
            string: PauliString { letters },
        })
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.letters {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .chars()
            .enumerate()
            .map(|(i, c)| {
                Pauli::from_char(c).ok_or_else(|| Error::Parse {
                    column: i + 1,
                    message: format!("invalid Pauli letter '{c}'"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        PauliString::new(letters)
    }
}

/// A Pauli word with a phase in {+1, +i, −1, −i}.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PhasedPauli {
    pub phase: Phase,
    pub string: PauliString,
}

impl PhasedPauli {
    pub fn new(phase: Phase, string: PauliString) -> Self {
        Self { phase, string }
    }

    pub fn multiply(&self, other: &PhasedPauli) -> Result<PhasedPauli> {
        let prod = self.string.mul(&other.string)?;
        Ok(PhasedPauli {
            phase: self.phase * other.phase * prod.phase,
            string: prod.string,
        })
    }
}

impl From<PauliString> for PhasedPauli {
    fn from(string: PauliString) -> Self {
        PhasedPauli {
            phase: Phase::ONE,
            string,
        }
    }
}

impl fmt::Display for PhasedPauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}·{}", self.phase, self.string)
    }
}
