use super::{Hamiltonian, PauliString, Phase, PhasedPauli};
use crate::error::Result;

/// Outcome of commuting two Pauli words `a/2` and `b/2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CommutatorClass {
    Commute,
    /// `[a/2, b/2] = result/2` where `result` carries phase ±i.
    Su2Partner(PhasedPauli),
}

pub fn commutator_class(a: &PauliString, b: &PauliString) -> Result<CommutatorClass> {
    if a.commutes_with(b)? {
        return Ok(CommutatorClass::Commute);
    }
    // anticommuting: [a/2, b/2] = a·b/2
    let prod = a.mul(b)?;
    debug_assert!(prod.phase.is_imaginary());
    Ok(CommutatorClass::Su2Partner(prod))
}

/// Closure data for `H3 = −i[H1, H2]`: `−i[H2, H3] = k1·H1` and
/// `−i[H3, H1] = k2·H2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Su2Structure {
    pub h3: Hamiltonian,
    pub k1: f64,
    pub k2: f64,
}

impl Su2Structure {
    /// Unit structure constants: the triple obeys the angular-momentum
    /// relations exactly, so a 2π rotation about any axis is ±I.
    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.k1 - 1.0).abs() <= tol && (self.k2 - 1.0).abs() <= tol
    }
}

const PROPORTIONAL_TOL: f64 = 1e-12;

/// Pairwise su(2) closure test; `None` when the pair commutes or does not close.
pub fn su2_structure(h1: &Hamiltonian, h2: &Hamiltonian) -> Result<Option<Su2Structure>> {
    let h3 = h1.lie_bracket(h2)?.pruned(PROPORTIONAL_TOL * scale(h1, h2));
    if h3.is_empty() {
        return Ok(None);
    }
    let back1 = h2.lie_bracket(&h3)?;
    let back2 = h3.lie_bracket(h1)?;
    let k1 = back1.proportionality(h1, PROPORTIONAL_TOL);
    let k2 = back2.proportionality(h2, PROPORTIONAL_TOL);
    Ok(match (k1, k2) {
        (Some(k1), Some(k2)) if k1 > 0.0 && k2 > 0.0 => Some(Su2Structure { h3, k1, k2 }),
        _ => None,
    })
}

/// `H3 = −i[H1, H2]` when `{H1, H2, H3}` closes as su(2).
pub fn su2_triple(h1: &Hamiltonian, h2: &Hamiltonian) -> Result<Option<Hamiltonian>> {
    Ok(su2_structure(h1, h2)?.map(|s| s.h3))
}

fn scale(h1: &Hamiltonian, h2: &Hamiltonian) -> f64 {
    (h1.max_abs_coefficient() * h2.max_abs_coefficient()).max(f64::MIN_POSITIVE)
}

impl PhasedPauli {
    /// Sign of the imaginary phase: +1 for `+i`, −1 for `−i`, 0 otherwise.
    pub fn imaginary_sign(&self) -> i8 {
        match self.phase {
            Phase::I => 1,
            Phase::MINUS_I => -1,
            _ => 0,
        }
    }
}
