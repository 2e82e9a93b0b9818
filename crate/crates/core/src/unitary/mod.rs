//! Dense unitaries built from Pauli-sum Hamiltonians.

mod fidelity;

pub use fidelity::{
    distance, eigenphases, fidelity, infidelity, minimal_arc, subspace_fidelity, FidelityMethod,
    FidelityReport, Subspace,
};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::{Hamiltonian, PauliString};

pub type CMatrix = DMatrix<Complex64>;

const UNITARY_TOL: f64 = 1e-10;

pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Dense unitary; `U†U = I` is checked on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Unitary {
    m: CMatrix,
}

impl Unitary {
    pub fn new(m: CMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch {
                left: m.nrows(),
                right: m.ncols(),
            });
        }
        let dev = unitarity_defect(&m);
        if dev > UNITARY_TOL {
            return Err(Error::NotUnitary(dev));
        }
        Ok(Self { m })
    }

    /// Skips the unitarity check; for products of already-checked unitaries.
    pub(crate) fn from_matrix_unchecked(m: CMatrix) -> Self {
        Self { m }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            m: CMatrix::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    pub fn adjoint(&self) -> Unitary {
        Unitary {
            m: self.m.adjoint(),
        }
    }

    /// `self · rhs` (apply `rhs` first).
    pub fn compose(&self, rhs: &Unitary) -> Result<Unitary> {
        if self.dim() != rhs.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: rhs.dim(),
            });
        }
        Ok(Unitary {
            m: &self.m * &rhs.m,
        })
    }

    /// `e^{iα} · self`.
    pub fn with_phase(&self, alpha: f64) -> Unitary {
        Unitary {
            m: self.m.map(|z| z * Complex64::from_polar(1.0, alpha)),
        }
    }

    pub fn max_abs_diff(&self, other: &Unitary) -> f64 {
        (&self.m - &other.m)
            .iter()
            .fold(0.0, |m, z| m.max(z.norm()))
    }
}

/// max |(U†U − I)_{ij}|.
pub fn unitarity_defect(m: &CMatrix) -> f64 {
    let p = m.adjoint() * m;
    let mut dev = 0.0f64;
    for i in 0..p.nrows() {
        for j in 0..p.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((p[(i, j)] - c(target, 0.0)).norm());
        }
    }
    dev
}

fn add_string(m: &mut CMatrix, coefficient: Complex64, s: &PauliString) {
    let dim = m.nrows();
    let (x, z, ys) = s.masks();
    let base = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)][(ys % 4) as usize];
    for col in 0..dim {
        let row = col ^ x;
        let sign = if (col & z).count_ones() % 2 == 0 {
            1.0
        } else {
            -1.0
        };
        m[(row, col)] += coefficient * base * sign;
    }
}

/// Dense matrix of a Pauli word; qubit 1 is the most significant bit.
pub fn string_matrix(s: &PauliString) -> CMatrix {
    let dim = 1usize << s.n_qubits();
    let mut m = CMatrix::zeros(dim, dim);
    add_string(&mut m, c(1.0, 0.0), s);
    m
}

/// Dense Hermitian matrix `Σ c·P`.
pub fn matrix_of(h: &Hamiltonian) -> CMatrix {
    let dim = 1usize << h.n_qubits();
    let mut m = CMatrix::zeros(dim, dim);
    for (s, coeff) in h.terms() {
        add_string(&mut m, c(coeff, 0.0), s);
    }
    m
}

/// Projects a dense matrix onto the Pauli basis: `c_P = tr(P·A)/2^n`.
/// Only the Hermitian part is kept; coefficients at or below `tol` are dropped.
pub fn hamiltonian_from_matrix(m: &CMatrix, tol: f64) -> Result<Hamiltonian> {
    let dim = m.nrows();
    if !m.is_square() || !dim.is_power_of_two() || dim < 2 {
        return Err(Error::DimensionMismatch {
            left: m.nrows(),
            right: m.ncols(),
        });
    }
    let n = dim.trailing_zeros() as usize;
    let mut h = Hamiltonian::zero(n);
    for j in 0..(1u64 << (2 * n)) {
        let word = crate::pauli::eta(j, n)?;
        let (s, _) = word.terms().next().expect("single term");
        let p = string_matrix(s);
        let coeff = (&p * m).trace().re / dim as f64;
        if coeff.abs() > tol {
            h.add_term(coeff, s.clone())?;
        }
    }
    Ok(h)
}

/// Which exponential route `evolve` takes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpPath {
    /// Closed form when the traceless part squares to a multiple of I,
    /// eigendecomposition otherwise.
    Auto,
    /// Always diagonalize.
    Eigen,
}

/// `exp(−i Σ θ(1+ε) H)` for terms `(θ, ε, H)`.
pub fn evolve(terms: &[(f64, f64, &Hamiltonian)]) -> Result<Unitary> {
    evolve_with(terms, ExpPath::Auto)
}

pub fn evolve_with(terms: &[(f64, f64, &Hamiltonian)], path: ExpPath) -> Result<Unitary> {
    let Some(&(_, _, first)) = terms.first() else {
        return Err(Error::Domain("evolve needs at least one term".into()));
    };
    let mut generator = Hamiltonian::zero(first.n_qubits());
    for &(theta, eps, h) in terms {
        generator = generator.combine(1.0, h, theta + theta * eps)?;
    }
    Ok(exp_minus_i(&generator, path))
}

/// `exp(−iA)` for a Hermitian Pauli sum `A`.
pub fn exp_minus_i(a: &Hamiltonian, path: ExpPath) -> Unitary {
    let dim = 1usize << a.n_qubits();
    if path == ExpPath::Auto && a.is_anticommuting_sum() {
        let phase = Complex64::from_polar(1.0, -a.identity_part());
        let b = a.traceless_part();
        let norm = b.norm_sq().sqrt();
        if norm == 0.0 {
            return Unitary::from_matrix_unchecked(CMatrix::identity(dim, dim) * phase);
        }
        let mut m = matrix_of(&b) * c(0.0, -norm.sin() / norm);
        for i in 0..dim {
            m[(i, i)] += c(norm.cos(), 0.0);
        }
        return Unitary::from_matrix_unchecked(m * phase);
    }
    exp_hermitian(&matrix_of(a), -1.0)
}

/// `exp(i·sign·A)` for a dense Hermitian `A` via eigendecomposition.
pub(crate) fn exp_hermitian(a: &CMatrix, sign: f64) -> Unitary {
    let eig = a.clone().symmetric_eigen();
    let phases = DVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues
            .iter()
            .map(|&l| Complex64::from_polar(1.0, sign * l)),
    );
    let w = &eig.eigenvectors;
    let m = w * CMatrix::from_diagonal(&phases) * w.adjoint();
    Unitary::from_matrix_unchecked(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn h(s: &str) -> Hamiltonian {
        Hamiltonian::parse(s).unwrap()
    }

    fn close(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
        (a - b).iter().all(|z| z.norm() <= tol)
    }

    #[test]
    fn matrix_of_half_x() {
        let m = matrix_of(&h("0.5*X"));
        let want = CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0.5, 0.), c(0.5, 0.), c(0., 0.)]);
        assert_eq!(m, want);
    }

    #[test]
    fn matrix_of_half_zz_is_diagonal() {
        let m = matrix_of(&h("0.5*ZZ"));
        let d: Vec<f64> = (0..4).map(|i| m[(i, i)].re).collect();
        assert_eq!(d, vec![0.5, -0.5, -0.5, 0.5]);
        assert_eq!(m.iter().filter(|z| z.norm() > 0.0).count(), 4);
    }

    #[test]
    fn xy_coupling_swaps_01_and_10() {
        let m = matrix_of(&h("0.5*XX + 0.5*YY"));
        let mut want = CMatrix::zeros(4, 4);
        want[(1, 2)] = c(1.0, 0.0);
        want[(2, 1)] = c(1.0, 0.0);
        assert!(close(&m, &want, 0.0));
    }

    #[test]
    fn qubit_one_is_most_significant() {
        // Z on qubit 1 flips sign on basis states 2,3 (|10>, |11>)
        let m = matrix_of(&h("1*ZI"));
        let d: Vec<f64> = (0..4).map(|i| m[(i, i)].re).collect();
        assert_eq!(d, vec![1.0, 1.0, -1.0, -1.0]);
    }

    #[test]
    fn pi_rotation_about_x() {
        let x = h("0.5*X");
        let u = evolve(&[(PI, 0.0, &x)]).unwrap();
        let want = matrix_of(&h("1*X")) * c(0.0, -1.0);
        assert!(close(u.matrix(), &want, 1e-15));
    }

    #[test]
    fn zz_rotation_diagonal() {
        let zz = h("0.5*ZZ");
        let t = 0.7;
        let u = evolve(&[(t, 0.0, &zz)]).unwrap();
        let e = |s: f64| Complex64::from_polar(1.0, s * t / 2.0);
        let want = CMatrix::from_diagonal(&DVector::from_vec(vec![e(-1.), e(1.), e(1.), e(-1.)]));
        assert!(close(u.matrix(), &want, 1e-15));
        let slow = evolve_with(&[(t, 0.0, &zz)], ExpPath::Eigen).unwrap();
        assert!(close(slow.matrix(), &want, 1e-14));
    }

    #[test]
    fn error_scales_angle() {
        let x = h("0.5*X");
        let a = evolve(&[(1.0, 0.25, &x)]).unwrap();
        let b = evolve(&[(1.25, 0.0, &x)]).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-15);
    }

    #[test]
    fn identity_component_is_global_phase() {
        let a = h("0.5*II + 0.5*XX + 0.5*YY + 0.5*ZZ");
        let fast = evolve(&[(0.3, 0.0, &a)]).unwrap();
        let slow = evolve_with(&[(0.3, 0.0, &a)], ExpPath::Eigen).unwrap();
        assert!(fast.max_abs_diff(&slow) < 1e-13);
    }

    #[test]
    fn projection_recovers_hamiltonian() {
        let a = h("0.5*XZY - 0.25*YZX + 0.125*III");
        let back = hamiltonian_from_matrix(&matrix_of(&a), 1e-14).unwrap();
        assert!(back.approx_eq(&a, 1e-15));
    }

    #[test]
    fn rejects_non_unitary() {
        let m = CMatrix::identity(2, 2) * c(2.0, 0.0);
        assert!(matches!(Unitary::new(m), Err(Error::NotUnitary(_))));
    }

    #[test]
    fn mismatched_terms() {
        let a = h("0.5*X");
        let b = h("0.5*XX");
        assert!(evolve(&[(1.0, 0.0, &a), (1.0, 0.0, &b)]).is_err());
    }
}
