//! Three-spin encoded qubits driven by XY or exchange couplings.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::pauli::{Hamiltonian, PauliString};
use crate::sequence::{
    Bb1W, Block, ControlLabel, CorrectionBuilder, Pulse, PulseSequence, Segment,
};
use crate::unitary::{evolve, hamiltonian_from_matrix, matrix_of, CMatrix, Subspace};

/// Error label shared by every XY pulse (errors proportional across couplings).
pub const XY_LABEL: &str = "A";
/// Error label shared by every exchange pulse.
pub const EXCHANGE_LABEL: &str = "E";

const PROJECTION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CouplingKind {
    /// `A_ij = ½(X_iX_j + Y_iY_j)`.
    Xy,
    /// `G_ij = X_iX_j + Y_iY_j + Z_iZ_j`.
    Heisenberg,
    /// `E(i,j) = ½(I + X_iX_j + Y_iY_j + Z_iZ_j)`, the swap of spins i and j.
    Exchange,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Coupling {
    kind: CouplingKind,
    i: usize,
    j: usize,
    n_qubits: usize,
}

impl Coupling {
    /// Qubits are 1-based; the pair is stored ordered.
    pub fn new(kind: CouplingKind, i: usize, j: usize, n_qubits: usize) -> Result<Self> {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        if i == j || i == 0 || j > n_qubits {
            return Err(domain(format!(
                "coupling pair ({i}, {j}) invalid on {n_qubits} qubits"
            )));
        }
        Ok(Self {
            kind,
            i,
            j,
            n_qubits,
        })
    }

    pub fn kind(&self) -> CouplingKind {
        self.kind
    }

    pub fn pair(&self) -> (usize, usize) {
        (self.i, self.j)
    }
}

fn two_site(n: usize, i: usize, j: usize, p: char) -> PauliString {
    let s: String = (1..=n)
        .map(|k| if k == i || k == j { p } else { 'I' })
        .collect();
    s.parse().expect("valid Pauli letters")
}

pub fn coupling_hamiltonian(c: &Coupling) -> Hamiltonian {
    let (n, i, j) = (c.n_qubits, c.i, c.j);
    let terms: Vec<(f64, PauliString)> = match c.kind {
        CouplingKind::Xy => vec![(0.5, two_site(n, i, j, 'X')), (0.5, two_site(n, i, j, 'Y'))],
        CouplingKind::Heisenberg => ['X', 'Y', 'Z']
            .into_iter()
            .map(|p| (1.0, two_site(n, i, j, p)))
            .collect(),
        CouplingKind::Exchange => std::iter::once((0.5, PauliString::identity(n)))
            .chain(
                ['X', 'Y', 'Z']
                    .into_iter()
                    .map(|p| (0.5, two_site(n, i, j, p))),
            )
            .collect(),
    };
    Hamiltonian::from_terms(n, terms).expect("terms share the qubit count")
}

fn xy(i: usize, j: usize) -> Hamiltonian {
    coupling_hamiltonian(&Coupling::new(CouplingKind::Xy, i, j, 3).expect("valid pair"))
}

fn exchange(i: usize, j: usize) -> Hamiltonian {
    coupling_hamiltonian(&Coupling::new(CouplingKind::Exchange, i, j, 3).expect("valid pair"))
}

/// Spin quantum numbers stored doubled so they stay integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SectorLabel {
    /// `2S`, absent when only `m_z` is conserved.
    pub twice_spin: Option<u32>,
    pub twice_mz: i32,
}

impl SectorLabel {
    pub fn spin(&self) -> Option<f64> {
        self.twice_spin.map(|s| s as f64 / 2.0)
    }

    pub fn mz(&self) -> f64 {
        self.twice_mz as f64 / 2.0
    }
}

impl fmt::Display for SectorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.twice_spin {
            Some(s) => write!(f, "S={}/2,m_z={}/2", s, self.twice_mz),
            None => write!(f, "m_z={}/2", self.twice_mz),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Grading {
    /// `m_z` only; invariant under every `A_ij`.
    Xy,
    /// `(S, m_z)`; invariant under every `E(i,j)`.
    Heisenberg,
}

/// Computational basis states with `m_z = twice_mz/2`; `|0⟩` is spin up.
fn mz_states(n: usize, twice_mz: i32) -> Vec<usize> {
    (0..1usize << n)
        .filter(|&b| n as i32 - 2 * b.count_ones() as i32 == twice_mz)
        .collect()
}

fn restrict_real(m: &CMatrix, states: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(states.len(), states.len(), |a, b| {
        m[(states[a], states[b])].re
    })
}

/// Orthonormal real eigenvectors of a symmetric matrix, sorted by eigenvalue
/// descending, each signed so that its largest-magnitude entry is positive.
fn sorted_eigenvectors(m: &DMatrix<f64>) -> Vec<(f64, DVector<f64>)> {
    let eig = m.clone().symmetric_eigen();
    let mut out: Vec<(f64, DVector<f64>)> = (0..m.nrows())
        .map(|k| {
            let mut v = eig.eigenvectors.column(k).into_owned();
            let lead = v
                .iter()
                .copied()
                .fold(0.0f64, |a, x| if x.abs() > a.abs() { x } else { a });
            if lead < 0.0 {
                v.neg_mut();
            }
            (eig.eigenvalues[k], v)
        })
        .collect();
    out.sort_by(|a, b| b.0.total_cmp(&a.0));
    out
}

fn embed(states: &[usize], n: usize, v: &DVector<f64>) -> DVector<Complex64> {
    let mut out = DVector::zeros(1 << n);
    for (k, &s) in states.iter().enumerate() {
        out[s] = Complex64::new(v[k], 0.0);
    }
    out
}

fn total_spin_squared(n: usize) -> Result<CMatrix> {
    let dim = 1 << n;
    // S² = 3n/4 + Σ_{i<j} (E(i,j) − ½)
    let pairs = (n * (n - 1) / 2) as f64;
    let mut s2 = CMatrix::identity(dim, dim) * Complex64::new(0.75 * n as f64 - 0.5 * pairs, 0.0);
    for i in 1..=n {
        for j in i + 1..=n {
            s2 += matrix_of(&coupling_hamiltonian(&Coupling::new(
                CouplingKind::Exchange,
                i,
                j,
                n,
            )?));
        }
    }
    Ok(s2)
}

/// Invariant subspaces of three spins, ordered by `m_z` descending, then
/// (Heisenberg) by `S` descending.
pub fn sector_decomposition(n: usize, grading: Grading) -> Result<Vec<(SectorLabel, Subspace)>> {
    if n != 3 {
        return Err(domain(format!(
            "sector decomposition supports n = 3 only, got {n}"
        )));
    }
    let mut out = Vec::new();
    let s2 = total_spin_squared(n)?;
    let e12 = matrix_of(&exchange(1, 2));
    for twice_mz in [3, 1, -1, -3] {
        let states = mz_states(n, twice_mz);
        match grading {
            Grading::Xy => {
                let cols: Vec<_> = states
                    .iter()
                    .map(|&s| {
                        let mut v = DVector::zeros(1 << n);
                        v[s] = Complex64::new(1.0, 0.0);
                        v
                    })
                    .collect();
                out.push((
                    SectorLabel {
                        twice_spin: None,
                        twice_mz,
                    },
                    Subspace::from_columns(&cols)?,
                ));
            }
            Grading::Heisenberg => {
                let spins = sorted_eigenvectors(&restrict_real(&s2, &states));
                for twice_spin in [3u32, 1] {
                    let target = (twice_spin as f64 / 2.0) * (twice_spin as f64 / 2.0 + 1.0);
                    let block: Vec<DVector<f64>> = spins
                        .iter()
                        .filter(|(l, _)| (l - target).abs() < 1e-9)
                        .map(|(_, v)| v.clone())
                        .collect();
                    if block.is_empty() {
                        continue;
                    }
                    // order within the multiplet by E(1,2) eigenvalue
                    let basis = DMatrix::from_columns(&block);
                    let e = basis.transpose() * restrict_real(&e12, &states) * &basis;
                    let cols: Vec<_> = sorted_eigenvectors(&e)
                        .iter()
                        .map(|(_, w)| {
                            let mut v = &basis * w;
                            let lead = v.iter().copied().fold(0.0f64, |a, x| {
                                if x.abs() > a.abs() {
                                    x
                                } else {
                                    a
                                }
                            });
                            if lead < 0.0 {
                                v.neg_mut();
                            }
                            embed(&states, n, &v)
                        })
                        .collect();
                    out.push((
                        SectorLabel {
                            twice_spin: Some(twice_spin),
                            twice_mz,
                        },
                        Subspace::from_columns(&cols)?,
                    ));
                }
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Xy3,
    Heisenberg3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogicalAxis {
    Z,
    X,
}

/// A logical qubit on three spins. `z_logical` and `x_logical` restrict to
/// anticommuting involutions on the code space; the logical rotation about
/// an axis is `exp(−iθ·op/2)`.
#[derive(Debug, Clone)]
pub struct Encoding {
    pub scheme: Scheme,
    pub code: Subspace,
    pub z_logical: Hamiltonian,
    pub x_logical: Hamiltonian,
}

impl Encoding {
    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "xy3" => Self::xy3(),
            "heisenberg3" => Self::heisenberg3(),
            other => Err(domain(format!(
                "unknown encoding '{other}', expected xy3 or heisenberg3"
            ))),
        }
    }

    /// Code: the `±1` eigenvectors of `Z̄ = −W†A13W` in the `m_z = ½`
    /// sector, with `W = U23(π/2)·U12(π/4)`.
    pub fn xy3() -> Result<Self> {
        let w = p3_frame()?;
        let wd = w.adjoint();
        let z_bar = -(&wd * matrix_of(&xy(1, 3)) * &w);
        let z13 = Hamiltonian::parse("-0.5*ZII + 0.5*IIZ")?;
        let x_bar = &wd * matrix_of(&z13) * &w;
        let states = mz_states(3, 1);
        let cols: Vec<_> = sorted_eigenvectors(&restrict_real(&z_bar, &states))
            .into_iter()
            .filter(|(l, _)| (l.abs() - 1.0).abs() < 1e-9)
            .map(|(_, v)| embed(&states, 3, &v))
            .collect();
        Ok(Self {
            scheme: Scheme::Xy3,
            code: Subspace::from_columns(&cols)?,
            z_logical: hamiltonian_from_matrix(&z_bar, PROJECTION_TOL)?,
            x_logical: hamiltonian_from_matrix(&x_bar, PROJECTION_TOL)?,
        })
    }

    /// Code: the `(S = ½, m_z = ½)` doublet, ordered by `E(1,2)` eigenvalue.
    pub fn heisenberg3() -> Result<Self> {
        let code = sector_decomposition(3, Grading::Heisenberg)?
            .into_iter()
            .find(|(l, _)| l.twice_spin == Some(1) && l.twice_mz == 1)
            .map(|(_, s)| s)
            .expect("doublet present");
        let e12 = exchange(1, 2);
        let x = e12.combine(1.0 / 3f64.sqrt(), &exchange(2, 3), 2.0 / 3f64.sqrt())?;
        Ok(Self {
            scheme: Scheme::Heisenberg3,
            code,
            z_logical: e12,
            x_logical: x,
        })
    }

    pub fn logical(&self, axis: LogicalAxis) -> &Hamiltonian {
        match axis {
            LogicalAxis::Z => &self.z_logical,
            LogicalAxis::X => &self.x_logical,
        }
    }

    /// Ideal `exp(−iθ·op/2)` on the full space.
    pub fn ideal(&self, axis: LogicalAxis, theta: f64) -> Result<crate::unitary::Unitary> {
        evolve(&[(theta / 2.0, 0.0, self.logical(axis))])
    }
}

fn p3_frame() -> Result<CMatrix> {
    let u12 = evolve(&[(PI / 4.0, 0.0, &xy(1, 2))])?;
    let u23 = evolve(&[(PI / 2.0, 0.0, &xy(2, 3))])?;
    Ok(u23.compose(&u12)?.into_matrix())
}

fn label(name: &str) -> ControlLabel {
    ControlLabel::new(name).expect("valid label")
}

/// `(pair, angle)` in time order: `U12(π/4), U23(π/2), U13(−θ/2),
/// U23(−π/2), U12(−π/4)`.
fn p3_pulses(theta: f64) -> [((usize, usize), f64); 5] {
    [
        ((1, 2), PI / 4.0),
        ((2, 3), PI / 2.0),
        ((1, 3), -theta / 2.0),
        ((2, 3), -PI / 2.0),
        ((1, 2), -PI / 4.0),
    ]
}

/// Five XY pulses implementing `exp(−i(θ/2)Z̄)` on the code space.
pub fn p3_sequence(theta: f64) -> Result<PulseSequence> {
    let pulses = p3_pulses(theta)
        .into_iter()
        .map(|((i, j), a)| Pulse::single(label(XY_LABEL), a, Arc::new(xy(i, j))))
        .collect::<Result<Vec<_>>>()?;
    PulseSequence::from_pulses(pulses)
}

/// The BB1-W partner for each coupling: the coupling sharing its middle spin.
pub fn p3_partner(pair: (usize, usize)) -> Result<(usize, usize)> {
    match pair {
        (1, 2) => Ok((2, 3)),
        (2, 3) => Ok((1, 2)),
        (1, 3) => Ok((2, 3)),
        other => Err(domain(format!("no P3 partner for pair {other:?}"))),
    }
}

/// P3 with each pulse replaced by a BB1-W block; negative angles use the
/// inverse block.
pub fn p3_bb1(theta: f64) -> Result<PulseSequence> {
    let segments = p3_pulses(theta)
        .into_iter()
        .map(|(pair, a)| {
            let (pi, pj) = p3_partner(pair)?;
            let b = Bb1W::new(
                label(XY_LABEL),
                Arc::new(xy(pair.0, pair.1)),
                label(XY_LABEL),
                Arc::new(xy(pi, pj)),
            )?;
            Ok(Segment::Block(Block {
                sequence: b.build(a.abs())?,
                inverse: a < 0.0,
            }))
        })
        .collect::<Result<Vec<_>>>()?;
    PulseSequence::from_segments(segments)
}

/// `exp(−iθ·op/2)` on the Heisenberg code space via exchange pulses; with
/// `corrected`, BB1-W using the other logical generator as partner.
pub fn heisenberg_logical(axis: LogicalAxis, theta: f64, corrected: bool) -> Result<PulseSequence> {
    let enc = Encoding::heisenberg3()?;
    let z = Arc::new(enc.z_logical.scaled(0.5));
    let x = Arc::new(enc.x_logical.scaled(0.5));
    let (target, partner) = match axis {
        LogicalAxis::Z => (z, x),
        LogicalAxis::X => (x, z),
    };
    if !corrected {
        return PulseSequence::from_pulses(vec![Pulse::single(
            label(EXCHANGE_LABEL),
            theta,
            target,
        )?]);
    }
    require_code_su2(&enc.code, &target, &partner)?;
    let b = Bb1W::new_unchecked(
        label(EXCHANGE_LABEL),
        target,
        label(EXCHANGE_LABEL),
        partner,
    );
    Ok((*b.build(theta)?).clone())
}

/// The restricted pair must close as normalized su(2) on the code space even
/// though the full-space operators do not.
fn require_code_su2(code: &Subspace, h1: &Hamiltonian, h2: &Hamiltonian) -> Result<()> {
    let a = code.compress(&matrix_of(h1));
    let b = code.compress(&matrix_of(h2));
    let i = Complex64::new(0.0, 1.0);
    let bracket = |x: &CMatrix, y: &CMatrix| (x * y - y * x) * (-i);
    let c = bracket(&a, &b);
    let dev = (bracket(&b, &c) - &a)
        .norm()
        .max((bracket(&c, &a) - &b).norm());
    if dev > PROJECTION_TOL {
        return Err(Error::NotSu2 {
            left: h1.to_string(),
            right: h2.to_string(),
            reason: format!("restriction to the code space misses closure by {dev:e}"),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xy_coupling_terms() {
        let h = coupling_hamiltonian(&Coupling::new(CouplingKind::Xy, 1, 2, 2).unwrap());
        assert_eq!(h, Hamiltonian::parse("0.5*XX + 0.5*YY").unwrap());
        assert!(Coupling::new(CouplingKind::Xy, 2, 2, 3).is_err());
        assert!(Coupling::new(CouplingKind::Xy, 1, 4, 3).is_err());
    }

    #[test]
    fn xy_sector_dims() {
        let dims: Vec<usize> = sector_decomposition(3, Grading::Xy)
            .unwrap()
            .iter()
            .map(|(_, s)| s.dim())
            .collect();
        assert_eq!(dims, vec![1, 3, 3, 1]);
        assert!(sector_decomposition(2, Grading::Xy).is_err());
    }

    #[test]
    fn heisenberg_sectors() {
        let sectors = sector_decomposition(3, Grading::Heisenberg).unwrap();
        assert_eq!(sectors.len(), 6);
        let total: usize = sectors.iter().map(|(_, s)| s.dim()).sum();
        assert_eq!(total, 8);
        let doublets = sectors
            .iter()
            .filter(|(l, _)| l.twice_spin == Some(1))
            .count();
        assert_eq!(doublets, 2);
    }

    #[test]
    fn encoding_names() {
        assert_eq!(Encoding::by_name("xy3").unwrap().scheme, Scheme::Xy3);
        assert_eq!(Encoding::by_name("heisenberg3").unwrap().code.dim(), 2);
        assert!(Encoding::by_name("xy4").is_err());
    }

    #[test]
    fn p3_lengths() {
        assert_eq!(p3_sequence(0.3).unwrap().len(), 5);
        assert_eq!(p3_bb1(0.3).unwrap().len(), 20);
        assert_eq!(
            heisenberg_logical(LogicalAxis::Z, 0.3, true).unwrap().len(),
            4
        );
    }
}
