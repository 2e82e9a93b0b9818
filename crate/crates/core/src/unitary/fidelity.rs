//! Minimum-over-states fidelity `F(U, V) = min_ψ |⟨ψ|U†V|ψ⟩|` and the
//! operator-norm distance.
//!
//! On the full space `U†V` is unitary, so `F` is the distance from the
//! origin to the convex hull of its eigenvalues: if all eigenphases fit in
//! an arc of width `Δ < π`, `F = cos(Δ/2)`. Infidelity is evaluated as
//! `2 sin²(Δ/4)` so that values far below machine epsilon stay accurate.
//!
//! On a subspace that `U†V` does not leave invariant, `F` is the distance
//! from the origin to the numerical range of the compression `C = B†U†VB`,
//! found by maximizing `λ_min(Re(e^{iγ}C))` over `γ`. The leakage
//! `L = (I − BB†)U†VB` is kept separate from the polar factor of `C`, which
//! keeps the small quantity `1 − λ_min` accurate even when it is far below
//! `10⁻¹⁶`.

use std::f64::consts::{PI, TAU};

use nalgebra::DVector;
use num_complex::Complex64;

use super::{c, CMatrix, Unitary};
use crate::error::{Error, Result};

const ORTHONORMAL_TOL: f64 = 1e-12;
const INVARIANCE_TOL: f64 = 1e-10;
const ANGULAR_GRID: usize = 720;
const GOLDEN_ITERATIONS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FidelityMethod {
    EigenphaseArc,
    NumericalRange,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FidelityReport {
    pub fidelity: f64,
    pub infidelity: f64,
    pub method: FidelityMethod,
    /// `min_α ‖U − e^{iα}V‖` on the space the fidelity was measured on.
    pub global_phase_aligned_distance: f64,
}

/// Orthonormal columns spanning a subspace of `C^{ambient_dim}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    basis: CMatrix,
}

impl Subspace {
    pub fn new(basis: CMatrix) -> Result<Self> {
        let d = basis.ncols();
        if d == 0 || basis.nrows() < d {
            return Err(Error::Domain(format!(
                "subspace basis must be ambient x d with 1 <= d <= ambient, got {}x{}",
                basis.nrows(),
                d
            )));
        }
        let gram = basis.adjoint() * &basis;
        let dev = (0..d)
            .flat_map(|i| (0..d).map(move |j| (i, j)))
            .map(|(i, j)| (gram[(i, j)] - c(if i == j { 1.0 } else { 0.0 }, 0.0)).norm())
            .fold(0.0, f64::max);
        if dev > ORTHONORMAL_TOL {
            return Err(Error::NotOrthonormal(dev));
        }
        Ok(Self { basis })
    }

    pub fn from_columns(columns: &[DVector<Complex64>]) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::Domain("subspace needs at least one vector".into()));
        }
        Self::new(CMatrix::from_columns(columns))
    }

    pub fn full(dim: usize) -> Self {
        Self {
            basis: CMatrix::identity(dim, dim),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    pub fn projector(&self) -> CMatrix {
        &self.basis * self.basis.adjoint()
    }

    /// `B†AB`.
    pub fn compress(&self, a: &CMatrix) -> CMatrix {
        self.basis.adjoint() * a * &self.basis
    }

    /// `‖(I − BB†)AB‖_F`: zero when span(B) is invariant under `A`.
    pub fn leakage_norm(&self, a: &CMatrix) -> f64 {
        let ab = a * &self.basis;
        (&ab - &self.basis * (self.basis.adjoint() * &ab)).norm()
    }
}

fn check_dims(u: &Unitary, v: &Unitary) -> Result<()> {
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch {
            left: u.dim(),
            right: v.dim(),
        });
    }
    Ok(())
}

/// Spectral data of a (numerically) unitary matrix: eigenvalues
/// `e^{i(alpha + local_k)}` with `local_k ∈ (−π, π)`, and unitary eigenvectors.
pub(crate) struct UnitaryEigen {
    pub alpha: f64,
    pub local: Vec<f64>,
    pub vectors: CMatrix,
}

/// Diagonalizes a unitary through the Cayley transform
/// `C = i(I − M')(I + M')⁻¹` of `M' = e^{−iα}M`, which is Hermitian with
/// eigenvalues `tan(μ/2)`. `α` is chosen so that no eigenvalue of `M'` sits
/// near −1. The Hermitian solver always converges and resolves phases
/// relative to `‖C‖`, so near-scalar unitaries keep full relative accuracy.
pub(crate) fn unitary_eigen(m: &CMatrix) -> UnitaryEigen {
    let d = m.nrows();
    let id = CMatrix::identity(d, d);
    let tr = m.trace();
    let alpha0 = if tr.norm() > 0.0 { tr.arg() } else { 0.0 };
    let candidates = 2 * d + 1;
    let mut best: Option<(f64, f64, CMatrix)> = None;
    for j in 0..candidates {
        let alpha = alpha0 + TAU * j as f64 / candidates as f64;
        let rotated = m * Complex64::from_polar(1.0, -alpha);
        let margin = (&id + &rotated)
            .singular_values()
            .iter()
            .fold(f64::INFINITY, |a, &b| a.min(b));
        if best.as_ref().is_none_or(|b| margin > b.1) {
            best = Some((alpha, margin, rotated));
        }
        // every eigenphase within about ±150° of α
        if margin > 0.5 {
            break;
        }
    }
    let (alpha, _, rotated) = best.expect("at least one candidate");
    let inv = (&id + &rotated)
        .lu()
        .try_inverse()
        .expect("candidate rotation keeps I + M invertible");
    let cayley = (&id - &rotated) * inv * c(0.0, 1.0);
    let herm = (&cayley + cayley.adjoint()) * c(0.5, 0.0);
    let eig = herm.symmetric_eigen();
    UnitaryEigen {
        alpha,
        local: eig.eigenvalues.iter().map(|t| 2.0 * t.atan()).collect(),
        vectors: eig.eigenvectors,
    }
}

fn wrap_phase(x: f64) -> f64 {
    if x > -PI && x <= PI {
        x
    } else {
        x.sin().atan2(x.cos())
    }
}

/// Arguments of the eigenvalues of a unitary `m`, in (−π, π].
pub fn eigenphases(m: &CMatrix) -> Vec<f64> {
    let e = unitary_eigen(m);
    e.local.iter().map(|mu| wrap_phase(e.alpha + mu)).collect()
}

/// Width of the shortest arc of the unit circle containing all phases.
/// Phases clustered around zero give an exact difference, with no
/// cancellation against 2π.
pub fn minimal_arc(phases: &[f64]) -> f64 {
    if phases.len() <= 1 {
        return 0.0;
    }
    let mut p: Vec<f64> = phases.iter().map(|&x| wrap_phase(x)).collect();
    p.sort_by(f64::total_cmp);
    let span = p[p.len() - 1] - p[0];
    let max_internal = p.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    if TAU - span >= max_internal {
        span
    } else {
        TAU - max_internal
    }
}

fn arc_report(m: &CMatrix, aligned_distance: f64) -> FidelityReport {
    let delta = minimal_arc(&unitary_eigen(m).local);
    let (fidelity, infidelity) = if delta < PI {
        (((delta / 2.0).cos()), 2.0 * (delta / 4.0).sin().powi(2))
    } else {
        (0.0, 1.0)
    };
    FidelityReport {
        fidelity,
        infidelity,
        method: FidelityMethod::EigenphaseArc,
        global_phase_aligned_distance: aligned_distance,
    }
}

pub fn fidelity(u: &Unitary, v: &Unitary) -> Result<FidelityReport> {
    check_dims(u, v)?;
    let m = u.matrix().adjoint() * v.matrix();
    Ok(arc_report(&m, aligned_distance(u.matrix(), v.matrix())))
}

pub fn infidelity(u: &Unitary, v: &Unitary) -> Result<f64> {
    Ok(fidelity(u, v)?.infidelity)
}

pub fn subspace_fidelity(u: &Unitary, v: &Unitary, s: &Subspace) -> Result<FidelityReport> {
    check_dims(u, v)?;
    if s.ambient_dim() != u.dim() {
        return Err(Error::DimensionMismatch {
            left: s.ambient_dim(),
            right: u.dim(),
        });
    }
    let m = u.matrix().adjoint() * v.matrix();
    let b = s.basis();
    let mb = &m * b;
    let compressed = b.adjoint() * &mb;
    let leak = &mb - b * &compressed;
    let aligned = aligned_distance(&s.compress(u.matrix()), &s.compress(v.matrix()));
    if leak.norm() <= INVARIANCE_TOL {
        return Ok(arc_report(&compressed, aligned));
    }
    let f_min = numerical_range_gap(&compressed, &leak);
    Ok(FidelityReport {
        fidelity: (1.0 - f_min).max(0.0),
        infidelity: f_min.min(1.0),
        method: FidelityMethod::NumericalRange,
        global_phase_aligned_distance: aligned,
    })
}

/// `min_γ λ_max(I − Re(e^{iγ}C))`, i.e. one minus the distance from the
/// origin to the numerical range of `C` (clamped below at zero fidelity).
fn numerical_range_gap(compressed: &CMatrix, leak: &CMatrix) -> f64 {
    let d = compressed.nrows();
    let gram = leak.adjoint() * leak;
    let eig = gram.clone().symmetric_eigen();
    let worst = eig.eigenvalues.iter().fold(0.0f64, |m, &x| m.max(x));

    let objective: Box<dyn Fn(f64) -> f64> = if worst < 0.5 {
        // C = W·P with P = sqrt(I − L†L) = I − R
        let q = &eig.eigenvectors;
        let diag = |f: &dyn Fn(f64) -> f64| {
            let v =
                DVector::from_iterator(d, eig.eigenvalues.iter().map(|&s| c(f(s.max(0.0)), 0.0)));
            q * CMatrix::from_diagonal(&v) * q.adjoint()
        };
        let r = diag(&|s| s / (1.0 + (1.0 - s).sqrt()));
        let p_inv = diag(&|s| 1.0 / (1.0 - s).sqrt());
        let w = compressed * p_inv;
        // γ = δ − α_W, so γ + ω_k = δ + μ_k without cancellation
        let we = unitary_eigen(&w);
        let wq = we.vectors;
        let mus = we.local;
        let wr = &w * &r * Complex64::from_polar(1.0, -we.alpha);
        Box::new(move |delta: f64| {
            let s = DVector::from_iterator(
                d,
                mus.iter()
                    .map(|&mu| c(2.0 * ((delta + mu) / 2.0).sin().powi(2), 0.0)),
            );
            let base = &wq * CMatrix::from_diagonal(&s) * wq.adjoint();
            let tilt = &wr * Complex64::from_polar(1.0, delta);
            let k = base + (&tilt + tilt.adjoint()) * c(0.5, 0.0);
            max_eigenvalue(&k)
        })
    } else {
        let cm = compressed.clone();
        Box::new(move |gamma: f64| {
            let a = &cm * Complex64::from_polar(1.0, gamma);
            let re = (&a + a.adjoint()) * c(0.5, 0.0);
            let k = CMatrix::identity(d, d) - re;
            max_eigenvalue(&k)
        })
    };

    let step = TAU / ANGULAR_GRID as f64;
    let (best_i, _) = (0..ANGULAR_GRID)
        .map(|i| (i, objective(i as f64 * step - PI)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("nonempty grid");
    let centre = best_i as f64 * step - PI;
    golden_min(&*objective, centre - step, centre + step)
}

fn max_eigenvalue(h: &CMatrix) -> f64 {
    h.clone()
        .symmetric_eigenvalues()
        .iter()
        .fold(f64::NEG_INFINITY, |m, &x| m.max(x))
}

fn golden_min(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - ratio * (hi - lo);
    let mut b = lo + ratio * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    for _ in 0..GOLDEN_ITERATIONS {
        if hi - lo <= f64::EPSILON * hi.abs().max(1.0) {
            break;
        }
        if fa <= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - ratio * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + ratio * (hi - lo);
            fb = f(b);
        }
    }
    fa.min(fb)
}

fn spectral_norm(m: &CMatrix) -> f64 {
    m.singular_values().iter().fold(0.0f64, |a, &b| a.max(b))
}

fn aligned_distance(u: &CMatrix, v: &CMatrix) -> f64 {
    let tr = (u.adjoint() * v).trace();
    let rot = if tr.norm() > 0.0 {
        Complex64::from_polar(1.0, -tr.arg())
    } else {
        c(1.0, 0.0)
    };
    spectral_norm(&(u - v * rot))
}

/// `‖U − V‖`, or with `align_phase`, `‖U − e^{−i·arg tr(U†V)}V‖`.
pub fn distance(u: &Unitary, v: &Unitary, align_phase: bool) -> Result<f64> {
    check_dims(u, v)?;
    Ok(if align_phase {
        aligned_distance(u.matrix(), v.matrix())
    } else {
        spectral_norm(&(u.matrix() - v.matrix()))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::Hamiltonian;
    use crate::unitary::{evolve, matrix_of};

    fn h(s: &str) -> Hamiltonian {
        Hamiltonian::parse(s).unwrap()
    }

    fn pauli(s: &str) -> Unitary {
        Unitary::new(matrix_of(&h(&format!("1*{s}")))).unwrap()
    }

    #[test]
    fn self_fidelity_is_one() {
        let u = evolve(&[(0.4, 0.0, &h("0.5*XY"))]).unwrap();
        let r = fidelity(&u, &u).unwrap();
        assert_eq!(r.fidelity, 1.0);
        assert_eq!(r.infidelity, 0.0);
    }

    #[test]
    fn quarter_turn_about_z() {
        let u = Unitary::identity(2);
        let v = evolve(&[(PI / 2.0, 0.0, &h("0.5*Z"))]).unwrap();
        let r = fidelity(&u, &v).unwrap();
        assert!((r.fidelity - (PI / 4.0).cos()).abs() < 1e-15);
        assert!((r.infidelity - (1.0 - (PI / 4.0).cos())).abs() < 1e-15);
    }

    #[test]
    fn antipodal_phases_give_zero() {
        let r = fidelity(&Unitary::identity(2), &pauli("Z")).unwrap();
        assert_eq!(r.fidelity, 0.0);
        assert_eq!(r.infidelity, 1.0);
    }

    #[test]
    fn minus_x_is_x_up_to_phase() {
        let x = pauli("X");
        let mx = x.with_phase(PI);
        assert!(distance(&x, &mx, true).unwrap() < 1e-15);
        assert!((distance(&x, &mx, false).unwrap() - 2.0).abs() < 1e-15);
        assert!((fidelity(&x, &mx).unwrap().fidelity - 1.0).abs() < 1e-15);
    }

    #[test]
    fn small_rotation_distance() {
        let eps = 1e-3;
        let v = evolve(&[(eps, 0.0, &h("0.5*Z"))]).unwrap();
        let d = distance(&Unitary::identity(2), &v, false).unwrap();
        let want = (Complex64::from_polar(1.0, -eps / 2.0) - 1.0).norm();
        assert!((d - want).abs() < 1e-15);
    }

    #[test]
    fn minimal_arc_wraps() {
        assert!((minimal_arc(&[3.0, -3.0]) - (TAU - 6.0)).abs() < 1e-15);
        assert_eq!(minimal_arc(&[0.2]), 0.0);
    }

    #[test]
    fn full_subspace_matches_fidelity() {
        let u = evolve(&[(0.3, 0.0, &h("0.5*XZ + 0.2*YY"))]).unwrap();
        let v = evolve(&[(0.31, 0.0, &h("0.5*XZ + 0.2*YY"))]).unwrap();
        let a = fidelity(&u, &v).unwrap();
        let b = subspace_fidelity(&u, &v, &Subspace::full(4)).unwrap();
        assert!((a.infidelity - b.infidelity).abs() < 1e-15);
        assert_eq!(b.method, FidelityMethod::EigenphaseArc);
    }

    #[test]
    fn rank_one_subspace_is_expectation_modulus() {
        let u = Unitary::identity(2);
        let v = evolve(&[(0.9, 0.0, &h("0.5*X"))]).unwrap();
        // |0> leaks under an X rotation
        let psi = DVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        let s = Subspace::from_columns(&[psi]).unwrap();
        let r = subspace_fidelity(&u, &v, &s).unwrap();
        assert_eq!(r.method, FidelityMethod::NumericalRange);
        assert!((r.fidelity - (0.45f64).cos()).abs() < 1e-12);
    }

    #[test]
    fn non_orthonormal_basis_rejected() {
        let b = CMatrix::from_row_slice(2, 1, &[c(1.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(Subspace::new(b), Err(Error::NotOrthonormal(_))));
    }

    #[test]
    fn dimension_mismatch() {
        assert!(fidelity(&Unitary::identity(2), &Unitary::identity(4)).is_err());
        assert!(distance(&Unitary::identity(2), &Unitary::identity(4), true).is_err());
    }
}
