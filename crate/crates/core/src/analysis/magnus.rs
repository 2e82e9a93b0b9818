//! Third-order Magnus term of the BB1-W correction block.
//!
//! With `θ = −4π cos φ`, the block
//! `T(ε) = R(π, φ)·R(2π, 3φ)·R(π, φ)` under error `ε` satisfies
//! `T = U1(−εθ)(I + iε³M3 + O(ε⁴))`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::pauli::{su2_triple, Hamiltonian};
use crate::unitary::{distance, evolve, matrix_of, Unitary};

/// `M3 = (2π³/3)cos φ sin²φ·H1 + 2π³cos²φ sin φ·H2`.
pub fn magnus_m3(phi: f64, h1: &Hamiltonian, h2: &Hamiltonian) -> Result<Hamiltonian> {
    if su2_triple(h1, h2)?.is_none() {
        return Err(Error::NotSu2 {
            left: h1.to_string(),
            right: h2.to_string(),
            reason: "magnus_m3 needs an su(2) pair".into(),
        });
    }
    let p3 = PI.powi(3);
    let (s, c) = phi.sin_cos();
    h1.combine(2.0 * p3 / 3.0 * c * s * s, h2, 2.0 * p3 * c * c * s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockForm {
    /// Angles `π(1+ε), 2π(1+ε), π(1+ε)` about `φ, 3φ, φ`.
    Original,
    /// Error-only angles `πε, 2πε, πε` about `φ, −φ, φ`.
    Toggled,
}

/// The three-rotation correction block at error `ε`.
pub fn correction_block(
    phi: f64,
    eps: f64,
    h1: &Hamiltonian,
    h2: &Hamiltonian,
    form: BlockForm,
) -> Result<Unitary> {
    let rot = |area: f64, axis: f64, e: f64| {
        evolve(&[(area * axis.cos(), e, h1), (area * axis.sin(), e, h2)])
    };
    let (a, b, c) = match form {
        BlockForm::Original => (
            rot(PI, phi, eps)?,
            rot(2.0 * PI, 3.0 * phi, eps)?,
            rot(PI, phi, eps)?,
        ),
        BlockForm::Toggled => (
            rot(PI * eps, phi, 0.0)?,
            rot(2.0 * PI * eps, -phi, 0.0)?,
            rot(PI * eps, phi, 0.0)?,
        ),
    };
    c.compose(&b)?.compose(&a)
}

/// `‖T(ε) − U1(−εθ)(I + iε³M3)‖` with `θ = −4π cos φ`.
pub fn magnus_residual(phi: f64, eps: f64, h1: &Hamiltonian, h2: &Hamiltonian) -> Result<f64> {
    magnus_residual_with(phi, eps, h1, h2, BlockForm::Original)
}

pub fn magnus_residual_with(
    phi: f64,
    eps: f64,
    h1: &Hamiltonian,
    h2: &Hamiltonian,
    form: BlockForm,
) -> Result<f64> {
    if !(eps > 0.0 && eps <= 0.3) {
        return Err(domain(format!(
            "magnus residual needs eps in (0, 0.3], got {eps}"
        )));
    }
    let theta = -4.0 * PI * phi.cos();
    let block = correction_block(phi, eps, h1, h2, form)?;
    let m3 = matrix_of(&magnus_m3(phi, h1, h2)?);
    let dim = m3.nrows();
    let mut approx =
        nalgebra::DMatrix::<Complex64>::identity(dim, dim) + m3 * Complex64::new(0.0, eps.powi(3));
    approx = evolve(&[(-eps * theta, 0.0, h1)])?.matrix() * approx;
    let diff = block.matrix() - approx;
    Ok(diff
        .singular_values()
        .iter()
        .fold(0.0, |a: f64, &b| a.max(b)))
}

/// `‖T(ε) − U1(−εθ)‖`, dominated by the `ε³` term.
pub fn leading_residual(phi: f64, eps: f64, h1: &Hamiltonian, h2: &Hamiltonian) -> Result<f64> {
    let theta = -4.0 * PI * phi.cos();
    let block = correction_block(phi, eps, h1, h2, BlockForm::Original)?;
    distance(&block, &evolve(&[(-eps * theta, 0.0, h1)])?, false)
}
