//! Invariant suite behind `multipulse verify`. Each check takes a `fault`
//! flag that flips one sign in its computation, so the harness can confirm
//! the check actually detects a broken identity.

use std::f64::consts::PI;
use std::sync::Arc;

use multipulse::analysis::rng::draw;
use multipulse::analysis::{correction_block, fit_slope, log_grid, magnus_m3, BlockForm};
use multipulse::encoded::{
    coupling_hamiltonian, heisenberg_logical, p3_bb1, p3_sequence, Coupling, CouplingKind,
    Encoding, LogicalAxis,
};
use multipulse::pauli::{
    commutator_class, eta, su2_structure, su2_triple, CommutatorClass, Hamiltonian, Pauli,
    PauliString, PhasedPauli,
};
use multipulse::sequence::{
    bb1_j, bb1_w, bb1_wj, phi_of, wj_chain, ChainControls, Compiler, ControlLabel, ErrorAssignment,
    Pulse, PulseSequence,
};
use multipulse::unitary::{
    distance, evolve, fidelity, matrix_of, subspace_fidelity, CMatrix, Unitary,
};
use num_complex::Complex64;

type CheckResult = Result<String, String>;

pub struct Check {
    pub name: &'static str,
    run: fn(bool) -> CheckResult,
}

pub const CHECKS: &[Check] = &[
    Check {
        name: "pauli_products",
        run: pauli_products,
    },
    Check {
        name: "eta_structure",
        run: eta_structure,
    },
    Check {
        name: "su2_closure",
        run: su2_closure,
    },
    Check {
        name: "heisenberg_commutator",
        run: heisenberg_commutator,
    },
    Check {
        name: "encoded_symmetries",
        run: encoded_symmetries,
    },
    Check {
        name: "collapse_at_zero",
        run: collapse_at_zero,
    },
    Check {
        name: "toggling",
        run: toggling,
    },
    Check {
        name: "jones",
        run: jones,
    },
    Check {
        name: "magnus_order",
        run: magnus_order,
    },
    Check {
        name: "negative_coupling",
        run: negative_coupling,
    },
    Check {
        name: "cache_identity",
        run: cache_identity,
    },
];

pub fn check_names() -> Vec<&'static str> {
    CHECKS.iter().map(|c| c.name).collect()
}

pub struct Report {
    pub lines: Vec<String>,
    pub failed: Vec<&'static str>,
}

/// Runs every check whose name contains `filter`; `fault` names the check
/// that gets a flipped sign.
pub fn run(filter: Option<&str>, fault: Option<&str>) -> Report {
    let mut lines = Vec::new();
    let mut failed = Vec::new();
    let selected: Vec<&Check> = CHECKS
        .iter()
        .filter(|c| filter.is_none_or(|f| c.name.contains(f)))
        .collect();
    for c in &selected {
        match (c.run)(fault == Some(c.name)) {
            Ok(detail) => lines.push(format!("PASS {}: {detail}", c.name)),
            Err(detail) => {
                lines.push(format!("FAIL {}: {detail}", c.name));
                failed.push(c.name);
            }
        }
    }
    lines.push(format!(
        "{} of {} checks passed",
        selected.len() - failed.len(),
        selected.len()
    ));
    Report { lines, failed }
}

const SEED: u64 = 0x5EED;

/// Uniform doubles in `[0, 1)` from the counter-based generator.
struct Stream(u64);

impl Stream {
    fn next(&mut self) -> f64 {
        self.0 += 1;
        (draw(SEED, self.0) >> 11) as f64 / (1u64 << 53) as f64
    }

    fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next()
    }

    fn word(&mut self, n: usize) -> PauliString {
        let letters = (0..n)
            .map(|_| Pauli::from_index((self.next() * 4.0) as u8).expect("index below 4"))
            .collect();
        PauliString::new(letters).expect("nonempty word")
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn max_entry(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |a, z| a.max(z.norm()))
}

fn within(what: &str, dev: f64, tol: f64) -> CheckResult {
    if dev <= tol {
        Ok(format!("{what}: max deviation {dev:.1e} (≤ {tol:.0e})"))
    } else {
        Err(format!("{what}: deviation {dev:.1e} exceeds {tol:.0e}"))
    }
}

/// Dense word by Kronecker products, independent of the library's bit masks.
fn kron(s: &PauliString) -> CMatrix {
    s.letters().iter().fold(CMatrix::identity(1, 1), |m, p| {
        let single = match p {
            Pauli::I => [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
            Pauli::X => [c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
            Pauli::Y => [c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)],
            Pauli::Z => [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)],
        };
        m.kronecker(&CMatrix::from_row_slice(2, 2, &single))
    })
}

fn phased(p: &PhasedPauli, fault: bool) -> CMatrix {
    let sign = if fault { -1.0 } else { 1.0 };
    kron(&p.string) * (p.phase.to_complex() * sign)
}

fn pauli_products(fault: bool) -> CheckResult {
    let mut rng = Stream(0);
    let mut worst: f64 = 0.0;
    let mut pairs = 0;
    for n in 1..=4 {
        for _ in 0..250 {
            let (a, b, d) = (rng.word(n), rng.word(n), rng.word(n));
            let ab = a.mul(&b).map_err(err)?;
            worst = worst.max(max_entry(&(kron(&a) * kron(&b) - phased(&ab, fault))));
            let left = ab.multiply(&PhasedPauli::from(d.clone())).map_err(err)?;
            let right = PhasedPauli::from(a.clone())
                .multiply(&b.mul(&d).map_err(err)?)
                .map_err(err)?;
            if left != right {
                return Err(format!(
                    "({a}·{b})·{d} = {left} but {a}·({b}·{d}) = {right}"
                ));
            }
            pairs += 1;
        }
    }
    within(
        &format!("{pairs} products vs dense, associative"),
        worst,
        1e-14,
    )
}

fn eta_structure(fault: bool) -> CheckResult {
    let mut worst: f64 = 0.0;
    let mut partners = 0;
    for n in 1..=3usize {
        let words: Vec<PauliString> = (1..1u64 << (2 * n))
            .map(|j| eta(j, n).map(|h| h.terms().next().expect("one term").0.clone()))
            .collect::<multipulse::Result<_>>()
            .map_err(err)?;
        for w in &words {
            worst = worst.max(kron(w).trace().norm());
        }
        for a in &words {
            for b in &words {
                let (ma, mb) = (kron(a) * c(0.5, 0.0), kron(b) * c(0.5, 0.0));
                let dense = &ma * &mb - &mb * &ma;
                let want = match commutator_class(a, b).map_err(err)? {
                    CommutatorClass::Commute => CMatrix::zeros(dense.nrows(), dense.ncols()),
                    CommutatorClass::Su2Partner(p) => {
                        partners += 1;
                        if !p.phase.is_imaginary() {
                            return Err(format!("[{a}, {b}] has real phase {}", p.phase));
                        }
                        phased(&p, fault) * c(0.5, 0.0)
                    }
                };
                worst = worst.max(max_entry(&(dense - want)));
            }
        }
    }
    within(
        &format!("eta commutators at n ≤ 3 ({partners} su(2) partners), traceless"),
        worst,
        1e-12,
    )
}

fn su2_closure(fault: bool) -> CheckResult {
    let h = |s: &str| Hamiltonian::parse(s).map_err(err);
    let (x, y) = (h("0.5*X")?, h("0.5*Y")?);
    let z = su2_triple(&x, &y)
        .map_err(err)?
        .ok_or("½X, ½Y do not close")?;
    let back = su2_triple(&y, &z)
        .map_err(err)?
        .ok_or("½Y, ½Z do not close")?;
    let k = back
        .proportionality(&x, 1e-12)
        .ok_or("cyclic closure lost ½X")?;
    let k = if fault { -k } else { k };
    if k <= 0.0 {
        return Err(format!("cyclic closure returns ½X with factor {k}"));
    }
    let a12 = coupling_hamiltonian(&Coupling::new(CouplingKind::Xy, 1, 2, 3).map_err(err)?);
    let a23 = coupling_hamiltonian(&Coupling::new(CouplingKind::Xy, 2, 3, 3).map_err(err)?);
    let sign = if fault { -0.5 } else { 0.5 };
    let a_prime = Hamiltonian::parse(&format!("{sign}*XZY - {sign}*YZX")).map_err(err)?;
    // −i[A12, A23] = A′
    let dev = (matrix_of(&a12.lie_bracket(&a23).map_err(err)?) - matrix_of(&a_prime)).norm();
    let closes = su2_structure(&a12, &a23)
        .map_err(err)?
        .is_some_and(|s| s.is_normalized(1e-12));
    if !closes {
        return Err("A12, A23 do not close as normalized su(2)".into());
    }
    within(
        "½X,½Y cyclic closure; [A12, A23] = iA′ and normalized",
        dev,
        1e-12,
    )
}

/// `P(i, j, k)` moves the state of spin i to j, j to k and k to i.
fn cyclic(i: usize, j: usize, k: usize) -> CMatrix {
    let mut m = CMatrix::zeros(8, 8);
    let bit = |s: usize, q: usize| (s >> (3 - q)) & 1;
    for s in 0..8 {
        let bits = [0, bit(s, 1), bit(s, 2), bit(s, 3)];
        let mut moved = bits;
        moved[j] = bits[i];
        moved[k] = bits[j];
        moved[i] = bits[k];
        let t = (moved[1] << 2) | (moved[2] << 1) | moved[3];
        m[(t, s)] = c(1.0, 0.0);
    }
    m
}

fn heisenberg_commutator(fault: bool) -> CheckResult {
    let g = |i, j| -> Result<CMatrix, String> {
        Ok(matrix_of(&coupling_hamiltonian(
            &Coupling::new(CouplingKind::Heisenberg, i, j, 3).map_err(err)?,
        )))
    };
    let (g12, g23) = (g(1, 2)?, g(2, 3)?);
    let (fwd, back) = if fault {
        (cyclic(1, 3, 2), cyclic(1, 2, 3))
    } else {
        (cyclic(1, 2, 3), cyclic(1, 3, 2))
    };
    let dev = max_entry(&(&g12 * &g23 - &g23 * &g12 - (fwd - back) * c(4.0, 0.0)));
    let gh = |i, j| {
        coupling_hamiltonian(&Coupling::new(CouplingKind::Heisenberg, i, j, 3).expect("valid pair"))
    };
    if su2_structure(&gh(1, 2), &gh(2, 3)).map_err(err)?.is_some() {
        return Err("G12, G23 unexpectedly close as su(2)".into());
    }
    within(
        "[G12, G23] = 4(P(1,2,3) − P(1,3,2)), no su(2) closure",
        dev,
        1e-12,
    )
}

fn encoded_symmetries(fault: bool) -> CheckResult {
    let h = |s: &str| Hamiltonian::parse(s).map(|h| matrix_of(&h)).map_err(err);
    let mz = h("1*ZII + 1*IZI + 1*IIZ")?;
    let (sx, sy, sz) = (
        h("0.5*XII + 0.5*IXI + 0.5*IIX")?,
        h("0.5*YII + 0.5*IYI + 0.5*IIY")?,
        h("0.5*ZII + 0.5*IZI + 0.5*IIZ")?,
    );
    let casimir = &sx * &sx + &sy * &sy + &sz * &sz;
    let comm = |a: &CMatrix, b: &CMatrix| max_entry(&(a * b - b * a));
    let mut worst: f64 = 0.0;
    for (i, j) in [(1, 2), (2, 3), (1, 3)] {
        let a = matrix_of(&coupling_hamiltonian(
            &Coupling::new(CouplingKind::Xy, i, j, 3).map_err(err)?,
        ));
        let e = matrix_of(&coupling_hamiltonian(
            &Coupling::new(CouplingKind::Exchange, i, j, 3).map_err(err)?,
        ));
        worst = worst
            .max(comm(&a, &mz))
            .max(comm(&e, &mz))
            .max(comm(&e, &casimir));
    }
    for enc in [
        Encoding::xy3().map_err(err)?,
        Encoding::heisenberg3().map_err(err)?,
    ] {
        let z = enc.code.compress(&matrix_of(&enc.z_logical));
        let x = enc.code.compress(&matrix_of(&enc.x_logical));
        let id = CMatrix::identity(2, 2);
        let anti = if fault {
            &z * &x - &x * &z
        } else {
            &z * &x + &x * &z
        };
        worst = worst
            .max(max_entry(&anti))
            .max(max_entry(&(&z * &z - &id)))
            .max(max_entry(&(&x * &x - &id)));
    }
    within(
        "m_z and Casimir conservation; code Z̄, X̄ anticommuting involutions",
        worst,
        1e-12,
    )
}

fn lbl(s: &str) -> ControlLabel {
    ControlLabel::new(s).expect("valid label")
}

fn collapse_at_zero(fault: bool) -> CheckResult {
    let theta = PI / 4.0;
    let h = |s: &str| Hamiltonian::parse(s).map_err(err);
    let (zz, x, y) = (h("0.5*ZZ")?, h("0.5*XI")?, h("0.5*YI")?);
    let (lz, lx, ly) = (lbl("ZZ"), lbl("X"), lbl("Y"));
    let target_theta = if fault { -theta } else { theta };
    let target = evolve(&[(target_theta, 0.0, &zz)]).map_err(err)?;
    let mut compiler = Compiler::new();
    let mut worst: f64 = 0.0;
    let mut zero = |seq: &PulseSequence| {
        let errs = ErrorAssignment::shared(seq.labels(), 0.0);
        compiler.compile(seq, &errs).map_err(err)
    };
    let full = [
        PulseSequence::from_pulses(vec![
            Pulse::single(lz.clone(), theta, Arc::new(zz.clone())).map_err(err)?
        ])
        .map_err(err)?,
        bb1_w(theta, &zz, &x, &lz, &lx).map_err(err)?,
        bb1_j(theta, &zz, &x, &lz, &lx).map_err(err)?,
        bb1_wj(theta, &zz, &x, &y, &lz, &lx, &ly).map_err(err)?,
    ];
    for seq in &full {
        worst = worst.max(distance(&zero(seq)?, &target, true).map_err(err)?);
    }
    let chain = ChainControls::standard(2).map_err(err)?;
    let chain_target = evolve(&[(target_theta, 0.0, &**chain.target().1)]).map_err(err)?;
    let u = zero(&wj_chain(2, theta, &chain).map_err(err)?)?;
    worst = worst.max(distance(&u, &chain_target, true).map_err(err)?);
    let enc = Encoding::xy3().map_err(err)?;
    let code_target = enc.ideal(LogicalAxis::Z, target_theta).map_err(err)?;
    for seq in [
        p3_sequence(theta).map_err(err)?,
        p3_bb1(theta).map_err(err)?,
    ] {
        let inf = subspace_fidelity(&code_target, &zero(&seq)?, &enc.code)
            .map_err(err)?
            .infidelity;
        worst = worst.max(inf.sqrt());
    }
    let heis = Encoding::heisenberg3().map_err(err)?;
    let heis_target = heis.ideal(LogicalAxis::Z, target_theta).map_err(err)?;
    let seq = heisenberg_logical(LogicalAxis::Z, theta, true).map_err(err)?;
    let inf = subspace_fidelity(&heis_target, &zero(&seq)?, &heis.code)
        .map_err(err)?
        .infidelity;
    worst = worst.max(inf.sqrt());
    within("8 builders at ε = 0 reproduce their targets", worst, 1e-12)
}

fn toggling(fault: bool) -> CheckResult {
    let (x, y) = (
        Hamiltonian::parse("0.5*X").map_err(err)?,
        Hamiltonian::parse("0.5*Y").map_err(err)?,
    );
    let mut worst: f64 = 0.0;
    for theta in [PI / 4.0, PI / 2.0, PI] {
        let phi = phi_of(theta).map_err(err)?;
        for eps in [1e-3, 1e-2, 0.1] {
            let a = correction_block(phi, eps, &x, &y, BlockForm::Original).map_err(err)?;
            let toggled_eps = if fault { -eps } else { eps };
            let b = correction_block(phi, toggled_eps, &x, &y, BlockForm::Toggled).map_err(err)?;
            worst = worst.max(fidelity(&a, &b).map_err(err)?.infidelity);
        }
    }
    within(
        "original vs toggled correction block infidelity",
        worst,
        1e-12,
    )
}

fn jones(fault: bool) -> CheckResult {
    let mut rng = Stream(1 << 20);
    let mut worst: f64 = 0.0;
    let triples = [("0.5*ZZ", "0.5*XI", "0.5*YZ"), ("0.5*X", "0.5*Y", "0.5*Z")];
    let zero = ErrorAssignment::uniform([&lbl("A"), &lbl("B")], 0.0);
    let mut compiler = Compiler::new();
    for (s1, s2, s3) in triples {
        let h = |s: &str| Hamiltonian::parse(s).map_err(err);
        let (h1, h2, h3) = (h(s1)?, h(s2)?, h(s3)?);
        if su2_triple(&h1, &h2).map_err(err)?.as_ref() != Some(&h3) {
            return Err(format!("({s1}, {s2}) does not close to {s3}"));
        }
        for _ in 0..100 {
            let theta = rng.range(-2.0 * PI, 2.0 * PI);
            let phi = rng.range(-PI, PI);
            let seq = PulseSequence::from_pulses(vec![
                Pulse::single(lbl("B"), -phi, Arc::new(h2.clone())).map_err(err)?,
                Pulse::single(lbl("A"), theta, Arc::new(h1.clone())).map_err(err)?,
                Pulse::single(lbl("B"), phi, Arc::new(h2.clone())).map_err(err)?,
            ])
            .map_err(err)?;
            let u = compiler.compile(&seq, &zero).map_err(err)?;
            let s = if fault { 1.0 } else { -1.0 };
            let want = evolve(&[
                (theta * phi.cos(), 0.0, &h1),
                (s * theta * phi.sin(), 0.0, &h3),
            ])
            .map_err(err)?;
            worst = worst.max(distance(&u, &want, false).map_err(err)?);
        }
    }
    within(
        "U2(φ)U1(θ)U2(−φ) = exp(−iθ(cos φ H1 − sin φ H3)), 200 draws",
        worst,
        1e-12,
    )
}

fn magnus_order(fault: bool) -> CheckResult {
    let (x, y) = (
        Hamiltonian::parse("0.5*X").map_err(err)?,
        Hamiltonian::parse("0.5*Y").map_err(err)?,
    );
    let theta = PI / 4.0;
    let phi = phi_of(theta).map_err(err)?;
    let m3 = matrix_of(&magnus_m3(phi, &x, &y).map_err(err)?);
    let sign = if fault { -1.0 } else { 1.0 };
    let mut pts = Vec::new();
    for eps in log_grid(1e-3, 1e-1, 9) {
        let block = correction_block(phi, eps, &x, &y, BlockForm::Original).map_err(err)?;
        let rot = evolve(&[(4.0 * PI * phi.cos() * eps, 0.0, &x)]).map_err(err)?;
        let approx = rot.matrix() * (CMatrix::identity(2, 2) + &m3 * c(0.0, sign * eps.powi(3)));
        let diff = block.matrix() - approx;
        let norm = diff.singular_values().iter().fold(0.0f64, |a, &b| a.max(b));
        pts.push((eps, norm));
    }
    let fit = fit_slope(&pts, (1e-3, 1e-1)).map_err(err)?;
    if (fit.exponent - 4.0).abs() <= 0.2 {
        Ok(format!(
            "remainder after the ε³ term has slope {:.3} (want 4 ± 0.2)",
            fit.exponent
        ))
    } else {
        Err(format!("remainder slope {:.3}, want 4 ± 0.2", fit.exponent))
    }
}

fn negative_coupling(fault: bool) -> CheckResult {
    let a = |i, j| -> Result<Hamiltonian, String> {
        Ok(coupling_hamiltonian(
            &Coupling::new(CouplingKind::Xy, i, j, 3).map_err(err)?,
        ))
    };
    let mut worst: f64 = 0.0;
    for ((i, j), (k, l)) in [((1, 2), (2, 3)), ((2, 3), (1, 2)), ((1, 3), (2, 3))] {
        let u: Unitary = evolve(&[(PI, 0.0, &a(i, j)?)]).map_err(err)?;
        let other = matrix_of(&a(k, l)?);
        let conj = u.matrix() * &other * u.matrix().adjoint();
        let want = if fault { other.clone() } else { -other };
        worst = worst.max(max_entry(&(conj - want)));
    }
    within("exp(−iπA_ij)·A_jk·exp(iπA_ij) = −A_jk", worst, 1e-12)
}

fn cache_identity(fault: bool) -> CheckResult {
    let h = |s: &str| Hamiltonian::parse(s).map_err(err);
    let (zz, x, y) = (h("0.5*ZZ")?, h("0.5*XI")?, h("0.5*YI")?);
    let seq = bb1_wj(PI / 4.0, &zz, &x, &y, &lbl("ZZ"), &lbl("X"), &lbl("Y")).map_err(err)?;
    let chain_controls = ChainControls::standard(2).map_err(err)?;
    let chain = wj_chain(2, PI / 4.0, &chain_controls).map_err(err)?;
    let mut rng = Stream(1 << 30);
    let mut cached = Compiler::new();
    let mut compared = 0;
    for _ in 0..20 {
        let (e1, e2) = (rng.range(-0.1, 0.1), rng.range(-0.1, 0.1));
        let mut errs = ErrorAssignment::new();
        errs.set(lbl("ZZ"), e1).map_err(err)?;
        errs.group([lbl("X"), lbl("Y")], e2).map_err(err)?;
        let mut plain = ErrorAssignment::new();
        plain
            .set(lbl("ZZ"), if fault { -e1 } else { e1 })
            .map_err(err)?;
        plain.group([lbl("X"), lbl("Y")], e2).map_err(err)?;
        let a = cached.compile(&seq, &errs).map_err(err)?;
        let b = Compiler::without_cache()
            .compile(&seq, &plain)
            .map_err(err)?;
        if a != b {
            return Err(format!(
                "cached and uncached BB1-WJ differ at ε = ({e1:e}, {e2:e})"
            ));
        }
        let mut chain_errs = ErrorAssignment::new();
        for l in chain_controls.labels() {
            if !matches!(l.as_str(), "X1" | "Y1") {
                chain_errs.set(l, e1).map_err(err)?;
            }
        }
        chain_errs.group([lbl("X1"), lbl("Y1")], e2).map_err(err)?;
        let a = cached.compile(&chain, &chain_errs).map_err(err)?;
        let b = Compiler::without_cache()
            .compile(&chain, &chain_errs)
            .map_err(err)?;
        if a != b {
            return Err(format!(
                "cached and uncached chain differ at ε = ({e1:e}, {e2:e})"
            ));
        }
        compared += 2;
    }
    let stats = cached.stats();
    Ok(format!(
        "{compared} compilations bitwise identical with and without cache ({} hits, {} misses)",
        stats.hits, stats.misses
    ))
}
