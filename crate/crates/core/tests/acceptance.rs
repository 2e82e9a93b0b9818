//! Acceptance criteria: one PASS/FAIL line per criterion, with runtime
//! against its budget. Exits nonzero if any criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use multipulse::analysis::{
    crossover_scan, grid_1d, log_grid, magnus_residual, magnus_residual_with, sweep, Axis,
    BlockForm, ErrorModel, Experiment, SweepResult,
};
use multipulse::encoded::{
    coupling_hamiltonian, heisenberg_logical, p3_bb1, p3_sequence, Coupling, CouplingKind,
    Encoding, LogicalAxis, EXCHANGE_LABEL, XY_LABEL,
};
use multipulse::pauli::Hamiltonian;
use multipulse::sequence::{
    bb1_j, bb1_w, bb1_wj, phi_of, wj_chain, ChainControls, Compiler, ControlLabel, ErrorAssignment,
    Pulse, PulseSequence,
};
use multipulse::unitary::{distance, evolve, fidelity, matrix_of, subspace_fidelity, CMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn l(s: &str) -> ControlLabel {
    ControlLabel::new(s).unwrap()
}

fn h(s: &str) -> Hamiltonian {
    Hamiltonian::parse(s).unwrap()
}

fn ok(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn within(name: &str, value: f64, want: f64, tol: f64) -> Outcome {
    if (value - want).abs() <= tol {
        Ok(format!("{name} = {value:.4} (want {want} ± {tol})"))
    } else {
        Err(format!("{name} = {value:.4}, outside {want} ± {tol}"))
    }
}

fn single(label: &str, theta: f64, ham: &Hamiltonian) -> PulseSequence {
    PulseSequence::from_pulses(vec![
        Pulse::single(l(label), theta, ham.clone().into()).unwrap()
    ])
    .unwrap()
}

fn run_sweep(exp: &Experiment, lo: f64, hi: f64, n: usize) -> Result<SweepResult, String> {
    sweep(exp, &grid_1d(&log_grid(lo, hi, n))).map_err(ok)
}

fn slope(exp: &Experiment, lo: f64, hi: f64) -> Result<f64, String> {
    Ok(run_sweep(exp, lo, hi, 9)?
        .fit((lo, hi))
        .map_err(ok)?
        .exponent)
}

fn join(parts: Vec<Outcome>) -> Outcome {
    let mut msgs = Vec::new();
    let mut failed = false;
    for p in parts {
        match p {
            Ok(m) => msgs.push(m),
            Err(m) => {
                failed = true;
                msgs.push(format!("FAILED: {m}"));
            }
        }
    }
    if failed {
        Err(msgs.join("; "))
    } else {
        Ok(msgs.join("; "))
    }
}

fn c1_uncorrected() -> Outcome {
    let x = h("0.5*X");
    let target = evolve(&[(PI / 4.0, 0.0, &x)]).map_err(ok)?;
    let exp = Experiment::new(
        "uncorrected",
        single("X", PI / 4.0, &x),
        target,
        ErrorModel::shared(&[l("X")]),
    );
    within("slope", slope(&exp, 1e-4, 1e-2)?, 2.0, 0.05)
}

fn c2_bb1_w() -> Outcome {
    let (x, y) = (h("0.5*X"), h("0.5*Y"));
    let target = evolve(&[(PI / 4.0, 0.0, &x)]).map_err(ok)?;
    let seq = bb1_w(PI / 4.0, &x, &y, &l("X"), &l("Y")).map_err(ok)?;
    let exp = Experiment::new("bb1_w", seq, target, ErrorModel::shared(&[l("X"), l("Y")]));
    within("slope", slope(&exp, 1e-4, 1e-2)?, 6.0, 0.1)
}

fn c3_bb1_j() -> Outcome {
    let theta = PI / 4.0;
    let (zz, x) = (h("0.5*ZZ"), h("0.5*XI"));
    let target = evolve(&[(theta, 0.0, &zz)]).map_err(ok)?;
    let seq = bb1_j(theta, &zz, &x, &l("ZZ"), &l("X")).map_err(ok)?;
    let model = |eps2: f64| {
        ErrorModel::Groups(vec![
            (vec![l("ZZ")], Axis::Eps1),
            (vec![l("X")], Axis::Fixed(eps2)),
        ])
    };
    let no_tilt_error = Experiment::new("bb1_j", seq.clone(), target.clone(), model(0.0));
    let tilt_error = Experiment::new("bb1_j", seq, target, model(1e-2));
    let small = run_sweep(&tilt_error, 1e-6, 1e-4, 9)?;
    // first-order residual exp(−i·x·H1) with x = 4π ε1 ε2 φ sin φ
    let phi = phi_of(theta).map_err(ok)?;
    let worst = small
        .rows
        .iter()
        .map(|r| {
            let x = 4.0 * PI * r.eps1 * 1e-2 * phi * phi.sin();
            let model = 1.0 - (x / 2.0).cos();
            (r.infidelity / model - 1.0).abs()
        })
        .fold(0.0, f64::max);
    join(vec![
        within(
            "slope(eps2=0)",
            slope(&no_tilt_error, 1e-4, 1e-2)?,
            6.0,
            0.1,
        ),
        within(
            "slope(eps2=1e-2)",
            small.fit((1e-6, 1e-4)).map_err(ok)?.exponent,
            2.0,
            0.1,
        ),
        if worst <= 0.2 {
            Ok(format!(
                "closed model max rel. deviation {worst:.2e} (≤ 0.2)"
            ))
        } else {
            Err(format!("closed model max rel. deviation {worst:.2e} > 0.2"))
        },
    ])
}

fn wj_experiment() -> Result<Experiment, String> {
    let theta = PI / 4.0;
    let (zz, x, y) = (h("0.5*ZZ"), h("0.5*XI"), h("0.5*YI"));
    let target = evolve(&[(theta, 0.0, &zz)]).map_err(ok)?;
    let seq = bb1_wj(theta, &zz, &x, &y, &l("ZZ"), &l("X"), &l("Y")).map_err(ok)?;
    let model = ErrorModel::Groups(vec![
        (vec![l("ZZ")], Axis::Eps1),
        (vec![l("X"), l("Y")], Axis::Eps2),
    ]);
    Ok(Experiment::new("bb1_wj", seq, target, model))
}

fn c4_bb1_wj() -> Outcome {
    let exp = wj_experiment()?;
    let zz = h("0.5*ZZ");
    let mut compiler = Compiler::new();
    let mut ratios = Vec::new();
    for eps1 in [1e-5, 1e-4, 1e-3] {
        let corrected = exp
            .evaluate(&mut compiler, eps1, Some(1e-2))
            .map_err(ok)?
            .infidelity;
        let bare = fidelity(&exp.target, &evolve(&[(PI / 4.0, eps1, &zz)]).map_err(ok)?)
            .map_err(ok)?
            .infidelity;
        ratios.push(bare / corrected);
    }
    let min_ratio = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let report = crossover_scan(&exp, &[1e-2, 10f64.powf(-2.5), 1e-3], (1e-8, 0.3)).map_err(ok)?;
    let stars: Vec<String> = report
        .eps1_star
        .iter()
        .map(|s| s.map_or("none".into(), |v| format!("{v:.3e}")))
        .collect();
    let power = match (&report.power, report.eps1_star.iter().all(Option::is_some)) {
        (Some(p), true) => within(
            &format!("crossover power (eps1* = {})", stars.join(", ")),
            p.exponent,
            1.5,
            0.15,
        ),
        _ => Err(format!("crossover missing: {}", stars.join(", "))),
    };
    join(vec![
        if min_ratio >= 1e7 {
            Ok(format!("uncorrected/corrected ≥ {min_ratio:.2e} (≥ 1e7)"))
        } else {
            Err(format!("uncorrected/corrected only {min_ratio:.2e}"))
        },
        power,
    ])
}

fn c5_magnus() -> Outcome {
    let (x, y) = (h("0.5*X"), h("0.5*Y"));
    let phi = phi_of(PI / 4.0).map_err(ok)?;
    let grid = log_grid(1e-3, 1e-1, 9);
    let mut pts = Vec::new();
    let mut worst_toggle: f64 = 0.0;
    for &e in &grid {
        pts.push((e, magnus_residual(phi, e, &x, &y).map_err(ok)?));
        let a = multipulse::analysis::correction_block(phi, e, &x, &y, BlockForm::Original)
            .map_err(ok)?;
        let b = multipulse::analysis::correction_block(phi, e, &x, &y, BlockForm::Toggled)
            .map_err(ok)?;
        worst_toggle = worst_toggle.max(fidelity(&a, &b).map_err(ok)?.infidelity);
        let r = magnus_residual_with(phi, e, &x, &y, BlockForm::Toggled).map_err(ok)?;
        worst_toggle = worst_toggle.max((r - pts.last().unwrap().1).abs());
    }
    let fit = multipulse::analysis::fit_slope(&pts, (1e-3, 1e-1)).map_err(ok)?;
    join(vec![
        within("residual slope", fit.exponent, 4.0, 0.2),
        if worst_toggle <= 1e-12 {
            Ok(format!(
                "toggled vs original: max infidelity/residual gap {worst_toggle:.1e}"
            ))
        } else {
            Err(format!("toggled vs original differ by {worst_toggle:.1e}"))
        },
    ])
}

fn c6_jones() -> Outcome {
    let (h1, h2, h3) = (h("0.5*ZZ"), h("0.5*XI"), h("0.5*YZ"));
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut compiler = Compiler::new();
    let zero = ErrorAssignment::uniform([&l("A"), &l("B")], 0.0);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let theta: f64 = rng.random_range(-2.0 * PI..2.0 * PI);
        let phi: f64 = rng.random_range(-PI..PI);
        let seq = PulseSequence::from_pulses(vec![
            Pulse::single(l("B"), -phi, h2.clone().into()).unwrap(),
            Pulse::single(l("A"), theta, h1.clone().into()).unwrap(),
            Pulse::single(l("B"), phi, h2.clone().into()).unwrap(),
        ])
        .map_err(ok)?;
        let u = compiler.compile(&seq, &zero).map_err(ok)?;
        let want = evolve(&[
            (theta * phi.cos(), 0.0, &h1),
            (-theta * phi.sin(), 0.0, &h3),
        ])
        .map_err(ok)?;
        worst = worst.max(distance(&u, &want, false).map_err(ok)?);
    }
    if worst <= 1e-12 {
        Ok(format!("max distance {worst:.1e} over 100 draws"))
    } else {
        Err(format!("max distance {worst:.1e} > 1e-12"))
    }
}

fn c7_xy() -> Outcome {
    let theta = PI / 4.0;
    let enc = Encoding::xy3().map_err(ok)?;
    let target = enc.ideal(LogicalAxis::Z, theta).map_err(ok)?;
    let a = [l(XY_LABEL)];
    let mut compiler = Compiler::new();
    let plain = p3_sequence(theta).map_err(ok)?;
    let at_zero = compiler
        .compile(&plain, &ErrorAssignment::uniform(&a, 0.0))
        .map_err(ok)?;
    let zero_inf = subspace_fidelity(&target, &at_zero, &enc.code)
        .map_err(ok)?
        .infidelity;
    let unc = Experiment::new("p3", plain, target.clone(), ErrorModel::shared(&a))
        .on_subspace(enc.code.clone());
    let cor = Experiment::new(
        "p3_bb1",
        p3_bb1(theta).map_err(ok)?,
        target,
        ErrorModel::shared(&a),
    )
    .on_subspace(enc.code.clone());
    join(vec![
        if zero_inf <= 1e-12 {
            Ok(format!("P3 at eps=0 code infidelity {zero_inf:.1e}"))
        } else {
            Err(format!(
                "P3 at eps=0 code infidelity {zero_inf:.1e} > 1e-12"
            ))
        },
        within("uncorrected code slope", slope(&unc, 1e-3, 1e-1)?, 2.0, 0.1),
        within("corrected code slope", slope(&cor, 1e-3, 1e-1)?, 6.0, 0.2),
    ])
}

fn c8_heisenberg() -> Outcome {
    let theta = PI / 4.0;
    let enc = Encoding::heisenberg3().map_err(ok)?;
    let target = enc.ideal(LogicalAxis::Z, theta).map_err(ok)?;
    let e = [l(EXCHANGE_LABEL)];
    let corrected = heisenberg_logical(LogicalAxis::Z, theta, true).map_err(ok)?;
    let plain = heisenberg_logical(LogicalAxis::Z, theta, false).map_err(ok)?;
    let code = Experiment::new(
        "heis_bb1",
        corrected.clone(),
        target.clone(),
        ErrorModel::shared(&e),
    )
    .on_subspace(enc.code.clone());
    let full_cor = Experiment::new(
        "heis_bb1",
        corrected,
        target.clone(),
        ErrorModel::shared(&e),
    );
    let full_unc = Experiment::new("heis", plain, target, ErrorModel::shared(&e));
    let grid = log_grid(1e-4, 1e-2, 9);
    let a = sweep(&full_cor, &grid_1d(&grid)).map_err(ok)?;
    let b = sweep(&full_unc, &grid_1d(&grid)).map_err(ok)?;
    let worse = a
        .rows
        .iter()
        .zip(&b.rows)
        .find(|(c, u)| c.infidelity > u.infidelity)
        .map(|(c, u)| (c.eps1, c.infidelity, u.infidelity));
    join(vec![
        within("corrected code slope", slope(&code, 1e-4, 1e-2)?, 6.0, 0.2),
        match worse {
            Some((eps, c, u)) => Ok(format!(
                "full space at eps={eps:.1e}: corrected {c:.2e} > uncorrected {u:.2e}"
            )),
            None => Err("corrected full-space infidelity never exceeds uncorrected".into()),
        },
    ])
}

fn c9_chain() -> Outcome {
    let theta = PI / 4.0;
    let grid = log_grid(1e-4, 1e-2, 5);
    let mut parts = Vec::new();
    for (n, want_len) in [(2usize, 172usize), (3, 6220)] {
        let controls = ChainControls::standard(n).map_err(ok)?;
        let seq = wj_chain(n, theta, &controls).map_err(ok)?;
        if seq.len() != want_len {
            parts.push(Err(format!("n={n}: {} pulses, want {want_len}", seq.len())));
            continue;
        }
        let (xn, hxn) = controls.target();
        let hyn = {
            let mut letters = vec!['I'; n];
            letters[n - 1] = 'Y';
            Hamiltonian::term(0.5, letters.iter().collect::<String>().parse().unwrap())
        };
        let target = evolve(&[(theta, 0.0, &**hxn)]).map_err(ok)?;
        let reference = Experiment::new(
            "bb1_w_correlated",
            bb1_w(theta, hxn, &hyn, &l("Xn"), &l("Yn")).map_err(ok)?,
            target.clone(),
            ErrorModel::shared(&[l("Xn"), l("Yn")]),
        );
        let bare = Experiment::new(
            "uncorrected",
            single(xn.as_str(), theta, hxn),
            target.clone(),
            ErrorModel::shared(std::slice::from_ref(xn)),
        );
        let ref_small = sweep(&reference, &grid_1d(&grid[..1])).map_err(ok)?.rows[0].infidelity;
        let bare_rows = sweep(&bare, &grid_1d(&grid)).map_err(ok)?;
        let mut beat = true;
        let mut ratios = Vec::new();
        for seed in 0..5u64 {
            let (a, b) = controls.correlated_pair();
            let exp = Experiment::new(
                format!("chain{n}"),
                seq.clone(),
                target.clone(),
                ErrorModel::RandomSign {
                    seed,
                    labels: controls.labels(),
                    correlated: Some((a, b)),
                },
            );
            let rows = sweep(&exp, &grid_1d(&grid)).map_err(ok)?;
            beat &= rows
                .rows
                .iter()
                .zip(&bare_rows.rows)
                .all(|(c, u)| c.infidelity < u.infidelity);
            ratios.push(rows.rows[0].infidelity / ref_small);
        }
        let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &r| {
            (lo.min(r), hi.max(r))
        });
        parts.push(if beat && lo >= 0.1 && hi <= 10.0 {
            Ok(format!(
                "n={n}: beats uncorrected; ratio to reference at 1e-4 in [{lo:.2}, {hi:.2}]"
            ))
        } else {
            Err(format!(
                "n={n}: beats uncorrected = {beat}; ratio to reference in [{lo:.2}, {hi:.2}]"
            ))
        });
    }
    join(parts)
}

fn c10_negative_coupling() -> Outcome {
    let a12 = coupling_hamiltonian(&Coupling::new(CouplingKind::Xy, 1, 2, 3).map_err(ok)?);
    let a23 = matrix_of(&coupling_hamiltonian(
        &Coupling::new(CouplingKind::Xy, 2, 3, 3).map_err(ok)?,
    ));
    let u = evolve(&[(PI, 0.0, &a12)]).map_err(ok)?;
    let conj: CMatrix = u.matrix() * &a23 * u.matrix().adjoint();
    let dev = (conj + &a23).iter().fold(0.0f64, |m, z| m.max(z.norm()));
    if dev <= 1e-12 {
        Ok(format!("max entry deviation {dev:.1e}"))
    } else {
        Err(format!("max entry deviation {dev:.1e} > 1e-12"))
    }
}

type Criterion = (u32, &'static str, Duration, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        (
            1,
            "uncorrected baseline slope 2",
            Duration::from_secs(1),
            c1_uncorrected,
        ),
        (2, "BB1-W slope 6", Duration::from_secs(1), c2_bb1_w),
        (
            3,
            "BB1-J regimes and closed model",
            Duration::from_secs(5),
            c3_bb1_j,
        ),
        (
            4,
            "BB1-WJ suppression and crossover power",
            Duration::from_secs(30),
            c4_bb1_wj,
        ),
        (
            5,
            "Magnus oracle and toggled form",
            Duration::from_secs(1),
            c5_magnus,
        ),
        (
            6,
            "Jones conjugation identity",
            Duration::from_secs(1),
            c6_jones,
        ),
        (
            7,
            "XY encoded P3 and BB1-corrected P3",
            Duration::from_secs(5),
            c7_xy,
        ),
        (
            8,
            "Heisenberg code vs full space",
            Duration::from_secs(5),
            c8_heisenberg,
        ),
        (
            9,
            "WJ chains n=2,3 with random signs",
            Duration::from_secs(120),
            c9_chain,
        ),
        (
            10,
            "negative-coupling identity",
            Duration::from_secs(1),
            c10_negative_coupling,
        ),
    ];
    let mut failures = 0;
    for (id, name, budget, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let in_budget = elapsed <= budget;
        let (passed, detail) = match outcome {
            Ok(d) => (in_budget, d),
            Err(d) => (false, d),
        };
        if !passed {
            failures += 1;
        }
        println!(
            "{} criterion {id:>2}: {name} | {detail} | {:.3}s (budget {}s{})",
            if passed { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            budget.as_secs(),
            if in_budget { "" } else { ", EXCEEDED" }
        );
    }
    println!("{} of 10 criteria passed", 10 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
