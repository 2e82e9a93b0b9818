use std::f64::consts::PI;

use multipulse::analysis::rng::{draw, sign};
use multipulse::analysis::{
    fit_slope, grid_1d, grid_2d, locate_crossover, log_grid, magnus_m3, magnus_residual_with,
    random_sign_assignment, sweep, Axis, BlockForm, ErrorModel, Experiment, CSV_HEADER,
    INFIDELITY_FLOOR,
};
use multipulse::pauli::{su2_triple, Hamiltonian};
use multipulse::sequence::{bb1_w, bb1_wj, phi_of, wj_chain, ChainControls, ControlLabel};
use multipulse::unitary::{evolve, matrix_of};
use proptest::prelude::*;

fn l(s: &str) -> ControlLabel {
    ControlLabel::new(s).unwrap()
}

fn h(s: &str) -> Hamiltonian {
    Hamiltonian::parse(s).unwrap()
}

fn wj() -> Experiment {
    let theta = PI / 4.0;
    let (zz, x, y) = (h("0.5*ZZ"), h("0.5*XI"), h("0.5*YI"));
    Experiment::new(
        "bb1_wj",
        bb1_wj(theta, &zz, &x, &y, &l("ZZ"), &l("X"), &l("Y")).unwrap(),
        evolve(&[(theta, 0.0, &zz)]).unwrap(),
        ErrorModel::Groups(vec![
            (vec![l("ZZ")], Axis::Eps1),
            (vec![l("X"), l("Y")], Axis::Eps2),
        ]),
    )
}

fn chain(seed: u64) -> Experiment {
    let theta = PI / 4.0;
    let controls = ChainControls::standard(2).unwrap();
    let (_, hx) = controls.target();
    Experiment::new(
        "chain",
        wj_chain(2, theta, &controls).unwrap(),
        evolve(&[(theta, 0.0, &**hx)]).unwrap(),
        ErrorModel::RandomSign {
            seed,
            labels: controls.labels(),
            correlated: Some(controls.correlated_pair()),
        },
    )
}

#[test]
fn sweeps_are_byte_reproducible() {
    let grid = grid_2d(&log_grid(1e-4, 1e-1, 6), &[1e-3, 1e-2]);
    let a = sweep(&wj(), &grid).unwrap().to_csv();
    let b = sweep(&wj(), &grid).unwrap().to_csv();
    assert_eq!(a, b);

    let g1 = grid_1d(&log_grid(1e-4, 1e-1, 7));
    let a = sweep(&chain(9), &g1).unwrap().to_csv();
    let b = sweep(&chain(9), &g1).unwrap().to_csv();
    assert_eq!(a, b);
    assert_ne!(a, sweep(&chain(10), &g1).unwrap().to_csv());
}

#[test]
fn csv_layout() {
    let grid = grid_2d(&[1e-3, 1e-2], &[1e-3]);
    let text = sweep(&wj(), &grid).unwrap().to_csv();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(CSV_HEADER));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row.len(), 6);
    // 17 significant digits round-trip exactly
    assert_eq!(row[0], "1.0000000000000000e-3");
    assert_eq!(row[0].parse::<f64>().unwrap(), 1e-3);
    assert_eq!(row[3], "bb1_wj");
    assert_eq!(&row[4..], ["", ""]);

    let seeded = sweep(&chain(3), &grid_1d(&[1e-3])).unwrap().to_csv();
    let row: Vec<&str> = seeded.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[1], "");
    assert_eq!(row[4], "3");
    assert!(
        row[5]
            .split(';')
            .all(|t| t.ends_with('+') || t.ends_with('-')),
        "{}",
        row[5]
    );
}

#[test]
fn rows_follow_grid_order_and_stay_in_range() {
    let grid = grid_1d(&log_grid(1e-5, 3e-1, 15));
    let rows = sweep(&chain(1), &grid).unwrap().rows;
    assert!(rows.windows(2).all(|w| w[0].eps1 < w[1].eps1));
    assert!(rows.iter().all(|r| (0.0..=1.0).contains(&r.infidelity)));
}

#[test]
fn descending_grid_is_rejected() {
    assert!(sweep(&wj(), &grid_1d(&[1e-2, 1e-3])).is_err());
}

#[test]
fn bb1_w_has_no_crossover() {
    let (x, y) = (h("0.5*X"), h("0.5*Y"));
    let exp = Experiment::new(
        "bb1_w",
        bb1_w(PI / 4.0, &x, &y, &l("X"), &l("Y")).unwrap(),
        evolve(&[(PI / 4.0, 0.0, &x)]).unwrap(),
        ErrorModel::shared(&[l("X"), l("Y")]),
    );
    assert_eq!(locate_crossover(&exp, 1e-2, (1e-6, 1e-2)).unwrap(), None);
}

#[test]
fn crossover_separates_the_two_regimes() {
    let exp = wj();
    let eps2 = 1e-2;
    let star = locate_crossover(&exp, eps2, (1e-8, 0.3)).unwrap().unwrap();
    let mut compiler = multipulse::sequence::Compiler::new();
    let slope = |c: &mut multipulse::sequence::Compiler, e: f64| {
        multipulse::analysis::local_slope(&exp, c, e, eps2)
            .unwrap()
            .unwrap()
    };
    assert!(slope(&mut compiler, star / 4.0) < 4.0);
    assert!(slope(&mut compiler, star * 4.0) > 4.0);
}

#[test]
fn magnus_m3_is_hermitian_in_the_plane_of_its_inputs() {
    for (a, b) in [
        ("0.5*X", "0.5*Y"),
        ("0.5*ZZ", "0.5*XI"),
        ("0.5*XX", "0.5*ZI"),
    ] {
        let (h1, h2) = (h(a), h(b));
        for theta in [0.3, PI / 4.0, 2.0, 3.0 * PI] {
            let m3 = magnus_m3(phi_of(theta).unwrap(), &h1, &h2).unwrap();
            let dense = matrix_of(&m3);
            assert_eq!(dense, dense.adjoint());
            let c1 = m3.coefficient(h1.terms().next().unwrap().0) / 0.5;
            let c2 = m3.coefficient(h2.terms().next().unwrap().0) / 0.5;
            let rest = m3
                .combine(1.0, &h1, -c1)
                .unwrap()
                .combine(1.0, &h2, -c2)
                .unwrap();
            assert!(rest.max_abs_coefficient() <= 1e-12, "{a}, {b}: {rest}");
            // and nothing along the third generator
            let h3 = su2_triple(&h1, &h2).unwrap().unwrap();
            assert_eq!(m3.coefficient(h3.terms().next().unwrap().0), 0.0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn fit_recovers_exact_power_laws(exponent in 0.5f64..8.0, log_pref in -5.0f64..5.0) {
        let pref = 10f64.powf(log_pref);
        let points: Vec<(f64, f64)> = log_grid(1e-3, 1e-1, 9)
            .into_iter()
            .map(|e| (e, pref * e.powf(exponent)))
            .filter(|p| p.1 > INFIDELITY_FLOOR)
            .collect();
        prop_assume!(points.len() >= 4);
        let lo = points[0].0;
        let fit = fit_slope(&points, (lo, 1e-1)).unwrap();
        prop_assert!((fit.exponent - exponent).abs() <= 1e-6);
    }

    #[test]
    fn toggled_magnus_residual_matches_original(eps in 1e-3f64..0.3, theta in 0.1f64..12.0) {
        let phi = phi_of(theta).unwrap();
        let (x, y) = (h("0.5*X"), h("0.5*Y"));
        let a = magnus_residual_with(phi, eps, &x, &y, BlockForm::Original).unwrap();
        let b = magnus_residual_with(phi, eps, &x, &y, BlockForm::Toggled).unwrap();
        prop_assert!((a - b).abs() <= 1e-12);
    }

    #[test]
    fn random_signs_share_magnitude_and_correlated_sign(seed in any::<u64>(), eps in 0.0f64..0.1) {
        let names = ["Xa", "Ya", "Xb", "Yb", "ZZ"];
        let labels: Vec<ControlLabel> = names.iter().map(|n| l(n)).collect();
        let pair = (l("Xa"), l("Ya"));
        let errs = random_sign_assignment(seed, &labels, eps, Some((&pair.0, &pair.1))).unwrap();
        for label in &labels {
            prop_assert_eq!(errs.resolve(label).unwrap().abs(), eps);
        }
        prop_assert_eq!(errs.resolve(&pair.0), errs.resolve(&pair.1));
        prop_assert!(errs.same_group(&pair.0, &pair.1));

        // input order does not matter: labels are drawn in sorted order
        let mut reversed = labels.clone();
        reversed.reverse();
        let again = random_sign_assignment(seed, &reversed, eps, Some((&pair.0, &pair.1))).unwrap();
        for label in &labels {
            prop_assert_eq!(errs.resolve(label), again.resolve(label));
        }
    }

    #[test]
    fn sign_is_the_top_bit_of_the_draw(seed in any::<u64>(), k in 0u64..1000) {
        prop_assert_eq!(sign(seed, k) < 0.0, draw(seed, k) >> 63 == 1);
    }
}
