use std::collections::HashSet;

use multipulse::pauli::{
    commutator_class, eta, su2_triple, CommutatorClass, Hamiltonian, Pauli, PauliString, Phase,
    PhasedPauli,
};
use multipulse::unitary::{matrix_of, string_matrix, CMatrix};
use num_complex::Complex64;
use proptest::prelude::*;

fn word(letters: &[u8]) -> PauliString {
    PauliString::new(
        letters
            .iter()
            .map(|&i| Pauli::from_index(i).unwrap())
            .collect(),
    )
    .unwrap()
}

fn phased_matrix(p: &PhasedPauli) -> CMatrix {
    string_matrix(&p.string) * p.phase.to_complex()
}

fn max_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().fold(0.0, |m: f64, z| m.max(z.norm()))
}

fn pair(max_n: usize) -> impl Strategy<Value = (Vec<u8>, Vec<u8>)> {
    (1..=max_n).prop_flat_map(|n| {
        (
            prop::collection::vec(0u8..4, n),
            prop::collection::vec(0u8..4, n),
        )
    })
}

fn triple(max_n: usize) -> impl Strategy<Value = (Vec<u8>, Vec<u8>, Vec<u8>)> {
    (1..=max_n).prop_flat_map(|n| {
        (
            prop::collection::vec(0u8..4, n),
            prop::collection::vec(0u8..4, n),
            prop::collection::vec(0u8..4, n),
        )
    })
}

fn phase() -> impl Strategy<Value = Phase> {
    (0u8..4).prop_map(Phase::from_exponent)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn product_matches_dense((a, b) in pair(4)) {
        let (a, b) = (word(&a), word(&b));
        let prod = a.mul(&b).unwrap();
        let dense = string_matrix(&a) * string_matrix(&b);
        // entries are 0 or unit phases, so the match is exact
        prop_assert_eq!(phased_matrix(&prod), dense);
    }

    #[test]
    fn multiplication_is_associative((a, b, c) in triple(4), pa in phase(), pb in phase(), pc in phase()) {
        let a = PhasedPauli::new(pa, word(&a));
        let b = PhasedPauli::new(pb, word(&b));
        let c = PhasedPauli::new(pc, word(&c));
        let left = a.multiply(&b).unwrap().multiply(&c).unwrap();
        let right = a.multiply(&b.multiply(&c).unwrap()).unwrap();
        prop_assert_eq!(&left, &right);
        let dense = phased_matrix(&a) * phased_matrix(&b) * phased_matrix(&c);
        prop_assert!(max_diff(&phased_matrix(&left), &dense) <= 1e-14);
    }

    #[test]
    fn string_equality_is_letterwise((a, b) in pair(3)) {
        prop_assert_eq!(word(&a) == word(&b), a == b);
    }

    #[test]
    fn hamiltonian_terms_are_canonical(
        terms in prop::collection::vec((-2.0f64..2.0, prop::collection::vec(0u8..4, 2)), 1..12)
    ) {
        let h = Hamiltonian::from_terms(2, terms.iter().map(|(c, w)| (*c, word(w)))).unwrap();
        let strings: Vec<_> = h.terms().map(|(s, _)| s.clone()).collect();
        let unique: HashSet<_> = strings.iter().cloned().collect();
        prop_assert_eq!(unique.len(), strings.len());
        // merging preserves the dense operator
        let mut dense = CMatrix::zeros(4, 4);
        for (c, w) in &terms {
            dense += string_matrix(&word(w)) * Complex64::new(*c, 0.0);
        }
        let m = matrix_of(&h);
        prop_assert!(max_diff(&m, &dense) <= 1e-14);
        prop_assert!(max_diff(&m, &m.adjoint()) == 0.0);
    }
}

#[test]
fn commutator_classes_match_dense_commutators() {
    for n in 1..=3 {
        let gens: Vec<Hamiltonian> = (1..4u64.pow(n as u32))
            .map(|j| eta(j, n).unwrap())
            .collect();
        let dense: Vec<CMatrix> = gens.iter().map(matrix_of).collect();
        for (i, hi) in gens.iter().enumerate() {
            for (j, hj) in gens.iter().enumerate() {
                let (si, _) = hi.terms().next().unwrap();
                let (sj, _) = hj.terms().next().unwrap();
                let comm = &dense[i] * &dense[j] - &dense[j] * &dense[i];
                match commutator_class(si, sj).unwrap() {
                    CommutatorClass::Commute => assert_eq!(comm.norm(), 0.0, "{si} {sj}"),
                    CommutatorClass::Su2Partner(p) => {
                        let sign = p.imaginary_sign();
                        assert!(sign != 0, "{si} {sj}: phase {}", p.phase);
                        // [η_i, η_j] = ±i η_k with η_k = ½·string
                        let eta_k = string_matrix(&p.string) * Complex64::new(0.5, 0.0);
                        let want = eta_k * Complex64::new(0.0, sign as f64);
                        assert_eq!(comm, want, "{si} {sj}");
                    }
                }
            }
        }
    }
}

#[test]
fn eta_enumerates_distinct_traceless_words() {
    for n in 1..=3 {
        let count = 4u64.pow(n as u32);
        let mut seen = HashSet::new();
        for j in 0..count {
            let h = eta(j, n).unwrap();
            let (s, c) = h.terms().next().unwrap();
            assert_eq!(c, 0.5);
            assert!(seen.insert(s.clone()));
            let tr = matrix_of(&h).trace();
            if j == 0 {
                assert_eq!(tr, Complex64::new((1 << n) as f64 / 2.0, 0.0));
            } else {
                assert_eq!(tr, Complex64::new(0.0, 0.0), "eta({j}, {n})");
            }
        }
        assert_eq!(seen.len() as u64, count);
    }
}

#[test]
fn su2_triple_cycles_back() {
    let x = Hamiltonian::parse("0.5*XI").unwrap();
    let y = Hamiltonian::parse("0.5*YI").unwrap();
    let z = su2_triple(&x, &y).unwrap().unwrap();
    let again = su2_triple(&y, &z).unwrap().unwrap();
    let k = again.proportionality(&x, 1e-12).unwrap();
    assert!(k > 0.0);
}

#[test]
fn exchange_couplings_do_not_close() {
    let g12 = Hamiltonian::parse("1*XXI + 1*YYI + 1*ZZI").unwrap();
    let g23 = Hamiltonian::parse("1*IXX + 1*IYY + 1*IZZ").unwrap();
    assert_eq!(su2_triple(&g12, &g23).unwrap(), None);
}
