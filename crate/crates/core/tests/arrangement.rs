use std::sync::Arc;

use num_rational::BigRational;
use num_traits::Zero;
use riffle_core::algebra::SpectrumCheck;
use riffle_core::arrangement::{
    bhr_spectrum, bhr_transition_matrix, face_weights, generic_faces, good_prime_positivity, measure_h,
    measure_h_definition2, reflection_faces, reflection_fibers, sample_generic_arrangements, verify_bhr_spectrum,
    verify_identities, verify_lemmas, IntersectionLattice, DEFAULT_GENERIC_HYPERPLANE_CAP,
};
use riffle_core::coxeter::{build_group, build_group_from_label, CoxeterGroup, CoxeterType};
use riffle_core::descent::{fixed_space_profile, measure_m_symbolic};
use riffle_core::field::{int, rat};
use riffle_core::poly::Poly;

fn setup(label: &str) -> (Arc<CoxeterGroup>, IntersectionLattice) {
    let g = build_group_from_label(label, None).unwrap();
    let l = IntersectionLattice::reflection(&g);
    (g, l)
}

#[test]
fn lemmas_on_small_reflection_arrangements() {
    for ty in CoxeterType::all_supported().into_iter().filter(|t| t.rank() <= 4) {
        let g = build_group(ty).unwrap();
        let l = IntersectionLattice::reflection(&g);
        let fibers = reflection_fibers(&g, &l);
        let rep = verify_lemmas(&l, &fibers, &g.label());
        assert!(rep.all_passed(), "{:?}", rep.checks.iter().find(|c| !c.passed));
    }
}

#[test]
fn coset_fibers_match_enumerated_faces() {
    for label in ["A3", "B3", "G2", "H3", "D4"] {
        let (g, l) = setup(label);
        assert_eq!(reflection_fibers(&g, &l), reflection_faces(&g, &l).fibers());
    }
}

#[test]
fn lemmas_on_generic_arrangements() {
    let samples = sample_generic_arrangements();
    assert!(samples.iter().any(|(_, a)| !a.is_central()));
    for (name, a) in samples {
        let l = IntersectionLattice::new(&a).unwrap();
        let f = generic_faces(&a, &l, DEFAULT_GENERIC_HYPERPLANE_CAP).unwrap();
        let rep = verify_lemmas(&l, f.fibers(), name);
        assert!(rep.all_passed(), "{name}: {:?}", rep.checks.iter().find(|c| !c.passed));
        let w = face_weights(&l, &f, &int(3)).unwrap();
        assert_eq!(w.total(&f), int(1), "{name}");
    }
}

#[test]
fn group_identities_for_every_supported_type() {
    for ty in CoxeterType::all_supported() {
        let g = build_group(ty).unwrap();
        let l = IntersectionLattice::reflection(&g);
        let rep = verify_identities(&g, &l);
        assert!(rep.all_passed(), "{ty}: {:?}", rep.checks.iter().find(|c| !c.passed));
    }
}

#[test]
fn both_constructions_of_h_agree_everywhere() {
    for ty in CoxeterType::all_supported() {
        let g = build_group(ty).unwrap();
        let l = IntersectionLattice::reflection(&g);
        let h = measure_h(&g, &l).unwrap();
        assert_eq!(h.total_numerator(), Poly::monomial(g.rank()), "{ty}");
        for x in [2, 3, 5] {
            let m = h.eval(&int(x)).unwrap();
            assert_eq!(m.element().total(), int(1));
        }
    }
}

#[test]
fn h_equals_m_where_claimed() {
    let mut labels: Vec<String> = ["A1", "A2", "A3", "A4", "A5", "B2", "B3", "B4", "C2", "C3", "C4", "G2", "H3"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    labels.extend((2..=12).map(|m| format!("I2({m})")));
    for label in labels {
        let (g, l) = setup(&label);
        let h = measure_h_definition2(&g, &l);
        let m = measure_m_symbolic(&g).unwrap();
        assert_eq!(h, m, "{label}");
    }
}

/// `C((x-1)/2 + n - d, n)` as a polynomial in `x`.
fn b_closed_form(n: usize, d: usize) -> Poly {
    let mut p = Poly::one();
    for j in 0..n {
        // (x - 1)/2 + n - d - j
        let c = rat(-1, 2) + int(n as i64 - d as i64 - j as i64);
        p = &p * &Poly::new(vec![c, rat(1, 2)]);
    }
    let fact: i64 = (1..=n as i64).product();
    p.scale(&rat(1, fact))
}

#[test]
fn type_b_closed_form() {
    for n in 2..=4 {
        let (g, l) = setup(&format!("B{n}"));
        let h = measure_h_definition2(&g, &l);
        for w in g.elements() {
            assert_eq!(*h.numerator_at(w), b_closed_form(n, g.descent_count(w) as usize), "B{n}");
        }
    }
}

#[test]
fn transition_rows_are_translates_of_h() {
    for label in ["A3", "B3", "G2", "H3"] {
        let (g, l) = setup(label);
        let f = reflection_faces(&g, &l);
        let x = int(3);
        let w = face_weights(&l, &f, &x).unwrap();
        let t = bhr_transition_matrix(&f, &w).unwrap();
        let h = measure_h(&g, &l).unwrap().eval(&x).unwrap();
        for c in g.elements() {
            assert_eq!(t.row_sum(c), int(1));
            for d in g.elements() {
                let u = g.mul(g.inverse(c), d);
                assert_eq!(t.entry(c, d), *h.value(u), "{label}");
            }
        }
    }
}

#[test]
fn transition_spectrum_matches_lattice() {
    for label in ["A3", "B3", "G2", "H3"] {
        let (g, l) = setup(label);
        let f = reflection_faces(&g, &l);
        let x = int(2);
        let t = bhr_transition_matrix(&f, &face_weights(&l, &f, &x).unwrap()).unwrap();
        let s = bhr_spectrum(&l, &x).unwrap();
        assert_eq!(l.mobius_profile(), fixed_space_profile(&g), "{label}");
        assert_eq!(verify_bhr_spectrum(&t, &s, 400).unwrap(), SpectrumCheck::CharacteristicPolynomial);
    }
    for label in ["B4", "F4"] {
        let (g, l) = setup(label);
        let f = reflection_faces(&g, &l);
        let x = int(2);
        let t = bhr_transition_matrix(&f, &face_weights(&l, &f, &x).unwrap()).unwrap();
        let s = bhr_spectrum(&l, &x).unwrap();
        assert_eq!(t.trace(), s.trace());
        assert!(matches!(verify_bhr_spectrum(&t, &s, 0).unwrap(), SpectrumCheck::TraceAndAnnihilation { .. }));
    }
}

#[test]
fn generic_walk_spectrum() {
    for (name, a) in sample_generic_arrangements() {
        let l = IntersectionLattice::new(&a).unwrap();
        let f = generic_faces(&a, &l, DEFAULT_GENERIC_HYPERPLANE_CAP).unwrap();
        let x = int(2);
        let t = bhr_transition_matrix(&f, &face_weights(&l, &f, &x).unwrap()).unwrap();
        let s = bhr_spectrum(&l, &x).unwrap();
        assert_eq!(s.total_multiplicity(), f.num_chambers(), "{name}");
        verify_bhr_spectrum(&t, &s, 400).unwrap();
    }
}

#[test]
fn good_prime_positivity_cases() {
    for (label, primes) in [("G2", [5, 7]), ("B3", [3, 5]), ("F4", [5, 7])] {
        let (g, l) = setup(label);
        for p in primes {
            let r = good_prime_positivity(&g, &l, p).unwrap();
            assert!(r.good && !r.negative_face_weights && !r.negative_h_values, "{label} p={p}");
        }
    }
    let (g, l) = setup("G2");
    let r = good_prime_positivity(&g, &l, 3).unwrap();
    assert!(!r.good && r.negative_face_weights);
    let neg: BigRational = riffle_core::parse_rational(&r.min_face_weight).unwrap();
    assert!(neg < BigRational::zero());
}

fn splits_over_integers(p: &Poly) -> bool {
    let lead = p.coeffs().last().cloned().expect("nonzero polynomial");
    p.scale(&(BigRational::from_integer(1.into()) / lead)).integer_roots(-64..=64).is_some()
}

#[test]
fn face_weights_factor_but_h4_measure_does_not() {
    for ty in CoxeterType::all_supported().into_iter().filter(|t| t.rank() <= 4 && t.is_crystallographic()) {
        let g = build_group(ty).unwrap();
        let l = IntersectionLattice::reflection(&g);
        for y in 0..l.len() {
            assert!(l.char_poly_integer_roots(y).is_some(), "{ty} flat {y}");
        }
    }
    for label in ["A4", "B3", "I2(7)", "H3"] {
        let (g, l) = setup(label);
        let h = measure_h_definition2(&g, &l);
        assert!(h.numerators().iter().all(|p| p.is_zero() || splits_over_integers(p)), "{label}");
    }
    let (g, l) = setup("H4");
    let h = measure_h_definition2(&g, &l);
    assert!(h.numerators().iter().any(|p| !p.is_zero() && !splits_over_integers(p)));
}
