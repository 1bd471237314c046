use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use riffle_core::algebra::GroupAlgebraElement;
use riffle_core::cellini::{
    measure_xk, non_polynomiality_witness, verify_coincide, verify_convolution_xk, weighted_alcove_count,
    AffineData, FROZEN_CONVENTION,
};
use riffle_core::coxeter::{build_group_from_label, CoxeterGroup};
use riffle_core::field::rat;

fn g(label: &str) -> Arc<CoxeterGroup> {
    build_group_from_label(label, None).unwrap()
}

#[test]
fn type_c_coincidence_for_odd_k() {
    for label in ["C2", "C3"] {
        for k in [1, 3, 5] {
            assert!(verify_coincide(&g(label), k).unwrap(), "{label} k={k}");
        }
    }
}

#[test]
fn coefficients_sum_to_one() {
    for label in ["A2", "A3", "B3", "C3"] {
        for k in 1..=5 {
            let m = measure_xk(&g(label), k).unwrap();
            assert!(m.to_measure().is_ok(), "{label} k={k}");
            assert!(m.to_measure().unwrap().is_nonnegative());
        }
    }
}

#[test]
fn alcove_count_identity() {
    for label in ["A1", "A2", "A3", "A4", "B2", "B3", "C2", "C3", "C4", "D4", "G2"] {
        let w = g(label);
        for k in 1..=5u32 {
            let total = weighted_alcove_count(&w, k, FROZEN_CONVENTION).unwrap();
            assert_eq!(total, BigInt::from(k).pow(w.rank() as u32), "{label} k={k}");
        }
    }
}

#[test]
fn values_are_counts_over_k_to_the_rank_and_depend_on_cdes_only() {
    for label in ["A3", "B3", "G2"] {
        let w = g(label);
        for k in [2, 4] {
            let m = measure_xk(&w, k).unwrap();
            let scale = BigRational::from_integer(BigInt::from(k).pow(w.rank() as u32));
            let mut by_class: HashMap<u32, BigRational> = HashMap::new();
            for e in w.elements() {
                assert!((m.value(e) * &scale).is_integer());
                let prev = by_class.entry(m.cdes[e]).or_insert_with(|| m.value(e).clone());
                assert_eq!(prev, m.value(e));
            }
        }
    }
}

#[test]
fn convolution_law() {
    assert!(verify_convolution_xk(&g("C2"), 3, 3).unwrap());
    assert!(verify_convolution_xk(&g("A2"), 2, 2).unwrap());
    assert!(verify_convolution_xk(&g("A3"), 2, 3).unwrap());
    assert!(verify_convolution_xk(&g("G2"), 2, 4).unwrap());
    for label in ["A2", "B3"] {
        for k in 1..=4 {
            assert!(verify_convolution_xk(&g(label), 1, k).unwrap());
        }
    }
}

#[test]
fn a2_lattice_counts() {
    let d = AffineData::new(&g("A2")).unwrap();
    assert_eq!(d.a_coeff(2, 0b011), 1);
    assert_eq!(d.a_coeff(2, 0b100), 1);
    assert_eq!(d.a_coeff(2, 0b000), 0);
}

#[test]
fn x2_on_s3_is_uniform_on_four_elements() {
    let w = g("A2");
    let m = measure_xk(&w, 2).unwrap();
    let support: Vec<usize> = w.elements().filter(|&e| *m.value(e) != rat(0, 1)).collect();
    assert_eq!(support.len(), 4);
    for e in support {
        assert_eq!(*m.value(e), rat(1, 4));
    }
    // x_1 is the unit
    assert_eq!(measure_xk(&w, 1).unwrap().values, GroupAlgebraElement::identity(&w));
}

#[test]
fn type_a_coefficients_are_not_polynomial_in_k() {
    let w = g("A2");
    let witness = non_polynomiality_witness(&w, &[2, 3, 4, 5]).unwrap().expect("a witness exists");
    assert!(!witness.polynomial);
    assert_eq!(witness.counts.len(), 4);
}
