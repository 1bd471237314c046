use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use riffle_core::algebra::{GroupAlgebraElement, SignedMeasure};
use riffle_core::cellini::measure_xk;
use riffle_core::coxeter::build_group_from_label;
use riffle_core::descent::measure_m;
use riffle_core::field::{int, rat};
use riffle_core::shuffle::{exact_model_distribution, monte_carlo, DeckEncoding, Model};

#[test]
fn gsr_law_is_m() {
    for n in 2..=5 {
        for a in 1..=4u32 {
            let m = measure_m(&build_group_from_label("A", Some(n - 1)).unwrap(), &int(a as i64)).unwrap();
            let law = exact_model_distribution(Model::Gsr { n, a }, DeckEncoding::CardToPosition).unwrap();
            assert_eq!(law, m, "n={n} a={a}");
            let law = exact_model_distribution(Model::Gsr { n, a }, DeckEncoding::PositionToCard).unwrap();
            assert_eq!(law, m.inverse_pushforward(), "n={n} a={a}");
        }
    }
}

#[test]
fn gsr_closed_form_by_descents() {
    // n = 5, a = 3: C(3 + 4 - d, 5) / 3^5, d the descents of the inverse deck word
    let law = exact_model_distribution(Model::Gsr { n: 5, a: 3 }, DeckEncoding::CardToPosition).unwrap();
    let g = law.group();
    let binom = |top: i64| -> BigRational {
        if top < 5 {
            return rat(0, 1);
        }
        let num: i64 = (0..5).map(|i| top - i).product();
        rat(num, 120)
    };
    for w in g.elements() {
        let d = g.descent_count(w) as i64;
        assert_eq!(*law.value(w), binom(7 - d) / BigRational::from_integer(BigInt::from(243)));
    }
    let four = exact_model_distribution(Model::Gsr { n: 4, a: 2 }, DeckEncoding::PositionToCard).unwrap();
    assert_eq!(*four.value(0), rat(5, 16));
}

#[test]
fn consecutive_gsr_shuffles_compose() {
    for n in 2..=4 {
        for (a, b) in [(2, 2), (2, 3)] {
            let x = exact_model_distribution(Model::Gsr { n, a }, DeckEncoding::CardToPosition).unwrap();
            let y = exact_model_distribution(Model::Gsr { n, a: b }, DeckEncoding::CardToPosition).unwrap();
            let xy = exact_model_distribution(Model::Gsr { n, a: a * b }, DeckEncoding::CardToPosition).unwrap();
            assert_eq!(x.convolve(&y).unwrap(), xy);
        }
    }
}

#[test]
fn type_c_flip_is_the_inverse_of_m() {
    for n in 2..=3 {
        let law = exact_model_distribution(Model::TypeCFlip { n, k: 1 }, DeckEncoding::PositionToCard).unwrap();
        let m = measure_m(law.group(), &int(3)).unwrap();
        assert_eq!(law, m.inverse_pushforward(), "C{n}");
        let scale = BigRational::from_integer(BigInt::from(3).pow(n as u32));
        assert!(law.element().coeffs().iter().all(|p| (p * &scale).is_integer()));
    }
    let law = exact_model_distribution(Model::TypeCFlip { n: 2, k: 2 }, DeckEncoding::PositionToCard).unwrap();
    assert_eq!(law, measure_m(law.group(), &int(5)).unwrap().inverse_pushforward());
}

#[test]
fn x2_procedure_is_the_inverse_of_x2() {
    for n in 3..=4 {
        let law = exact_model_distribution(Model::X2Physical { n }, DeckEncoding::PositionToCard).unwrap();
        let x2 = measure_xk(law.group(), 2).unwrap().to_measure().unwrap();
        assert_eq!(law, x2.inverse_pushforward(), "N={n}");
        let support = law.element().support().len();
        // 2^{N-1} equally likely branches, all distinct outcomes
        assert_eq!(support, 1 << (n - 1));
    }
}

#[test]
fn total_variation_examples() {
    let g = build_group_from_label("A2", None).unwrap();
    let uniform = SignedMeasure::new(GroupAlgebraElement::from_fn(&g, |_| rat(1, 6))).unwrap();
    let point = SignedMeasure::new(GroupAlgebraElement::identity(&g)).unwrap();
    assert_eq!(point.total_variation(&uniform).unwrap(), rat(5, 6));
    assert_eq!(uniform.total_variation(&uniform).unwrap(), rat(0, 1));
    let m = measure_m(&g, &int(2)).unwrap();
    assert_eq!(m.total_variation(&uniform).unwrap(), rat(1, 3));
}

#[test]
fn monte_carlo_gsr_six_cards() {
    let model = Model::Gsr { n: 6, a: 2 };
    let t = Instant::now();
    let emp = monte_carlo(model, DeckEncoding::CardToPosition, 1_000_000, 20240601).unwrap();
    let exact = exact_model_distribution(model, DeckEncoding::CardToPosition).unwrap();
    let tv = emp.total_variation(&exact).unwrap();
    assert!(tv < 0.01, "tv = {tv}");
    let again = monte_carlo(model, DeckEncoding::CardToPosition, 1_000_000, 20240601).unwrap();
    assert_eq!(emp.to_csv(exact.group()), again.to_csv(exact.group()));
    eprintln!("monte carlo: tv {tv:.5} in {:?}", t.elapsed());
}

#[test]
fn monte_carlo_other_models() {
    for model in [Model::TypeCFlip { n: 3, k: 1 }, Model::X2Physical { n: 4 }, Model::Gsr { n: 4, a: 3 }] {
        let emp = monte_carlo(model, DeckEncoding::PositionToCard, 200_000, 11).unwrap();
        let law = exact_model_distribution(model, DeckEncoding::PositionToCard).unwrap();
        let tv = emp.total_variation(&law).unwrap();
        assert!(tv < 0.02, "{model:?}: tv = {tv}");
        // outcomes off the support are never sampled
        for (w, &c) in emp.counts.iter().enumerate() {
            if law.value(w) == &rat(0, 1) {
                assert_eq!(c, 0);
            }
        }
    }
}
