use std::sync::{Arc, OnceLock};

use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

use riffle_core::arrangement::{face_weights, reflection_faces, IntersectionLattice};
use riffle_core::coxeter::{build_group, CoxeterGroup, CoxeterType};
use riffle_core::descent::{endpoint_values, measure_m};
use riffle_core::shuffle::{monte_carlo, DeckEncoding, Model};
use riffle_core::{format_rational, parse_rational};

const TYPES: [CoxeterType; 6] =
    [CoxeterType::A(2), CoxeterType::A(3), CoxeterType::B(2), CoxeterType::B(3), CoxeterType::G2, CoxeterType::I2(5)];

fn groups() -> &'static Vec<Arc<CoxeterGroup>> {
    static G: OnceLock<Vec<Arc<CoxeterGroup>>> = OnceLock::new();
    G.get_or_init(|| TYPES.iter().map(|&t| build_group(t).unwrap()).collect())
}

fn nonzero_rational() -> impl Strategy<Value = BigRational> {
    (-40i64..=40, 1i64..=12)
        .prop_filter("nonzero", |(p, _)| *p != 0)
        .prop_map(|(p, q)| BigRational::new(p.into(), q.into()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn m_sums_to_one(i in 0..TYPES.len(), x in nonzero_rational()) {
        let g = &groups()[i];
        let m = measure_m(g, &x).unwrap();
        let total = g.elements().fold(BigRational::zero(), |acc, w| acc + m.value(w));
        prop_assert!(total.is_one());
    }

    #[test]
    fn m_convolves_multiplicatively(i in 0..TYPES.len(), x in nonzero_rational(), y in nonzero_rational()) {
        let g = &groups()[i];
        let lhs = measure_m(g, &x).unwrap().convolve(&measure_m(g, &y).unwrap()).unwrap();
        prop_assert_eq!(lhs, measure_m(g, &(&x * &y)).unwrap());
    }

    #[test]
    fn endpoints_match_measure(i in 0..TYPES.len(), x in nonzero_rational()) {
        let g = &groups()[i];
        let m = measure_m(g, &x).unwrap();
        let (at_identity, at_longest) = endpoint_values(g, &x).unwrap();
        prop_assert_eq!(m.value(g.identity()), &at_identity);
        prop_assert_eq!(m.value(g.longest_element()), &at_longest);
    }

    #[test]
    fn face_weights_total_one(i in 0..TYPES.len(), x in nonzero_rational()) {
        let g = &groups()[i];
        let l = IntersectionLattice::reflection(g);
        let f = reflection_faces(g, &l);
        prop_assert!(face_weights(&l, &f, &x).unwrap().total(&f).is_one());
    }

    #[test]
    fn total_variation_is_a_metric_value(i in 0..TYPES.len(), x in nonzero_rational(), y in nonzero_rational()) {
        let g = &groups()[i];
        let a = measure_m(g, &x).unwrap();
        let b = measure_m(g, &y).unwrap();
        let ab = a.total_variation(&b).unwrap();
        prop_assert_eq!(&ab, &b.total_variation(&a).unwrap());
        prop_assert!(ab >= BigRational::zero());
        prop_assert!(a.total_variation(&a).unwrap().is_zero());
    }

    #[test]
    fn rationals_round_trip(p in -10_000i64..10_000, q in 1i64..10_000) {
        let r = BigRational::new(p.into(), q.into());
        prop_assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
    }

    #[test]
    fn monte_carlo_is_seeded(seed in any::<u64>(), n in 2usize..=5, a in 1u32..=4) {
        let model = Model::Gsr { n, a };
        let one = monte_carlo(model, DeckEncoding::PositionToCard, 500, seed).unwrap();
        let two = monte_carlo(model, DeckEncoding::PositionToCard, 500, seed).unwrap();
        prop_assert_eq!(&one.counts, &two.counts);
        prop_assert_eq!(one.counts.iter().sum::<u64>(), 500);
    }
}
