use std::time::Instant;

use riffle_core::coxeter::{build_group, CoxeterType};

fn all_types() -> Vec<CoxeterType> {
    CoxeterType::all_supported()
}

#[test]
fn every_supported_type_builds_with_classical_order() {
    for ty in all_types() {
        let t = Instant::now();
        let w = build_group(ty).unwrap();
        assert_eq!(w.order(), ty.order(), "{ty}");
        // number of reflections is the sum of exponents
        let n: u32 = ty.exponents().iter().sum();
        assert_eq!(w.num_positive_roots() as u32, n, "{ty}");
        assert_eq!(w.length(w.longest_element()), n, "{ty}");
        eprintln!("{ty}: {:?}", t.elapsed());
    }
}

#[test]
fn length_generating_function_factors_by_exponents() {
    // Σ q^{ℓ(w)} = ∏ (1 + q + ... + q^{m_i})
    for ty in [CoxeterType::A(4), CoxeterType::B(4), CoxeterType::D(4), CoxeterType::F4, CoxeterType::H3, CoxeterType::I2(7)] {
        let w = build_group(ty).unwrap();
        let top = w.length(w.longest_element()) as usize;
        let mut counts = vec![0u64; top + 1];
        for x in w.elements() {
            counts[w.length(x) as usize] += 1;
        }
        let mut expect = vec![1u64];
        for m in ty.exponents() {
            let mut next = vec![0u64; expect.len() + m as usize];
            for (i, c) in expect.iter().enumerate() {
                for j in 0..=m as usize {
                    next[i + j] += c;
                }
            }
            expect = next;
        }
        assert_eq!(counts, expect, "{ty}");
    }
}

#[test]
fn fixed_space_dimensions_follow_exponents() {
    // Σ_w x^{dim Fix(w)} = ∏ (x + m_i)
    for ty in [CoxeterType::A(3), CoxeterType::B(3), CoxeterType::G2, CoxeterType::H3, CoxeterType::D(4)] {
        let w = build_group(ty).unwrap();
        let n = w.rank();
        let mut counts = vec![0u64; n + 1];
        for x in w.elements() {
            counts[w.fixed_space_dimension(x)] += 1;
        }
        let mut expect = vec![1u64];
        for m in ty.exponents() {
            let mut next = vec![0u64; expect.len() + 1];
            for (i, c) in expect.iter().enumerate() {
                next[i] += c * m as u64;
                next[i + 1] += c;
            }
            expect = next;
        }
        assert_eq!(counts, expect, "{ty}");
    }
}

#[test]
fn inverse_and_multiplication_are_consistent() {
    let w = build_group(CoxeterType::B(3)).unwrap();
    for a in w.elements() {
        assert_eq!(w.mul(a, w.inverse(a)), w.identity());
        for b in w.elements().step_by(7) {
            let ab = w.mul(a, b);
            for r in 0..w.num_roots() {
                assert_eq!(w.act(ab, r), w.act(a, w.act(b, r)));
            }
        }
    }
}

#[test]
fn bad_primes_are_the_missing_small_primes() {
    // A prime is bad exactly when it lies below the largest exponent without
    // being an exponent itself.
    for ty in all_types().into_iter().filter(|t| t.is_crystallographic()) {
        let g = build_group(ty).unwrap();
        let exps = g.exponents();
        let top = *exps.iter().max().unwrap();
        let expected: Vec<u32> = (2..top).filter(|&p| (2..p).all(|q| p % q != 0) && !exps.contains(&p)).collect();
        assert_eq!(g.root_coefficient_primes().unwrap(), expected, "{ty}");
        assert_eq!(ty.bad_primes().unwrap(), expected, "{ty}");
    }
}
