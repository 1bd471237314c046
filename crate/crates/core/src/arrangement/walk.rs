//! Face weights, the measure `H_{W,x}`, the chamber walk and the identities
//! relating them.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::{FaceSet, IntersectionLattice};
use crate::algebra::{check_spectrum_scaled, SignedMeasure, Spectrum, SpectrumCheck, SymbolicMeasure};
use crate::coxeter::{CoxeterGroup, Subset};
use crate::error::{Error, Result};
use crate::field::int;
use crate::linalg::ScaledMatrix;
use crate::poly::Poly;
use crate::format_rational;

use std::sync::Arc;

/// Face weights `v_x(F) = χ(L^{z(F)}, x) / (x^n |z⁻¹(z(F))|)`, stored per
/// lattice node since they depend only on the support.
#[derive(Clone, Debug)]
pub struct FaceWeights {
    pub x: BigRational,
    pub per_node: Vec<BigRational>,
}

impl FaceWeights {
    pub fn weight(&self, faces: &FaceSet, f: usize) -> &BigRational {
        &self.per_node[faces.faces()[f].node]
    }

    pub fn total(&self, faces: &FaceSet) -> BigRational {
        faces
            .fibers()
            .iter()
            .zip(&self.per_node)
            .map(|(&c, w)| w * BigRational::from_integer(c.into()))
            .sum()
    }
}

/// Weight numerators over `x^n`, per node: `χ(L^Y, x) / |z⁻¹(Y)|` with the
/// fiber size counted from the enumerated faces.
pub fn face_weights_symbolic(lattice: &IntersectionLattice, fibers: &[usize]) -> Result<Vec<Poly>> {
    (0..lattice.len())
        .map(|y| {
            if fibers[y] == 0 {
                return Err(Error::Invariant("a lattice flat supports no face".into()));
            }
            Ok(lattice.char_poly(y).scale(&BigRational::new(BigInt::one(), BigInt::from(fibers[y]))))
        })
        .collect()
}

pub fn face_weights(lattice: &IntersectionLattice, faces: &FaceSet, x: &BigRational) -> Result<FaceWeights> {
    if x.is_zero() {
        return Err(Error::Domain("the parameter x must be nonzero".into()));
    }
    let xn = num_traits::pow(x.clone(), lattice.dim());
    let per_node = face_weights_symbolic(lattice, faces.fibers())?
        .into_iter()
        .map(|p| p.eval(x) / &xn)
        .collect();
    Ok(FaceWeights { x: x.clone(), per_node })
}

/// Definition 2: for each descent set `D`, the numerator over `x^n` is
/// `Σ_{K ⊆ Π - D} |W_K| χ(L^{Fix(W_K)}, x) / (|N_W(W_K)| |λ(K)|)`.
pub fn measure_h_definition2(group: &Arc<CoxeterGroup>, lattice: &IntersectionLattice) -> SymbolicMeasure {
    let n = group.rank();
    let full = group.full_subset();
    let classes = group.subset_classes();
    let term: Vec<Poly> = (0..1u32 << n)
        .map(|k| {
            let node = lattice.node_of_mask(group.parabolic_positive_roots(k)).expect("Fix(W_K) is a flat");
            let lam = classes[group.class_of(k)].size;
            let c = BigRational::new(
                BigInt::from(group.parabolic_order(k)),
                BigInt::from(group.normalizer_order(k)) * BigInt::from(lam),
            );
            lattice.char_poly(node).scale(&c)
        })
        .collect();
    let numerators = (0..1u32 << n)
        .map(|d| {
            let free = full & !d;
            let mut acc = Poly::zero();
            let mut k = free;
            loop {
                acc = &acc + &term[k as usize];
                if k == 0 {
                    break;
                }
                k = (k - 1) & free;
            }
            acc
        })
        .collect();
    SymbolicMeasure::new(group.clone(), numerators)
}

/// Support flats of the faces `wW_K`, `K ⊆ Π - Des(w)`, listed per element.
/// Every face of the arrangement occurs exactly once.
fn coset_face_nodes(group: &CoxeterGroup, lattice: &IntersectionLattice) -> Vec<Vec<u32>> {
    let n = group.rank();
    let npos = group.num_positive_roots();
    let roots_of: Vec<Vec<usize>> = (0..1u32 << n)
        .map(|k| {
            let m = group.parabolic_positive_roots(k);
            (0..npos).filter(|&r| m >> r & 1 == 1).collect()
        })
        .collect();
    let full = group.full_subset();
    group
        .elements()
        .into_par_iter()
        .map(|w| {
            let free = full & !group.descent_set(w);
            let mut out = vec![];
            let mut k = free;
            loop {
                let mask = roots_of[k as usize].iter().fold(0u64, |m, &r| m | 1 << group.abs_root(group.act(w, r)));
                out.push(lattice.node_of_mask(mask).expect("w·Fix(W_K) is a flat") as u32);
                if k == 0 {
                    break;
                }
                k = (k - 1) & free;
            }
            out
        })
        .collect()
}

/// Number of coset faces supported on each flat.
pub fn reflection_fibers(group: &CoxeterGroup, lattice: &IntersectionLattice) -> Vec<usize> {
    let mut fibers = vec![0usize; lattice.len()];
    for nodes in coset_face_nodes(group, lattice) {
        for y in nodes {
            fibers[y as usize] += 1;
        }
    }
    fibers
}

/// Definition 3 through the walk: the chance of moving from the identity
/// chamber to `w` is `Σ_{K ⊆ Π - Des(w)} v_x(wW_K)`. Numerators over `x^n`, per element.
pub fn measure_h_definition3(group: &Arc<CoxeterGroup>, lattice: &IntersectionLattice) -> Result<Vec<Poly>> {
    let nodes = coset_face_nodes(group, lattice);
    let mut fibers = vec![0usize; lattice.len()];
    for list in &nodes {
        for &y in list {
            fibers[y as usize] += 1;
        }
    }
    let weights = face_weights_symbolic(lattice, &fibers)?;
    Ok(nodes
        .par_iter()
        .map(|list| list.iter().fold(Poly::zero(), |acc, &y| &acc + &weights[y as usize]))
        .collect())
}

/// `H_{W,x}` computed from group data and, independently, from the face
/// weights of the root arrangement; fails if the two disagree anywhere.
pub fn measure_h(group: &Arc<CoxeterGroup>, lattice: &IntersectionLattice) -> Result<SymbolicMeasure> {
    let def2 = measure_h_definition2(group, lattice);
    let def3 = measure_h_definition3(group, lattice)?;
    for w in group.elements() {
        if def2.numerator_at(w) != &def3[w] {
            return Err(Error::Invariant(format!(
                "{}: the two constructions of H differ at {}",
                group.label(),
                group.word_string(w)
            )));
        }
    }
    Ok(def2)
}

/// Exact chamber-walk transition matrix over a common denominator.
#[derive(Clone, Debug)]
pub struct TransitionMatrix {
    matrix: ScaledMatrix,
}

impl TransitionMatrix {
    pub fn size(&self) -> usize {
        self.matrix.dim()
    }

    pub fn entry(&self, i: usize, j: usize) -> BigRational {
        self.matrix.entry(i, j)
    }

    pub fn row_sum(&self, i: usize) -> BigRational {
        self.matrix.row_sum(i)
    }

    pub fn scaled(&self) -> &ScaledMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> BigRational {
        self.matrix.trace()
    }
}

/// `T[c][c'] = Σ_{F : F∘c = c'} v(F)`.
pub fn bhr_transition_matrix(faces: &FaceSet, weights: &FaceWeights) -> Result<TransitionMatrix> {
    let denom = weights.per_node.iter().fold(BigInt::one(), |acc, w| acc.lcm(w.denom()));
    let nums: Vec<i64> = weights
        .per_node
        .iter()
        .map(|w| {
            (w.numer() * (&denom / w.denom()))
                .to_i64()
                .ok_or_else(|| Error::Resource("face weight numerator exceeds 64 bits".into()))
        })
        .collect::<Result<_>>()?;
    let c = faces.num_chambers();
    let rows: Vec<Vec<i64>> = (0..c)
        .into_par_iter()
        .map(|from| {
            let mut row = vec![0i64; c];
            for (f, face) in faces.faces().iter().enumerate() {
                let v = nums[face.node];
                if v != 0 {
                    row[faces.project(f, from)] += v;
                }
            }
            row
        })
        .collect();
    Ok(TransitionMatrix { matrix: ScaledMatrix::from_parts(c, denom, rows.concat()) })
}

/// Eigenvalues `x^{-i}` with multiplicity `Σ_{dim X = n-i} |μ(V, X)|`.
pub fn bhr_spectrum(lattice: &IntersectionLattice, x: &BigRational) -> Result<Spectrum> {
    if x.is_zero() {
        return Err(Error::Domain("the parameter x must be nonzero".into()));
    }
    Ok(Spectrum::powers_of_inverse(x, &lattice.mobius_profile()))
}

/// Confirms the predicted spectrum on the explicit transition matrix.
pub fn verify_bhr_spectrum(matrix: &TransitionMatrix, predicted: &Spectrum, charpoly_limit: usize) -> Result<SpectrumCheck> {
    check_spectrum_scaled(matrix.scaled(), predicted, charpoly_limit)
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub passed: bool,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct IdentityReport {
    pub subject: String,
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn push(&mut self, name: impl Into<String>, lhs: impl ToString, rhs: impl ToString) {
        let (lhs, rhs) = (lhs.to_string(), rhs.to_string());
        self.checks.push(IdentityCheck { name: name.into(), passed: lhs == rhs, lhs, rhs });
    }

    /// Collapses the individual checks into one line per identity name.
    pub fn summary(&self) -> Vec<(String, bool, usize)> {
        let mut out: Vec<(String, bool, usize)> = vec![];
        for c in &self.checks {
            let base = c.name.split(" @").next().unwrap_or(&c.name).to_string();
            match out.iter_mut().find(|e| e.0 == base) {
                Some(e) => {
                    e.1 &= c.passed;
                    e.2 += 1;
                }
                None => out.push((base, c.passed, 1)),
            }
        }
        out
    }
}

/// Lemmas on the lattice and the face weights that hold for every
/// arrangement: fiber sizes, the up-set sum of `χ`, and total weight one.
/// For reflection lattices the per-flat checks run over one flat per W-orbit.
pub fn verify_lemmas(lattice: &IntersectionLattice, fibers: &[usize], subject: &str) -> IdentityReport {
    let mut rep = IdentityReport { subject: subject.to_string(), checks: vec![] };
    let n = lattice.dim();
    let mut reps: Vec<usize> = vec![];
    let mut seen_classes = std::collections::HashSet::new();
    for (y, nd) in lattice.nodes().iter().enumerate() {
        match nd.class {
            Some(c) if !seen_classes.insert(c) => {}
            _ => reps.push(y),
        }
    }
    for &y in &reps {
        let dim = lattice.nodes()[y].dim;
        rep.push(format!("fiber size @ flat {y} (dim {dim})"), fibers[y], lattice.zero_map_fiber_size(y));
        let sum = lattice
            .strictly_above(y)
            .into_iter()
            .fold(lattice.char_poly(y).clone(), |acc, z| &acc + lattice.char_poly(z));
        rep.push(format!("sum of chi over the up-set @ flat {y}"), sum, Poly::monomial(dim));
    }
    // Σ_F v_x(F) with the closed-form fiber sizes.
    let total = (0..lattice.len()).fold(Poly::zero(), |acc, y| {
        let w = lattice
            .char_poly(y)
            .scale(&BigRational::new(BigInt::from(fibers[y]), BigInt::from(lattice.zero_map_fiber_size(y))));
        &acc + &w
    });
    rep.push("face weights sum to one (numerator over x^n)", total, Poly::monomial(n));
    rep
}

/// Group identities for a reflection arrangement: the normalizer/class
/// formula for `χ(-1)`, the weighted alternating identity equal to `x^n`,
/// and the alternating sum of parabolic indices.
pub fn verify_identities(group: &CoxeterGroup, lattice: &IntersectionLattice) -> IdentityReport {
    let n = group.rank();
    let mut rep = IdentityReport { subject: group.label(), checks: vec![] };
    let order = BigInt::from(group.order());
    let classes = group.subset_classes();
    let mut weighted = Poly::zero();
    let mut alternating = BigInt::zero();
    for k in 0..1u32 << n {
        let node = lattice.node_of_mask(group.parabolic_positive_roots(k)).expect("Fix(W_K) is a flat");
        let dim = lattice.nodes()[node].dim;
        let wk = BigInt::from(group.parabolic_order(k));
        let lhs = BigRational::new(
            BigInt::from(group.normalizer_order(k)) * BigInt::from(classes[group.class_of(k)].size),
            wk.clone(),
        );
        let chi = lattice.char_poly(node);
        let chi_m1 = chi.eval(&int(-1));
        let rhs = if dim.is_multiple_of(2) { chi_m1.clone() } else { -chi_m1.clone() };
        rep.push(format!("normalizer-class formula @ K={}", subset_label(k, n)), format_rational(&lhs), format_rational(&rhs));
        let sign = if (n - k.count_ones() as usize).is_multiple_of(2) { int(1) } else { int(-1) };
        let index = BigRational::from_integer(&order / &wk);
        weighted = &weighted + &chi.scale(&(sign * index / chi_m1));
        let term = &order / &wk;
        if k.count_ones() % 2 == 0 {
            alternating += term;
        } else {
            alternating -= term;
        }
    }
    rep.push("weighted alternating identity", weighted, Poly::monomial(n));
    rep.push("alternating sum of parabolic indices", alternating, 1);
    rep
}

fn subset_label(k: Subset, n: usize) -> String {
    let v: Vec<String> = (0..n).filter(|i| k >> i & 1 == 1).map(|i| (i + 1).to_string()).collect();
    format!("{{{}}}", v.join(","))
}

#[derive(Clone, Debug, Serialize)]
pub struct PrimeReport {
    pub group: String,
    pub prime: u32,
    pub good: bool,
    /// Smallest face weight, as an exact fraction.
    pub min_face_weight: String,
    pub negative_face_weights: bool,
    pub negative_h_values: bool,
    /// For good primes: everything nonnegative. For bad primes: always true
    /// (nothing is asserted), see `negative_face_weights`.
    pub holds: bool,
}

/// Nonnegativity of the face weights and of `H_{W,p}` at a prime `p`.
pub fn good_prime_positivity(group: &Arc<CoxeterGroup>, lattice: &IntersectionLattice, p: u32) -> Result<PrimeReport> {
    let bad = group.coxeter_type().bad_primes().ok_or_else(|| {
        Error::NotApplicable(format!("{} is not crystallographic; good primes are undefined", group.label()))
    })?;
    if p < 2 || (2..p).any(|q| p.is_multiple_of(q)) {
        return Err(Error::Domain(format!("{p} is not prime")));
    }
    let fibers = reflection_fibers(group, lattice);
    let x = int(p as i64);
    let xn = num_traits::pow(x.clone(), group.rank());
    let weights: Vec<BigRational> = face_weights_symbolic(lattice, &fibers)?.iter().map(|q| q.eval(&x) / &xn).collect();
    let min = weights.iter().min().cloned().unwrap_or_else(BigRational::zero);
    let h = measure_h_definition2(group, lattice).eval(&x)?;
    let negative_face_weights = weights.iter().any(|w| w.is_negative());
    let negative_h_values = !h.is_nonnegative();
    let good = !bad.contains(&p);
    Ok(PrimeReport {
        group: group.label(),
        prime: p,
        good,
        min_face_weight: format_rational(&min),
        negative_face_weights,
        negative_h_values,
        holds: !good || (!negative_face_weights && !negative_h_values),
    })
}

/// `H_{W,x}` evaluated at a nonzero rational.
pub fn measure_h_at(group: &Arc<CoxeterGroup>, lattice: &IntersectionLattice, x: &BigRational) -> Result<SignedMeasure> {
    measure_h(group, lattice)?.eval(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::{reflection_faces, Arrangement};
    use crate::coxeter::build_group_from_label;
    use crate::field::rat;

    fn setup(label: &str) -> (Arc<CoxeterGroup>, IntersectionLattice) {
        let g = build_group_from_label(label, None).unwrap();
        let l = IntersectionLattice::reflection(&g);
        (g, l)
    }

    #[test]
    fn a2_face_weights_at_two() {
        let (g, l) = setup("A2");
        let f = reflection_faces(&g, &l);
        let w = face_weights(&l, &f, &int(2)).unwrap();
        for (i, face) in f.faces().iter().enumerate() {
            let expect = match l.nodes()[face.node].dim {
                2 => rat(0, 1),
                1 => rat(1, 8),
                _ => rat(1, 4),
            };
            assert_eq!(*w.weight(&f, i), expect);
        }
        assert_eq!(w.total(&f), int(1));
    }

    #[test]
    fn g2_chamber_weight_vanishes_at_five() {
        let (g, l) = setup("G2");
        let f = reflection_faces(&g, &l);
        let w = face_weights(&l, &f, &int(5)).unwrap();
        assert!(w.per_node[0].is_zero());
    }

    #[test]
    fn b2_h_at_three() {
        let (g, l) = setup("B2");
        let h = measure_h(&g, &l).unwrap().eval(&int(3)).unwrap();
        for w in g.elements() {
            let expect = [rat(1, 3), rat(1, 9), rat(0, 1)][g.descent_count(w) as usize].clone();
            assert_eq!(*h.value(w), expect);
        }
    }

    #[test]
    fn transition_examples() {
        let (g, l) = setup("A2");
        let f = reflection_faces(&g, &l);
        let w = face_weights(&l, &f, &int(2)).unwrap();
        let t = bhr_transition_matrix(&f, &w).unwrap();
        for i in 0..6 {
            assert_eq!(t.row_sum(i), int(1));
            assert_eq!(t.entry(i, i), rat(1, 2));
        }
        // point mass on the central face gives the identity matrix
        let mut point = w.clone();
        for (y, v) in point.per_node.iter_mut().enumerate() {
            *v = if l.nodes()[y].dim == 0 { int(1) } else { int(0) };
        }
        let t = bhr_transition_matrix(&f, &point).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                assert_eq!(t.entry(i, j), if i == j { int(1) } else { int(0) });
            }
        }
    }

    #[test]
    fn bhr_spectrum_examples() {
        let (_, l) = setup("A2");
        let s = bhr_spectrum(&l, &int(2)).unwrap();
        assert_eq!(s.entries, vec![(int(1), 1), (rat(1, 2), 3), (rat(1, 4), 2)]);
        let a = crate::arrangement::sample_generic_arrangements().remove(0).1;
        let l = IntersectionLattice::new(&a).unwrap();
        let s = bhr_spectrum(&l, &int(2)).unwrap();
        assert_eq!(s.entries, vec![(int(1), 1), (rat(1, 2), 2), (rat(1, 4), 1)]);
        let _ = Arrangement::reflection;
    }

    #[test]
    fn identity_examples() {
        let (g, l) = setup("A2");
        let r = verify_identities(&g, &l);
        assert!(r.all_passed(), "{r:?}");
        let alt = r.checks.iter().find(|c| c.name.starts_with("alternating")).unwrap();
        assert_eq!(alt.lhs, "1");
        let k1 = r.checks.iter().find(|c| c.name.ends_with("K={1}")).unwrap();
        assert_eq!((k1.lhs.as_str(), k1.rhs.as_str()), ("2/1", "2/1"));
    }

    #[test]
    fn prime_examples() {
        let (g, l) = setup("G2");
        let r5 = good_prime_positivity(&g, &l, 5).unwrap();
        assert!(r5.good && r5.holds && !r5.negative_face_weights);
        let r3 = good_prime_positivity(&g, &l, 3).unwrap();
        assert!(!r3.good && r3.negative_face_weights);
        assert_eq!(r3.min_face_weight, "-1/27");
        let (h, lh) = setup("H3");
        assert!(matches!(good_prime_positivity(&h, &lh, 7), Err(Error::NotApplicable(_))));
    }
}
