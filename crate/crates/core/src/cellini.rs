//! Cellini's measures `x_k` on Weyl groups, built from lattice-point counts
//! in dilated fundamental alcoves.
//!
//! Cyclic descent sets are bitmasks over `Π ∪ {α_0}`: bit `i < n` is the
//! simple root `α_{i+1}`, bit `n` is the highest root.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{GroupAlgebraElement, MeasureJson, SignedMeasure};
use crate::arrangement::{measure_h_definition2, IntersectionLattice};
use crate::coxeter::{subset_indices, CoxeterGroup, CoxeterType, Subset};
use crate::descent::measure_m;
use crate::error::{Error, Result};
use crate::linalg::QMatrix;
use crate::format_rational;

/// Largest dilation factor accepted.
pub const MAX_K: u32 = 9;

/// How the highest root enters the cyclic descent set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum AlphaZeroSign {
    /// `α_0 ∈ Cdes(w)` when `w(α_0) < 0`.
    Highest,
    /// `α_0 ∈ Cdes(w)` when `w(α_0) > 0`, i.e. the affine wall `-α_0` is sent negative.
    NegHighest,
}

/// Which element's root action is read off.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ActionSide {
    Element,
    Inverse,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Convention {
    pub alpha_zero: AlphaZeroSign,
    pub action: ActionSide,
}

/// The convention under which the type C coincidence holds and the
/// coefficients sum to one; `calibrate` recomputes it from scratch.
pub const FROZEN_CONVENTION: Convention = Convention { alpha_zero: AlphaZeroSign::NegHighest, action: ActionSide::Element };

impl Convention {
    pub fn all() -> [Convention; 4] {
        use ActionSide::*;
        use AlphaZeroSign::*;
        [
            Convention { alpha_zero: Highest, action: Element },
            Convention { alpha_zero: Highest, action: Inverse },
            Convention { alpha_zero: NegHighest, action: Element },
            Convention { alpha_zero: NegHighest, action: Inverse },
        ]
    }
}

/// Highest root and coroot lattice data.
#[derive(Clone, Debug)]
pub struct AffineData {
    group: Arc<CoxeterGroup>,
    highest: usize,
    /// Coefficients of `α_0` over the simple roots.
    highest_coeffs: Vec<u32>,
    /// `A^{-T}`: takes the pairing vector `(⟨α_i, t⟩)_i` to the coordinates of
    /// `t` over the simple coroots.
    pairing_to_coroot: QMatrix,
}

impl AffineData {
    pub fn new(group: &Arc<CoxeterGroup>) -> Result<AffineData> {
        if !group.is_crystallographic() {
            return Err(Error::NotApplicable(format!("{} is not a Weyl group", group.label())));
        }
        let n = group.rank();
        let height = |r: usize| -> BigRational { group.roots()[r].iter().map(|c| c.as_rational().expect("rational root")).sum() };
        let highest = (0..group.num_positive_roots()).max_by_key(|&r| height(r)).expect("nonempty root system");
        let highest_coeffs = group.roots()[highest]
            .iter()
            .map(|c| c.as_rational().and_then(|q| q.to_integer().to_u32()).expect("integral root"))
            .collect();
        let mut at = QMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                at.set(j, i, group.cartan()[i][j].as_rational().expect("integral Cartan matrix").clone());
            }
        }
        let pairing_to_coroot = at.inverse()?;
        Ok(AffineData { group: group.clone(), highest, highest_coeffs, pairing_to_coroot })
    }

    pub fn group(&self) -> &Arc<CoxeterGroup> {
        &self.group
    }

    /// Index of `α_0` in the root list.
    pub fn highest_root(&self) -> usize {
        self.highest
    }

    pub fn highest_root_coefficients(&self) -> &[u32] {
        &self.highest_coeffs
    }

    /// Whether the vector with pairings `p` against the simple roots lies in the coroot lattice.
    pub fn in_coroot_lattice(&self, p: &[i64]) -> bool {
        let n = p.len();
        (0..n).all(|i| {
            let c: BigRational = (0..n).map(|j| self.pairing_to_coroot.get(i, j) * BigInt::from(p[j])).sum();
            c.is_integer()
        })
    }

    pub fn cyclic_descent(&self, w: usize, conv: Convention) -> Subset {
        let g = &self.group;
        let u = match conv.action {
            ActionSide::Element => w,
            ActionSide::Inverse => g.inverse(w),
        };
        let image = g.act(u, self.highest);
        let flag = match conv.alpha_zero {
            AlphaZeroSign::Highest => !g.is_positive_root(image),
            AlphaZeroSign::NegHighest => g.is_positive_root(image),
        };
        g.descent_set(u) | (flag as Subset) << g.rank()
    }

    /// `a_{k,I}` for every `I ⊆ Π ∪ {α_0}`, indexed by bitmask.
    ///
    /// Each lattice point `t` of the closed alcove `{⟨α_i,t⟩ ≥ 0, ⟨α_0,t⟩ ≤ k}`
    /// is counted once, under the set of walls it lies on.
    pub fn a_coefficients(&self, k: u32) -> Vec<u64> {
        let n = self.group.rank();
        let mut counts = vec![0u64; 1 << (n + 1)];
        let mut p = vec![0i64; n];
        self.enumerate(k as i64, 0, 0, &mut p, &mut counts);
        counts
    }

    fn enumerate(&self, k: i64, i: usize, used: i64, p: &mut Vec<i64>, counts: &mut [u64]) {
        let n = p.len();
        if i == n {
            if self.in_coroot_lattice(p) {
                let mut set: usize = (0..n).filter(|&j| p[j] == 0).fold(0, |m, j| m | 1 << j);
                if used == k {
                    set |= 1 << n;
                }
                counts[set] += 1;
            }
            return;
        }
        let h = self.highest_coeffs[i] as i64;
        let mut v = 0;
        while used + h * v <= k {
            p[i] = v;
            self.enumerate(k, i + 1, used + h * v, p, counts);
            v += 1;
        }
    }

    pub fn a_coeff(&self, k: u32, set: Subset) -> u64 {
        self.a_coefficients(k)[set as usize]
    }
}

fn check_supported(group: &CoxeterGroup, k: u32) -> Result<()> {
    let ok = match group.coxeter_type() {
        CoxeterType::A(n) => n <= 5,
        CoxeterType::B(n) | CoxeterType::C(n) => n <= 4,
        CoxeterType::D(4) | CoxeterType::G2 => true,
        t if !t.is_crystallographic() => {
            return Err(Error::NotApplicable(format!("{t} is not a Weyl group")));
        }
        _ => false,
    };
    if !ok {
        return Err(Error::Unsupported {
            label: group.label(),
            bound: "Cellini measures support A1-A5, B2-B4, C2-C4, D4, G2".into(),
        });
    }
    if k == 0 || k > MAX_K {
        return Err(Error::Unsupported { label: format!("k={k}"), bound: format!("1 <= k <= {MAX_K}") });
    }
    Ok(())
}

/// `x_k` under a fixed convention, with the cyclic descent sets it was built from.
#[derive(Clone, Debug)]
pub struct CelliniMeasure {
    pub k: u32,
    pub convention: Convention,
    pub values: GroupAlgebraElement,
    pub cdes: Vec<Subset>,
}

impl CelliniMeasure {
    pub fn group(&self) -> &Arc<CoxeterGroup> {
        self.values.group()
    }

    pub fn value(&self, w: usize) -> &BigRational {
        self.values.coeff(w)
    }

    pub fn is_measure(&self) -> bool {
        self.values.total() == BigRational::from_integer(1.into())
    }

    pub fn to_measure(&self) -> Result<SignedMeasure> {
        SignedMeasure::new(self.values.clone())
    }

    pub fn to_json(&self) -> MeasureJson {
        let g = self.group();
        let n = g.rank();
        let mut json = self.values.to_json(&format!("k={}", self.k));
        json.k = Some(self.k);
        for (w, e) in json.entries.iter_mut().enumerate() {
            let c = self.cdes[w];
            let mut idx = if c >> n & 1 == 1 { vec![0] } else { vec![] };
            idx.extend(subset_indices(c & g.full_subset(), n));
            e.cdes = Some(idx);
        }
        json
    }
}

/// `x_k` computed under an explicit convention; the total is not checked.
pub fn measure_xk_with(group: &Arc<CoxeterGroup>, k: u32, conv: Convention) -> Result<CelliniMeasure> {
    check_supported(group, k)?;
    let data = AffineData::new(group)?;
    let a = data.a_coefficients(k);
    let n = group.rank();
    let full = (1u32 << (n + 1)) - 1;
    let cdes: Vec<Subset> = group.elements().map(|w| data.cyclic_descent(w, conv)).collect();
    let scale = BigRational::new(BigInt::from(1), BigInt::from(k).pow(n as u32));
    let coeff_of = |c: Subset| -> BigRational {
        let free = full & !c;
        let mut sum = 0u64;
        let mut s = free;
        loop {
            sum += a[s as usize];
            if s == 0 {
                break;
            }
            s = (s - 1) & free;
        }
        BigRational::from_integer(sum.into()) * &scale
    };
    let mut cache = vec![None; 1 << (n + 1)];
    let coeffs = cdes
        .iter()
        .map(|&c| cache[c as usize].get_or_insert_with(|| coeff_of(c)).clone())
        .collect();
    Ok(CelliniMeasure { k, convention: conv, values: GroupAlgebraElement::new(group.clone(), coeffs), cdes })
}

/// `x_k` under the calibrated convention.
pub fn measure_xk(group: &Arc<CoxeterGroup>, k: u32) -> Result<CelliniMeasure> {
    let m = measure_xk_with(group, k, FROZEN_CONVENTION)?;
    if !m.is_measure() {
        return Err(Error::Invariant(format!("x_{k} on {} has total mass {}", group.label(), m.values.total())));
    }
    Ok(m)
}

/// `Σ_I a_{k,I} #{w : Cdes(w) ∩ I = ∅}`, which must equal `k^n`.
pub fn weighted_alcove_count(group: &Arc<CoxeterGroup>, k: u32, conv: Convention) -> Result<BigInt> {
    check_supported(group, k)?;
    let data = AffineData::new(group)?;
    let a = data.a_coefficients(k);
    let cdes: Vec<Subset> = group.elements().map(|w| data.cyclic_descent(w, conv)).collect();
    Ok(a
        .par_iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(i, &c)| BigInt::from(c) * BigInt::from(cdes.iter().filter(|&&d| d & i as Subset == 0).count()))
        .sum())
}

/// `x_k * x_h == x_{kh}`.
pub fn verify_convolution_xk(group: &Arc<CoxeterGroup>, k: u32, h: u32) -> Result<bool> {
    let kh = k.checked_mul(h).filter(|&v| v <= MAX_K).ok_or_else(|| Error::Unsupported {
        label: format!("k*h={}", k as u64 * h as u64),
        bound: format!("k*h <= {MAX_K}"),
    })?;
    let a = measure_xk(group, k)?;
    let b = measure_xk(group, h)?;
    let c = measure_xk(group, kh)?;
    Ok(a.values.convolve(&b.values) == c.values)
}

/// Outcome of comparing `x_k`, `M_{W,k}` and `H_{W,k}` in type C.
#[derive(Clone, Debug, Serialize)]
pub struct CoincideReport {
    pub group: String,
    pub k: u32,
    pub x_equals_m: bool,
    pub m_equals_h: bool,
    /// Largest discrepancy `|x_k(w) - M_{W,k}(w)|`.
    pub max_difference: String,
}

impl CoincideReport {
    pub fn holds(&self) -> bool {
        self.x_equals_m && self.m_equals_h
    }
}

pub fn coincide_report(group: &Arc<CoxeterGroup>, k: u32, conv: Convention) -> Result<CoincideReport> {
    if !matches!(group.coxeter_type(), CoxeterType::C(_)) {
        return Err(Error::NotApplicable(format!("{} is not of type C", group.label())));
    }
    if k.is_multiple_of(2) {
        return Err(Error::NotApplicable(format!("k={k} is even; the coincidence is for odd k")));
    }
    let x = measure_xk_with(group, k, conv)?;
    let kq = BigRational::from_integer(k.into());
    let m = measure_m(group, &kq)?;
    let lattice = IntersectionLattice::reflection(group);
    let h = measure_h_definition2(group, &lattice).eval(&kq)?;
    let max = group
        .elements()
        .map(|w| (x.value(w) - m.value(w)).abs())
        .max()
        .unwrap_or_else(BigRational::zero);
    Ok(CoincideReport {
        group: group.label(),
        k,
        x_equals_m: max.is_zero(),
        m_equals_h: m == h,
        max_difference: format_rational(&max),
    })
}

/// `x_k = M_{C_n,k} = H_{C_n,k}` for odd `k`, under the calibrated convention.
pub fn verify_coincide(group: &Arc<CoxeterGroup>, k: u32) -> Result<bool> {
    Ok(coincide_report(group, k, FROZEN_CONVENTION)?.holds())
}

#[derive(Clone, Debug, Serialize)]
pub struct CalibrationTrial {
    pub convention: Convention,
    pub coincides: bool,
    pub sums_to_one: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Calibration {
    pub trials: Vec<CalibrationTrial>,
    pub chosen: Option<Convention>,
}

/// Tries every convention against the type C coincidence at `k = 3` for
/// `C_2` and `C_3`, and against the total-mass condition on `A_2`, `A_3`,
/// `C_2` for `k = 2, 3`; picks the unique survivor.
pub fn calibrate() -> Result<Calibration> {
    let c2 = crate::coxeter::build_group(CoxeterType::C(2))?;
    let c3 = crate::coxeter::build_group(CoxeterType::C(3))?;
    let a2 = crate::coxeter::build_group(CoxeterType::A(2))?;
    let a3 = crate::coxeter::build_group(CoxeterType::A(3))?;
    let mut trials = vec![];
    for conv in Convention::all() {
        let coincides = coincide_report(&c2, 3, conv)?.holds() && coincide_report(&c3, 3, conv)?.holds();
        let mut sums_to_one = true;
        for g in [&a2, &a3, &c2] {
            for k in [2, 3] {
                sums_to_one &= measure_xk_with(g, k, conv)?.is_measure();
            }
        }
        trials.push(CalibrationTrial { convention: conv, coincides, sums_to_one });
    }
    let passing: Vec<Convention> = trials.iter().filter(|t| t.coincides && t.sums_to_one).map(|t| t.convention).collect();
    let chosen = if passing.len() == 1 { Some(passing[0]) } else { None };
    Ok(Calibration { trials, chosen })
}

/// Normalized coefficients `k^n x_k(w)` for a range of `k`, and whether they
/// fail to follow a polynomial of degree at most the rank.
#[derive(Clone, Debug, Serialize)]
pub struct QuasiPolynomialWitness {
    pub group: String,
    pub word: String,
    pub ks: Vec<u32>,
    pub counts: Vec<String>,
    pub polynomial: bool,
}

pub fn non_polynomiality_witness(group: &Arc<CoxeterGroup>, ks: &[u32]) -> Result<Option<QuasiPolynomialWitness>> {
    let n = group.rank();
    if ks.len() < n + 2 || ks.windows(2).any(|w| w[1] != w[0] + 1) {
        return Err(Error::Domain(format!("need at least {} consecutive values of k", n + 2)));
    }
    let measures: Vec<CelliniMeasure> = ks.iter().map(|&k| measure_xk(group, k)).collect::<Result<_>>()?;
    for w in group.elements() {
        let counts: Vec<BigRational> = measures
            .iter()
            .map(|m| m.value(w) * BigRational::from_integer(BigInt::from(m.k).pow(n as u32)))
            .collect();
        // A polynomial of degree <= n has vanishing (n+1)-st differences.
        let mut diff = counts.clone();
        for _ in 0..=n {
            diff = diff.windows(2).map(|p| &p[1] - &p[0]).collect();
        }
        if diff.iter().any(|d| !d.is_zero()) {
            return Ok(Some(QuasiPolynomialWitness {
                group: group.label(),
                word: group.word_string(w),
                ks: ks.to_vec(),
                counts: counts.iter().map(format_rational).collect(),
                polynomial: false,
            }));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coxeter::build_group_from_label;
    use crate::field::{int, rat};

    fn g(label: &str) -> Arc<CoxeterGroup> {
        build_group_from_label(label, None).unwrap()
    }

    #[test]
    fn highest_roots() {
        let cases: [(&str, &[u32]); 6] = [
            ("A2", &[1, 1]),
            ("B2", &[1, 2]),
            ("C2", &[2, 1]),
            ("G2", &[3, 2]),
            ("D4", &[1, 2, 1, 1]),
            ("A4", &[1, 1, 1, 1]),
        ];
        for (label, coeffs) in cases {
            let d = AffineData::new(&g(label)).unwrap();
            let w = d.group();
            // maximality: α_0 + α_i is never a root
            for i in 0..w.rank() {
                let mut v = w.roots()[d.highest_root()].clone();
                v[i] = v[i].add(&w.field().one());
                assert!(w.root_index(&v).is_none());
            }
            let sum: u32 = d.highest_root_coefficients().iter().sum();
            let expect: u32 = coeffs.iter().sum();
            assert_eq!(sum, expect, "{label}");
        }
    }

    #[test]
    fn a2_coefficients_at_two() {
        let d = AffineData::new(&g("A2")).unwrap();
        let a = d.a_coefficients(2);
        assert_eq!(a[0b011], 1);
        assert_eq!(a[0b100], 1);
        assert_eq!(a[0b000], 0);
        assert_eq!(a.iter().sum::<u64>(), 2);
    }

    #[test]
    fn coroot_lattice_of_a2_and_c2() {
        let a2 = AffineData::new(&g("A2")).unwrap();
        // pairings (1,1) come from e1 - e3; (1,0) from (2/3, -1/3, -1/3), not a coroot combination
        assert!(a2.in_coroot_lattice(&[1, 1]));
        assert!(!a2.in_coroot_lattice(&[1, 0]));
        let c2 = AffineData::new(&g("C2")).unwrap();
        let n = (0..5).flat_map(|i| (0..5).map(move |j| [i, j])).filter(|p| c2.in_coroot_lattice(p)).count();
        assert!(n > 0);
    }

    #[test]
    fn x1_is_the_unit() {
        for label in ["A2", "C2", "B3", "G2"] {
            let w = g(label);
            let m = measure_xk(&w, 1).unwrap();
            assert_eq!(m.values, GroupAlgebraElement::identity(&w));
        }
    }

    #[test]
    fn highest_root_alone_loses_mass() {
        let conv = Convention { alpha_zero: AlphaZeroSign::Highest, action: ActionSide::Element };
        assert!(measure_xk_with(&g("A2"), 2, conv).unwrap().is_measure());
        assert!(!measure_xk_with(&g("A2"), 3, conv).unwrap().is_measure());
        assert!(!measure_xk_with(&g("A3"), 2, conv).unwrap().is_measure());
    }

    #[test]
    fn c2_at_three_matches_descent_counts() {
        let w = g("C2");
        let m = measure_xk(&w, 3).unwrap();
        for e in w.elements() {
            let expect = [rat(1, 3), rat(1, 9), int(0)][w.descent_count(e) as usize].clone();
            assert_eq!(*m.value(e), expect);
        }
    }

    #[test]
    fn calibration_is_unique_and_frozen() {
        let c = calibrate().unwrap();
        assert_eq!(c.chosen, Some(FROZEN_CONVENTION));
        // the coincidence for C_2 alone accepts every convention
        let c2 = g("C2");
        for conv in Convention::all() {
            assert!(coincide_report(&c2, 3, conv).unwrap().holds());
        }
    }

    #[test]
    fn non_weyl_groups_are_rejected() {
        assert!(matches!(AffineData::new(&g("H3")), Err(Error::NotApplicable(_))));
        assert!(matches!(measure_xk(&g("A2"), 10), Err(Error::Unsupported { .. })));
        assert!(matches!(coincide_report(&g("C2"), 2, FROZEN_CONVENTION), Err(Error::NotApplicable(_))));
    }
}
