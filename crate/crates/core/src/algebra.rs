//! Group-algebra elements, signed measures and their spectra.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::coxeter::{subset_indices, CoxeterGroup};
use crate::error::{Error, Result};
use crate::linalg::ScaledMatrix;
use crate::poly::Poly;
use crate::format_rational;

/// An element `Σ f(w)·w` of the rational group algebra of `W`.
#[derive(Clone)]
pub struct GroupAlgebraElement {
    group: Arc<CoxeterGroup>,
    coeffs: Vec<BigRational>,
}

impl fmt::Debug for GroupAlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupAlgebraElement({}, [", self.group.label())?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "])")
    }
}

impl PartialEq for GroupAlgebraElement {
    fn eq(&self, o: &Self) -> bool {
        self.group.coxeter_type() == o.group.coxeter_type() && self.coeffs == o.coeffs
    }
}

impl GroupAlgebraElement {
    pub fn new(group: Arc<CoxeterGroup>, coeffs: Vec<BigRational>) -> Self {
        assert_eq!(coeffs.len(), group.order());
        GroupAlgebraElement { group, coeffs }
    }

    pub fn zero(group: &Arc<CoxeterGroup>) -> Self {
        GroupAlgebraElement::new(group.clone(), vec![BigRational::zero(); group.order()])
    }

    /// Point mass at `w`.
    pub fn basis(group: &Arc<CoxeterGroup>, w: usize) -> Self {
        let mut e = GroupAlgebraElement::zero(group);
        e.coeffs[w] = BigRational::one();
        e
    }

    pub fn identity(group: &Arc<CoxeterGroup>) -> Self {
        GroupAlgebraElement::basis(group, group.identity())
    }

    /// `w ↦ f(w)` for a function of the element index.
    pub fn from_fn(group: &Arc<CoxeterGroup>, f: impl Fn(usize) -> BigRational) -> Self {
        GroupAlgebraElement::new(group.clone(), group.elements().map(f).collect())
    }

    pub fn group(&self) -> &Arc<CoxeterGroup> {
        &self.group
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, w: usize) -> &BigRational {
        &self.coeffs[w]
    }

    pub fn total(&self) -> BigRational {
        self.coeffs.iter().sum()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.coeffs.len()).filter(|&w| !self.coeffs[w].is_zero()).collect()
    }

    pub fn add(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a + b)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a - b)
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        GroupAlgebraElement::new(self.group.clone(), self.coeffs.iter().map(|c| c * s).collect())
    }

    fn zip(&self, o: &Self, f: impl Fn(&BigRational, &BigRational) -> BigRational) -> Self {
        assert_eq!(self.group.coxeter_type(), o.group.coxeter_type(), "elements of different groups");
        GroupAlgebraElement::new(self.group.clone(), self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| f(a, b)).collect())
    }

    /// Convolution: the coefficient of `u` in `fg` is `Σ_{vw=u} f(v)g(w)`.
    pub fn convolve(&self, o: &Self) -> Self {
        assert_eq!(self.group.coxeter_type(), o.group.coxeter_type(), "elements of different groups");
        let g = &self.group;
        let left = self.support();
        let coeffs: Vec<BigRational> = g
            .elements()
            .into_par_iter()
            .map(|u| {
                let mut acc = BigRational::zero();
                for &v in &left {
                    let w = g.mul(g.inverse(v), u);
                    let b = &o.coeffs[w];
                    if !b.is_zero() {
                        acc += &self.coeffs[v] * b;
                    }
                }
                acc
            })
            .collect();
        GroupAlgebraElement::new(g.clone(), coeffs)
    }

    /// Pushforward along `w ↦ w⁻¹`.
    pub fn inverse_pushforward(&self) -> Self {
        let g = &self.group;
        GroupAlgebraElement::from_fn(g, |w| self.coeffs[g.inverse(w)].clone())
    }

    /// Matrix of `g ↦ f·g` in the element basis: entry `(u, v)` is `f(u v⁻¹)`.
    pub fn left_multiplication_matrix(&self) -> Vec<BigRational> {
        let g = &self.group;
        let m = g.order();
        let mut out = Vec::with_capacity(m * m);
        for u in 0..m {
            for v in 0..m {
                out.push(self.coeffs[g.mul(u, g.inverse(v))].clone());
            }
        }
        out
    }

    /// Total variation distance `½ Σ |f(w) - g(w)|`.
    pub fn total_variation(&self, o: &Self) -> Result<BigRational> {
        if self.group.coxeter_type() != o.group.coxeter_type() {
            return Err(Error::Domain("distributions live on different groups".into()));
        }
        let s: BigRational = self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| (a - b).abs()).sum();
        Ok(s / BigRational::from_integer(BigInt::from(2)))
    }

    /// Exact coefficients in the measure JSON layout.
    pub fn to_json(&self, parameter: &str) -> MeasureJson {
        let g = self.group();
        MeasureJson {
            group: g.label(),
            parameter: parameter.to_string(),
            k: None,
            entries: g
                .elements()
                .map(|w| MeasureEntry {
                    word: g.word_string(w),
                    descent_set: subset_indices(g.descent_set(w), g.rank()),
                    cdes: None,
                    value: MeasureValue::Exact(format_rational(self.coeff(w))),
                })
                .collect(),
        }
    }

    /// Whether the coefficients depend only on the key computed from each element.
    pub fn is_constant_on<K: Eq + std::hash::Hash>(&self, key: impl Fn(usize) -> K) -> bool {
        let mut seen: std::collections::HashMap<K, &BigRational> = Default::default();
        for (w, c) in self.coeffs.iter().enumerate() {
            if let Some(prev) = seen.insert(key(w), c) {
                if prev != c {
                    return false;
                }
            }
        }
        true
    }
}

/// A group-algebra element whose coefficients sum to exactly one.
#[derive(Clone, Debug, PartialEq)]
pub struct SignedMeasure(GroupAlgebraElement);

impl SignedMeasure {
    pub fn new(e: GroupAlgebraElement) -> Result<Self> {
        let t = e.total();
        if !t.is_one() {
            return Err(Error::Invariant(format!("measure has total mass {t}")));
        }
        Ok(SignedMeasure(e))
    }

    pub fn element(&self) -> &GroupAlgebraElement {
        &self.0
    }

    pub fn into_element(self) -> GroupAlgebraElement {
        self.0
    }

    pub fn value(&self, w: usize) -> &BigRational {
        self.0.coeff(w)
    }

    pub fn group(&self) -> &Arc<CoxeterGroup> {
        self.0.group()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.coeffs().iter().all(|c| !c.is_negative())
    }

    pub fn convolve(&self, o: &Self) -> Result<Self> {
        SignedMeasure::new(self.0.convolve(&o.0))
    }

    pub fn inverse_pushforward(&self) -> Self {
        SignedMeasure(self.0.inverse_pushforward())
    }

    pub fn total_variation(&self, o: &Self) -> Result<BigRational> {
        self.0.total_variation(&o.0)
    }

    pub fn to_json(&self, parameter: &str) -> MeasureJson {
        self.0.to_json(parameter)
    }
}

/// A measure `w ↦ p_{Des(w)}(x) / x^n` depending only on descent sets.
#[derive(Clone, Debug)]
pub struct SymbolicMeasure {
    group: Arc<CoxeterGroup>,
    numerators: Vec<Poly>,
}

impl PartialEq for SymbolicMeasure {
    fn eq(&self, o: &Self) -> bool {
        self.group.coxeter_type() == o.group.coxeter_type() && self.numerators == o.numerators
    }
}

impl SymbolicMeasure {
    /// `numerators[D]` is the numerator for descent set `D` (as a bitmask).
    pub fn new(group: Arc<CoxeterGroup>, numerators: Vec<Poly>) -> Self {
        assert_eq!(numerators.len(), 1 << group.rank());
        SymbolicMeasure { group, numerators }
    }

    pub fn group(&self) -> &Arc<CoxeterGroup> {
        &self.group
    }

    /// Exponent `n` of the common denominator `x^n`.
    pub fn denominator_degree(&self) -> usize {
        self.group.rank()
    }

    /// Numerator for the descent set `d`.
    pub fn numerator(&self, d: u32) -> &Poly {
        &self.numerators[d as usize]
    }

    pub fn numerators(&self) -> &[Poly] {
        &self.numerators
    }

    /// Numerator of the value at element `w`.
    pub fn numerator_at(&self, w: usize) -> &Poly {
        self.numerator(self.group.descent_set(w))
    }

    /// `Σ_w p_{Des(w)}`, which must equal `x^n` for a measure.
    pub fn total_numerator(&self) -> Poly {
        let mut counts = vec![0i64; self.numerators.len()];
        for w in self.group.elements() {
            counts[self.group.descent_set(w) as usize] += 1;
        }
        counts
            .iter()
            .zip(&self.numerators)
            .fold(Poly::zero(), |acc, (&c, p)| &acc + &p.scale(&BigRational::from_integer(c.into())))
    }

    pub fn eval(&self, x: &BigRational) -> Result<SignedMeasure> {
        if x.is_zero() {
            return Err(Error::Domain("the parameter x must be nonzero".into()));
        }
        let xn = num_traits::pow(x.clone(), self.denominator_degree());
        let values: Vec<BigRational> = self.numerators.iter().map(|p| p.eval(x) / &xn).collect();
        SignedMeasure::new(GroupAlgebraElement::from_fn(&self.group, |w| {
            values[self.group.descent_set(w) as usize].clone()
        }))
    }

    pub fn to_json(&self) -> MeasureJson {
        let g = &self.group;
        MeasureJson {
            group: g.label(),
            parameter: "symbolic".into(),
            k: None,
            entries: g
                .elements()
                .map(|w| MeasureEntry {
                    word: g.word_string(w),
                    descent_set: subset_indices(g.descent_set(w), g.rank()),
                    cdes: None,
                    value: MeasureValue::Symbolic {
                        numerator: self.numerator_at(w).to_strings(),
                        denominator_power: self.denominator_degree(),
                    },
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MeasureJson {
    pub group: String,
    pub parameter: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    pub entries: Vec<MeasureEntry>,
}

#[derive(Clone, Debug, Serialize)]
pub struct MeasureEntry {
    pub word: String,
    pub descent_set: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cdes: Option<Vec<usize>>,
    pub value: MeasureValue,
}

#[derive(Clone, Debug, Serialize)]
#[serde(untagged)]
pub enum MeasureValue {
    Exact(String),
    Symbolic { numerator: Vec<String>, denominator_power: usize },
}

/// A multiset of exact eigenvalues.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Spectrum {
    /// `(eigenvalue, multiplicity)`, eigenvalues distinct and decreasing.
    #[serde(serialize_with = "serialize_spectrum")]
    pub entries: Vec<(BigRational, usize)>,
}

fn serialize_spectrum<S: serde::Serializer>(e: &[(BigRational, usize)], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(e.len()))?;
    for (v, m) in e {
        seq.serialize_element(&serde_json::json!({"eigenvalue": format_rational(v), "multiplicity": m}))?;
    }
    seq.end()
}

impl Spectrum {
    /// Merges equal eigenvalues and drops zero multiplicities.
    pub fn new(pairs: impl IntoIterator<Item = (BigRational, usize)>) -> Self {
        let mut entries: Vec<(BigRational, usize)> = vec![];
        for (v, m) in pairs {
            if m == 0 {
                continue;
            }
            match entries.iter_mut().find(|(u, _)| *u == v) {
                Some(e) => e.1 += m,
                None => entries.push((v, m)),
            }
        }
        entries.sort_by(|a, b| b.0.cmp(&a.0));
        Spectrum { entries }
    }

    /// Eigenvalues `x^{-i}` with the given multiplicities `mult[i]`.
    pub fn powers_of_inverse(x: &BigRational, mult: &[usize]) -> Self {
        let inv = x.recip();
        Spectrum::new(mult.iter().enumerate().map(|(i, &m)| (num_traits::pow(inv.clone(), i), m)))
    }

    pub fn total_multiplicity(&self) -> usize {
        self.entries.iter().map(|e| e.1).sum()
    }

    /// `Σ m·λ`.
    pub fn trace(&self) -> BigRational {
        self.entries.iter().map(|(v, m)| v * BigRational::from_integer((*m).into())).sum()
    }

    /// `∏ (t - λ)^m`.
    pub fn characteristic_polynomial(&self) -> Poly {
        self.entries.iter().fold(Poly::one(), |acc, (v, m)| {
            &acc * &Poly::linear(BigRational::one(), -v.clone()).pow(*m)
        })
    }

    pub fn distinct(&self) -> Vec<BigRational> {
        self.entries.iter().map(|e| e.0.clone()).collect()
    }
}

/// How a predicted spectrum was confirmed against an explicit matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum SpectrumCheck {
    /// The exact characteristic polynomial factors as predicted.
    CharacteristicPolynomial,
    /// Trace matches and the product of `(T - λ)` over distinct predicted
    /// eigenvalues kills every probe vector.
    TraceAndAnnihilation { probes: usize },
}

/// Compares `matrix` (row-major, `n × n`) with `predicted`.
///
/// Uses the exact characteristic polynomial when `n <= charpoly_limit`,
/// otherwise trace plus annihilation of a few deterministic integer probes.
pub fn check_spectrum(n: usize, matrix: &[BigRational], predicted: &Spectrum, charpoly_limit: usize) -> Result<SpectrumCheck> {
    check_spectrum_scaled(&ScaledMatrix::from_rational(n, matrix)?, predicted, charpoly_limit)
}

/// As [`check_spectrum`] for a matrix already over a common denominator.
pub fn check_spectrum_scaled(m: &ScaledMatrix, predicted: &Spectrum, charpoly_limit: usize) -> Result<SpectrumCheck> {
    let n = m.dim();
    if predicted.total_multiplicity() != n {
        return Err(Error::Invariant(format!(
            "predicted multiplicities sum to {} but the matrix has size {n}",
            predicted.total_multiplicity()
        )));
    }
    if n <= charpoly_limit {
        let cp = m.charpoly()?;
        let expect = predicted.characteristic_polynomial();
        if cp != expect {
            return Err(Error::Invariant(format!("characteristic polynomial {cp} differs from predicted {expect}")));
        }
        return Ok(SpectrumCheck::CharacteristicPolynomial);
    }
    if m.trace() != predicted.trace() {
        return Err(Error::Invariant(format!("trace {} differs from predicted {}", m.trace(), predicted.trace())));
    }
    let probes = 3;
    let distinct = predicted.distinct();
    for p in 0..probes {
        // deterministic pseudo-random small integers
        let mut state = 0x9E37_79B9_7F4A_7C15u64 ^ (p as u64 + 1);
        let v: Vec<i64> = (0..n)
            .map(|_| {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                (state % 19) as i64 - 9
            })
            .collect();
        if !m.annihilates(&distinct, &v) {
            return Err(Error::Invariant("predicted eigenvalues do not annihilate the matrix".into()));
        }
    }
    Ok(SpectrumCheck::TraceAndAnnihilation { probes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coxeter::build_group_from_label;
    use crate::field::rat;

    #[test]
    fn total_variation_examples() {
        let g = build_group_from_label("A2", None).unwrap();
        let point = GroupAlgebraElement::identity(&g);
        let uniform = GroupAlgebraElement::from_fn(&g, |_| rat(1, 6));
        assert_eq!(point.total_variation(&uniform).unwrap(), rat(5, 6));
        assert_eq!(point.total_variation(&point).unwrap(), rat(0, 1));
    }

    #[test]
    fn convolution_unit_and_associativity() {
        let g = build_group_from_label("A2", None).unwrap();
        let f = GroupAlgebraElement::from_fn(&g, |w| rat(w as i64 + 1, 3));
        let h = GroupAlgebraElement::from_fn(&g, |w| rat(2 - w as i64, 5));
        let k = GroupAlgebraElement::from_fn(&g, |w| rat((w * w) as i64, 7));
        let id = GroupAlgebraElement::identity(&g);
        assert_eq!(f.convolve(&id), f);
        assert_eq!(id.convolve(&f), f);
        assert_eq!(f.convolve(&h).convolve(&k), f.convolve(&h.convolve(&k)));
        // S_3 is nonabelian
        let s1 = GroupAlgebraElement::basis(&g, g.generator(0));
        let s2 = GroupAlgebraElement::basis(&g, g.generator(1));
        assert_ne!(s1.convolve(&s2), s2.convolve(&s1));
    }

    #[test]
    fn left_multiplication_matrix_acts_as_convolution() {
        let g = build_group_from_label("A2", None).unwrap();
        let f = GroupAlgebraElement::from_fn(&g, |w| rat(w as i64 - 2, 3));
        let h = GroupAlgebraElement::from_fn(&g, |w| rat(1 + w as i64 * 3, 4));
        let m = f.left_multiplication_matrix();
        let n = g.order();
        let prod: Vec<BigRational> = (0..n).map(|u| (0..n).map(|v| &m[u * n + v] * h.coeff(v)).sum()).collect();
        assert_eq!(prod, f.convolve(&h).coeffs());
    }

    #[test]
    fn spectrum_polynomial_and_trace() {
        let s = Spectrum::powers_of_inverse(&rat(2, 1), &[1, 3, 2]);
        assert_eq!(s.entries, vec![(rat(1, 1), 1), (rat(1, 2), 3), (rat(1, 4), 2)]);
        assert_eq!(s.trace(), rat(3, 1));
        assert_eq!(s.characteristic_polynomial().degree(), Some(6));
    }
}
