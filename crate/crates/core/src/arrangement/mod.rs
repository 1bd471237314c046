//! Real hyperplane arrangements: reflection arrangements of finite Coxeter
//! groups and generic (possibly non-central) rational arrangements.
//!
//! A hyperplane is `{v : a·v = b}`. Reflection arrangements live in the
//! space of linear functionals on the root space, written in the basis dual
//! to the simple roots: a point `v` is the vector `(v(α_1), …, v(α_n))` and
//! the hyperplane of a positive root `β = Σ c_i α_i` has normal `(c_i)`.
//! The fundamental chamber is then the positive orthant.

mod faces;
mod lattice;
mod walk;

use std::path::Path;
use std::sync::Arc;

use num_rational::BigRational;
use serde::Deserialize;

use crate::coxeter::CoxeterGroup;
use crate::error::{Error, Result};
use crate::field::{Elem, NumberField};

pub use faces::{
    faces, fewest_separating_projection, generic_faces, reflection_faces, tits_project, Face, FaceSet, SignVector,
    DEFAULT_GENERIC_HYPERPLANE_CAP,
};
pub use lattice::{IntersectionLattice, LatticeNode};
pub use walk::{
    bhr_spectrum, bhr_transition_matrix, face_weights, face_weights_symbolic, good_prime_positivity, measure_h,
    measure_h_at, measure_h_definition2, measure_h_definition3, reflection_fibers, verify_bhr_spectrum, verify_identities, verify_lemmas, FaceWeights, IdentityCheck,
    IdentityReport, PrimeReport, TransitionMatrix,
};

/// Where an arrangement came from.
#[derive(Clone, Debug)]
pub enum ArrangementKind {
    Reflection(Arc<CoxeterGroup>),
    Generic,
}

#[derive(Clone, Debug)]
pub struct Arrangement {
    dim: usize,
    field: Arc<NumberField>,
    normals: Vec<Vec<Elem>>,
    offsets: Vec<Elem>,
    gamma: Vec<Elem>,
    kind: ArrangementKind,
}

impl Arrangement {
    /// One hyperplane per positive root, oriented so that the fundamental
    /// chamber `(1, …, 1)` is on the positive side of each.
    pub fn reflection(group: &Arc<CoxeterGroup>) -> Arrangement {
        let field = group.field().clone();
        let n = group.rank();
        let normals = group.roots()[..group.num_positive_roots()].to_vec();
        let offsets = vec![field.zero(); normals.len()];
        let gamma = vec![field.one(); n];
        Arrangement { dim: n, field, normals, offsets, gamma, kind: ArrangementKind::Reflection(group.clone()) }
    }

    /// A rational arrangement `a_i·v = b_i`. When `gamma` is given, each
    /// hyperplane is oriented so that `gamma` lies on its positive side.
    pub fn generic(dim: usize, hyperplanes: Vec<(Vec<BigRational>, BigRational)>, gamma: Option<Vec<BigRational>>) -> Result<Arrangement> {
        let field = NumberField::rationals();
        if dim == 0 {
            return Err(Error::Domain("ambient dimension must be positive".into()));
        }
        if dim > 8 {
            return Err(Error::Unsupported { label: format!("dimension {dim}"), bound: "generic arrangements need dimension <= 8".into() });
        }
        if hyperplanes.len() > 60 {
            return Err(Error::Unsupported {
                label: format!("{} hyperplanes", hyperplanes.len()),
                bound: "at most 60 hyperplanes".into(),
            });
        }
        let mut normals = vec![];
        let mut offsets = vec![];
        for (i, (a, b)) in hyperplanes.into_iter().enumerate() {
            if a.len() != dim {
                return Err(Error::Domain(format!("hyperplane {} has {} coefficients, expected {dim}", i + 1, a.len())));
            }
            if a.iter().all(num_traits::Zero::is_zero) {
                return Err(Error::Domain(format!("hyperplane {} has a zero normal vector", i + 1)));
            }
            let a: Vec<Elem> = a.into_iter().map(|q| field.elem(q)).collect();
            if normals.iter().zip(&offsets).any(|(n, o): (&Vec<Elem>, &Elem)| proportional(n, o, &a, &field.elem(b.clone()))) {
                return Err(Error::Domain(format!("hyperplane {} repeats an earlier hyperplane", i + 1)));
            }
            normals.push(a);
            offsets.push(field.elem(b));
        }
        let gamma_given = gamma.is_some();
        let gamma: Vec<Elem> = match gamma {
            Some(g) if g.len() == dim => g.into_iter().map(|q| field.elem(q)).collect(),
            Some(g) => return Err(Error::Domain(format!("gamma has {} coordinates, expected {dim}", g.len()))),
            None => vec![field.zero(); dim],
        };
        let mut arr = Arrangement { dim, field, normals, offsets, gamma, kind: ArrangementKind::Generic };
        if gamma_given {
            for i in 0..arr.normals.len() {
                let s = arr.evaluate(i, &arr.gamma);
                if s.is_zero() {
                    return Err(Error::Domain(format!("gamma lies on hyperplane {}", i + 1)));
                }
                if s.is_negative() {
                    arr.normals[i] = arr.normals[i].iter().map(Elem::neg).collect();
                    arr.offsets[i] = arr.offsets[i].neg();
                }
            }
        }
        Ok(arr)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn num_hyperplanes(&self) -> usize {
        self.normals.len()
    }

    pub fn normal(&self, i: usize) -> &[Elem] {
        &self.normals[i]
    }

    pub fn offset(&self, i: usize) -> &Elem {
        &self.offsets[i]
    }

    pub fn gamma(&self) -> &[Elem] {
        &self.gamma
    }

    pub fn kind(&self) -> &ArrangementKind {
        &self.kind
    }

    pub fn group(&self) -> Option<&Arc<CoxeterGroup>> {
        match &self.kind {
            ArrangementKind::Reflection(g) => Some(g),
            ArrangementKind::Generic => None,
        }
    }

    pub fn is_central(&self) -> bool {
        self.offsets.iter().all(Elem::is_zero)
    }

    /// `a_i·v - b_i`.
    pub fn evaluate(&self, i: usize, v: &[Elem]) -> Elem {
        let mut s = self.offsets[i].neg();
        for (a, x) in self.normals[i].iter().zip(v) {
            if !a.is_zero() && !x.is_zero() {
                s = s.add(&a.mul(x));
            }
        }
        s
    }

    /// Sign vector of a point.
    pub fn sign_vector(&self, v: &[Elem]) -> SignVector {
        let mut s = SignVector::default();
        for i in 0..self.num_hyperplanes() {
            let e = self.evaluate(i, v);
            if e.is_positive() {
                s.plus |= 1 << i;
            } else if e.is_negative() {
                s.minus |= 1 << i;
            }
        }
        s
    }

    /// Reads a generic arrangement from JSON or plain text, chosen by content.
    ///
    /// JSON: `{"dim": 2, "hyperplanes": [{"normal": ["1", "0"], "offset": "0"}], "gamma": ["1", "1"]}`.
    /// Text: the dimension on the first line, then one `a_1 … a_n b` line per
    /// hyperplane, optionally a `gamma g_1 … g_n` line; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Arrangement> {
        if text.trim_start().starts_with('{') {
            parse_json(text)
        } else {
            parse_text(text)
        }
    }

    pub fn from_file(path: &Path) -> Result<Arrangement> {
        Arrangement::parse(&std::fs::read_to_string(path)?)
    }
}

fn proportional(a1: &[Elem], b1: &Elem, a2: &[Elem], b2: &Elem) -> bool {
    let v1: Vec<Elem> = a1.iter().chain(std::iter::once(b1)).cloned().collect();
    let v2: Vec<Elem> = a2.iter().chain(std::iter::once(b2)).cloned().collect();
    crate::linalg::rank(&[v1, v2]) < 2
}

#[derive(Deserialize)]
struct JsonArrangement {
    dim: usize,
    hyperplanes: Vec<JsonHyperplane>,
    #[serde(default)]
    gamma: Option<Vec<JsonNumber>>,
}

#[derive(Deserialize)]
struct JsonHyperplane {
    normal: Vec<JsonNumber>,
    #[serde(default)]
    offset: Option<JsonNumber>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum JsonNumber {
    Int(i64),
    Text(String),
}

impl JsonNumber {
    fn value(&self) -> Result<BigRational> {
        match self {
            JsonNumber::Int(i) => Ok(crate::field::int(*i)),
            JsonNumber::Text(s) => crate::parse_rational(s),
        }
    }
}

fn parse_json(text: &str) -> Result<Arrangement> {
    let j: JsonArrangement = serde_json::from_str(text).map_err(|e| Error::Parse(format!("arrangement JSON: {e}")))?;
    let hyperplanes = j
        .hyperplanes
        .iter()
        .map(|h| {
            let a = h.normal.iter().map(JsonNumber::value).collect::<Result<Vec<_>>>()?;
            let b = match &h.offset {
                Some(b) => b.value()?,
                None => crate::field::int(0),
            };
            Ok((a, b))
        })
        .collect::<Result<Vec<_>>>()?;
    let gamma = j.gamma.map(|g| g.iter().map(JsonNumber::value).collect::<Result<Vec<_>>>()).transpose()?;
    Arrangement::generic(j.dim, hyperplanes, gamma)
}

fn parse_text(text: &str) -> Result<Arrangement> {
    let mut lines = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .enumerate()
        .filter(|(_, l)| !l.is_empty());
    let (_, first) = lines.next().ok_or_else(|| Error::Parse("empty arrangement file".into()))?;
    let dim: usize = first.parse().map_err(|_| Error::Parse(format!("line 1: expected the dimension, found {first:?}")))?;
    let mut hyperplanes = vec![];
    let mut gamma = None;
    for (no, line) in lines {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields[0] == "gamma" {
            let g = fields[1..].iter().map(|s| crate::parse_rational(s)).collect::<Result<Vec<_>>>()?;
            gamma = Some(g);
            continue;
        }
        if fields.len() != dim + 1 {
            return Err(Error::Parse(format!("line {}: expected {} numbers (normal and offset), found {}", no + 1, dim + 1, fields.len())));
        }
        let nums = fields.iter().map(|s| crate::parse_rational(s)).collect::<Result<Vec<_>>>()?;
        hyperplanes.push((nums[..dim].to_vec(), nums[dim].clone()));
    }
    Arrangement::generic(dim, hyperplanes, gamma)
}

/// A few small generic arrangements used by tests and the verification suite.
pub fn sample_generic_arrangements() -> Vec<(&'static str, Arrangement)> {
    let q = |v: &[i64]| v.iter().map(|&x| crate::field::int(x)).collect::<Vec<_>>();
    let h = |a: &[i64], b: i64| (q(a), crate::field::int(b));
    vec![
        ("boolean-2", Arrangement::generic(2, vec![h(&[1, 0], 0), h(&[0, 1], 0)], None).unwrap()),
        (
            "four-planes-3",
            Arrangement::generic(3, vec![h(&[1, 0, 0], 0), h(&[0, 1, 0], 0), h(&[0, 0, 1], 0), h(&[1, 1, 1], 0)], None).unwrap(),
        ),
        ("four-lines-2", Arrangement::generic(2, vec![h(&[1, 0], 0), h(&[0, 1], 0), h(&[1, 1], 0), h(&[1, -2], 0)], None).unwrap()),
        ("triangle", Arrangement::generic(2, vec![h(&[1, 0], 0), h(&[0, 1], 0), h(&[1, 1], 1)], None).unwrap()),
        (
            "grid-diagonal",
            Arrangement::generic(2, vec![h(&[1, 0], 0), h(&[1, 0], 1), h(&[0, 1], 0), h(&[0, 1], 1), h(&[1, -1], 0)], None).unwrap(),
        ),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coxeter::build_group_from_label;

    #[test]
    fn reflection_arrangement_sizes() {
        for (label, m) in [("A2", 3), ("G2", 6), ("B3", 9), ("H4", 60)] {
            let a = Arrangement::reflection(&build_group_from_label(label, None).unwrap());
            assert_eq!(a.num_hyperplanes(), m);
            assert!(a.is_central());
            // gamma is strictly inside every positive half-space
            assert_eq!(a.sign_vector(a.gamma()).plus.count_ones() as usize, m);
        }
    }

    #[test]
    fn parse_text_and_json_agree() {
        let t = Arrangement::parse("# triangle\n2\n1 0 0\n0 1 0\n1 1 1\ngamma 1/4 1/4\n").unwrap();
        let j = Arrangement::parse(
            r#"{"dim": 2, "hyperplanes": [{"normal": [1, 0]}, {"normal": ["0", "1"], "offset": 0}, {"normal": [1, 1], "offset": "1"}], "gamma": ["1/4", "0.25"]}"#,
        )
        .unwrap();
        assert_eq!(t.num_hyperplanes(), 3);
        for i in 0..3 {
            assert_eq!(t.normal(i), j.normal(i));
            assert_eq!(t.offset(i), j.offset(i));
        }
        assert!(!t.is_central());
        // the third hyperplane was flipped so that gamma is on its + side
        assert!(t.normal(2)[0].is_negative());
    }

    #[test]
    fn parse_errors_are_reported() {
        assert!(Arrangement::parse("").is_err());
        assert!(Arrangement::parse("2\n1 0\n").is_err());
        assert!(Arrangement::parse("2\n0 0 1\n").is_err());
        assert!(Arrangement::parse("2\n1 1 0\n2 2 0\n").is_err());
        assert!(Arrangement::parse("2\n1 0 0\ngamma 0 1\n").is_err());
    }
}
