//! Faces as sign vectors, their enumeration, and the Tits projection.

use std::collections::HashMap;

use super::{Arrangement, ArrangementKind, IntersectionLattice};
use crate::coxeter::{CoxeterGroup, Subset};
use crate::error::{Error, Result};
use crate::field::Elem;
use crate::linalg;

/// Default limit on the number of hyperplanes for generic face enumeration.
pub const DEFAULT_GENERIC_HYPERPLANE_CAP: usize = 14;

/// Signs of a face on each hyperplane; hyperplane `i` is bit `i`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignVector {
    pub plus: u64,
    pub minus: u64,
}

impl SignVector {
    /// Hyperplanes on which the face has sign 0.
    pub fn zero_mask(&self, m: usize) -> u64 {
        !(self.plus | self.minus) & full_mask(m)
    }

    pub fn sign(&self, i: usize) -> i8 {
        if self.plus >> i & 1 == 1 {
            1
        } else if self.minus >> i & 1 == 1 {
            -1
        } else {
            0
        }
    }

    /// Face product: take `self`'s sign where nonzero, else `other`'s.
    pub fn compose(&self, other: &SignVector) -> SignVector {
        let support = self.plus | self.minus;
        SignVector { plus: self.plus | (other.plus & !support), minus: self.minus | (other.minus & !support) }
    }

    /// `self` lies in the closure of `other`.
    pub fn is_face_of(&self, other: &SignVector) -> bool {
        self.plus & !other.plus == 0 && self.minus & !other.minus == 0
    }

    /// Number of hyperplanes separating two faces.
    pub fn separation(&self, other: &SignVector) -> u32 {
        ((self.plus & other.minus) | (self.minus & other.plus)).count_ones()
    }

    pub fn to_string(&self, m: usize) -> String {
        (0..m)
            .map(|i| match self.sign(i) {
                1 => '+',
                -1 => '-',
                _ => '0',
            })
            .collect()
    }
}

fn full_mask(m: usize) -> u64 {
    if m == 64 {
        u64::MAX
    } else {
        (1u64 << m) - 1
    }
}

#[derive(Clone, Debug)]
pub struct Face {
    pub sign: SignVector,
    /// Lattice node of the support `z(F)`.
    pub node: usize,
    /// A point of the face (generic arrangements).
    pub witness: Option<Vec<Elem>>,
    /// The coset `wW_K`, with `w` its minimal representative (reflection arrangements).
    pub coset: Option<(usize, Subset)>,
}

#[derive(Clone, Debug)]
pub struct FaceSet {
    num_hyperplanes: usize,
    faces: Vec<Face>,
    chambers: Vec<usize>,
    chamber_index: HashMap<SignVector, usize>,
    fibers: Vec<usize>,
}

impl FaceSet {
    fn new(num_hyperplanes: usize, faces: Vec<Face>, lattice_len: usize) -> Self {
        let m = num_hyperplanes;
        let chambers: Vec<usize> = (0..faces.len()).filter(|&f| faces[f].sign.zero_mask(m) == 0).collect();
        let chamber_index = chambers.iter().enumerate().map(|(pos, &f)| (faces[f].sign, pos)).collect();
        let mut fibers = vec![0usize; lattice_len];
        for f in &faces {
            fibers[f.node] += 1;
        }
        FaceSet { num_hyperplanes, faces, chambers, chamber_index, fibers }
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    pub fn num_hyperplanes(&self) -> usize {
        self.num_hyperplanes
    }

    /// Face indices of the chambers, in chamber order. For reflection
    /// arrangements chamber `i` is the group element `i`.
    pub fn chambers(&self) -> &[usize] {
        &self.chambers
    }

    pub fn num_chambers(&self) -> usize {
        self.chambers.len()
    }

    pub fn chamber_sign(&self, c: usize) -> &SignVector {
        &self.faces[self.chambers[c]].sign
    }

    pub fn chamber_of_sign(&self, s: &SignVector) -> Option<usize> {
        self.chamber_index.get(s).copied()
    }

    /// Number of enumerated faces with support `node`.
    pub fn fiber(&self, node: usize) -> usize {
        self.fibers[node]
    }

    pub fn fibers(&self) -> &[usize] {
        &self.fibers
    }

    /// Tits projection of chamber `c` onto face `f`, as a chamber index.
    pub fn project(&self, f: usize, c: usize) -> usize {
        let s = tits_project(&self.faces[f].sign, self.chamber_sign(c));
        self.chamber_of_sign(&s).expect("the face product with a chamber is a chamber")
    }
}

/// Sign-vector composition `F∘C`: the chamber nearest `C` whose closure contains `F`.
pub fn tits_project(face: &SignVector, chamber: &SignVector) -> SignVector {
    face.compose(chamber)
}

/// Reference projection: among chambers whose closure contains face `f`,
/// the one separated from chamber `c` by the fewest hyperplanes; `None` on a tie.
pub fn fewest_separating_projection(faces: &FaceSet, f: usize, c: usize) -> Option<usize> {
    let fs = &faces.faces[f].sign;
    let cs = faces.chamber_sign(c);
    let mut best: Option<(u32, usize)> = None;
    let mut tie = false;
    for d in 0..faces.num_chambers() {
        let ds = faces.chamber_sign(d);
        if !fs.is_face_of(ds) {
            continue;
        }
        let sep = ds.separation(cs);
        match best {
            Some((b, _)) if sep > b => {}
            Some((b, _)) if sep == b => tie = true,
            _ => {
                best = Some((sep, d));
                tie = false;
            }
        }
    }
    if tie {
        None
    } else {
        best.map(|b| b.1)
    }
}

/// Faces of any arrangement (group-theoretic for reflection arrangements).
pub fn faces(arr: &Arrangement, lattice: &IntersectionLattice) -> Result<FaceSet> {
    match arr.kind() {
        ArrangementKind::Reflection(g) => Ok(reflection_faces(g, lattice)),
        ArrangementKind::Generic => generic_faces(arr, lattice, DEFAULT_GENERIC_HYPERPLANE_CAP),
    }
}

/// Faces of a reflection arrangement as cosets `wW_K` with `K ∩ Des(w) = ∅`.
///
/// On the hyperplane of a positive root `β`, the face `wW_K` has sign 0 if
/// `w⁻¹β` is a root of `W_K` and the sign of `w⁻¹β` otherwise.
pub fn reflection_faces(group: &CoxeterGroup, lattice: &IntersectionLattice) -> FaceSet {
    let n = group.rank();
    let npos = group.num_positive_roots();
    let mut out = vec![];
    // chambers first, in element order
    let mut subsets: Vec<Subset> = (0..1u32 << n).collect();
    subsets.sort_by_key(|s| (s.count_ones(), *s));
    for &k in &subsets {
        let phi = group.parabolic_root_set(k);
        for w in group.elements() {
            if !group.is_min_coset_rep(w, k) {
                continue;
            }
            let winv = group.inverse(w);
            let mut s = SignVector::default();
            for b in 0..npos {
                let u = group.act(winv, b);
                if phi >> u & 1 == 1 {
                    continue;
                }
                if group.is_positive_root(u) {
                    s.plus |= 1 << b;
                } else {
                    s.minus |= 1 << b;
                }
            }
            let node = lattice
                .node_of_mask(s.zero_mask(npos))
                .expect("the support of a coset face is a lattice flat");
            out.push(Face { sign: s, node, witness: None, coset: Some((w, k)) });
        }
    }
    FaceSet::new(npos, out, lattice.len())
}

/// Strict inequality `coeffs·t + constant > 0`.
#[derive(Clone, Debug)]
struct Strict {
    coeffs: Vec<Elem>,
    constant: Elem,
}

/// Finds a point satisfying every strict inequality, by Fourier–Motzkin
/// elimination and back-substitution.
fn fourier_motzkin(cons: &[Strict], d: usize, zero: &Elem) -> Option<Vec<Elem>> {
    if d == 0 {
        return cons.iter().all(|c| c.constant.is_positive()).then(Vec::new);
    }
    let last = d - 1;
    let (mut lower, mut upper, mut rest) = (vec![], vec![], vec![]);
    for c in cons {
        let a = &c.coeffs[last];
        if a.is_zero() {
            rest.push(Strict { coeffs: c.coeffs[..last].to_vec(), constant: c.constant.clone() });
            continue;
        }
        // a t_last + r(t') > 0  ⇔  t_last > -r/a (a > 0)  or  t_last < -r/a (a < 0)
        let inv = a.inv().neg();
        let bound = Strict {
            coeffs: c.coeffs[..last].iter().map(|x| x.mul(&inv)).collect(),
            constant: c.constant.mul(&inv),
        };
        if a.is_positive() {
            lower.push(bound);
        } else {
            upper.push(bound);
        }
    }
    for l in &lower {
        for u in &upper {
            // u(t') - l(t') > 0
            rest.push(Strict {
                coeffs: u.coeffs.iter().zip(&l.coeffs).map(|(a, b)| a.sub(b)).collect(),
                constant: u.constant.sub(&l.constant),
            });
        }
    }
    let mut t = fourier_motzkin(&rest, last, zero)?;
    let eval = |b: &Strict| -> Elem {
        b.coeffs.iter().zip(&t).fold(b.constant.clone(), |acc, (a, x)| acc.add(&a.mul(x)))
    };
    let pick = |vals: Vec<Elem>, want_max: bool| -> Option<Elem> {
        vals.into_iter().reduce(|a, b| {
            let b_bigger = b.sub(&a).is_positive();
            if b_bigger == want_max {
                b
            } else {
                a
            }
        })
    };
    let lo = pick(lower.iter().map(eval).collect(), true);
    let hi = pick(upper.iter().map(eval).collect(), false);
    let one = zero.field().one();
    let v = match (lo, hi) {
        (Some(l), Some(h)) => l.add(&h).scale(&crate::field::rat(1, 2)),
        (Some(l), None) => l.add(&one),
        (None, Some(h)) => h.sub(&one),
        (None, None) => zero.clone(),
    };
    t.push(v);
    Some(t)
}

/// Faces of a generic arrangement by exact feasibility search, grouped by
/// support flat; each face carries a witness point.
pub fn generic_faces(arr: &Arrangement, lattice: &IntersectionLattice, cap: usize) -> Result<FaceSet> {
    let m = arr.num_hyperplanes();
    if m > cap {
        return Err(Error::Resource(format!(
            "face enumeration is limited to {cap} hyperplanes; the arrangement has {m}"
        )));
    }
    let n = arr.dim();
    let zero = arr.field().zero();
    let mut out = vec![];
    for (node, nd) in lattice.nodes().iter().enumerate() {
        let inside: Vec<usize> = (0..m).filter(|&h| nd.mask >> h & 1 == 1).collect();
        let augmented: Vec<Vec<Elem>> = inside
            .iter()
            .map(|&h| {
                let mut r = arr.normal(h).to_vec();
                r.push(arr.offset(h).clone());
                r
            })
            .collect();
        let p = linalg::particular_solution(&augmented, n, &zero)
            .ok_or_else(|| Error::Invariant("lattice flat is empty".into()))?;
        let a_rows: Vec<Vec<Elem>> = inside.iter().map(|&h| arr.normal(h).to_vec()).collect();
        let basis = linalg::nullspace(&a_rows, n, &zero);
        let d = basis.len();
        if d != nd.dim {
            return Err(Error::Invariant("flat dimension mismatch".into()));
        }
        // Restrict the remaining hyperplanes to the flat v = p + Σ t_j basis_j.
        let outside: Vec<usize> = (0..m).filter(|&h| nd.mask >> h & 1 == 0).collect();
        let restricted: Vec<Strict> = outside
            .iter()
            .map(|&h| Strict {
                coeffs: basis.iter().map(|b| dot(arr.normal(h), b)).collect(),
                constant: arr.evaluate(h, &p),
            })
            .collect();
        let mut chosen: Vec<Strict> = vec![];
        let mut found: Vec<Vec<Elem>> = vec![];
        search(&restricted, 0, &mut chosen, d, &zero, &mut found);
        for t in found {
            let mut v = p.clone();
            for (tj, b) in t.iter().zip(&basis) {
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi = vi.add(&tj.mul(bi));
                }
            }
            let sign = arr.sign_vector(&v);
            if sign.zero_mask(m) != nd.mask {
                return Err(Error::Invariant("face witness left its support flat".into()));
            }
            out.push(Face { sign, node, witness: Some(v), coset: None });
        }
    }
    // chambers first, then by support dimension; deterministic within a node
    out.sort_by(|a, b| {
        let da = lattice.nodes()[a.node].dim;
        let db = lattice.nodes()[b.node].dim;
        db.cmp(&da).then(a.node.cmp(&b.node)).then(a.sign.cmp(&b.sign))
    });
    Ok(FaceSet::new(m, out, lattice.len()))
}

fn dot(a: &[Elem], b: &[Elem]) -> Elem {
    a.iter().zip(b).fold(a[0].field().zero(), |acc, (x, y)| acc.add(&x.mul(y)))
}

fn search(cons: &[Strict], i: usize, chosen: &mut Vec<Strict>, d: usize, zero: &Elem, found: &mut Vec<Vec<Elem>>) {
    if i == cons.len() {
        if let Some(t) = fourier_motzkin(chosen, d, zero) {
            found.push(t);
        }
        return;
    }
    for positive in [true, false] {
        let c = &cons[i];
        let s = if positive {
            c.clone()
        } else {
            Strict { coeffs: c.coeffs.iter().map(Elem::neg).collect(), constant: c.constant.neg() }
        };
        chosen.push(s);
        if fourier_motzkin(chosen, d, zero).is_some() {
            search(cons, i + 1, chosen, d, zero, found);
        }
        chosen.pop();
    }
}
