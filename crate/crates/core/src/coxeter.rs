//! Finite Coxeter groups realized through explicit root systems.
//!
//! Roots are stored in simple-root coordinates over an exact real field, so
//! the realization is essential (ambient dimension = rank). Every group
//! element is stored as the permutation it induces on the root list; after
//! construction all descent, length and coset queries are integer-only.
//!
//! The group acts on roots on the left: `w(α)`. Subsets of the simple roots
//! are bitmasks (`bit i` = simple root `α_{i+1}`).

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Elem, NumberField};
use crate::linalg;

/// Subset of the simple roots as a bitmask.
pub type Subset = u32;

/// Set of root indices (positive and negative) as a bitmask; every supported
/// group has at most 120 roots.
pub type RootSet = u128;

const MAX_RANK: usize = 8;
type Key = [u16; MAX_RANK];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CoxeterType {
    A(usize),
    B(usize),
    C(usize),
    D(usize),
    G2,
    F4,
    H3,
    H4,
    I2(u32),
}

impl fmt::Display for CoxeterType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoxeterType::A(n) => write!(f, "A{n}"),
            CoxeterType::B(n) => write!(f, "B{n}"),
            CoxeterType::C(n) => write!(f, "C{n}"),
            CoxeterType::D(n) => write!(f, "D{n}"),
            CoxeterType::G2 => write!(f, "G2"),
            CoxeterType::F4 => write!(f, "F4"),
            CoxeterType::H3 => write!(f, "H3"),
            CoxeterType::H4 => write!(f, "H4"),
            CoxeterType::I2(m) => write!(f, "I2({m})"),
        }
    }
}

impl Serialize for CoxeterType {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl CoxeterType {
    /// Parses a type label such as `A`, `B3`, `G2`, `H4`, `I2(7)` with an
    /// optional separate rank (or dihedral order for `I2`).
    pub fn parse(label: &str, rank: Option<usize>) -> Result<CoxeterType> {
        let label = label.trim();
        let unsupported = |bound: &str| Error::Unsupported { label: label.to_string(), bound: bound.to_string() };
        let upper = label.to_ascii_uppercase();
        if let Some(rest) = upper.strip_prefix("I2") {
            let m = rest.trim_start_matches('(').trim_end_matches(')');
            let m: u32 = if m.is_empty() {
                rank.ok_or_else(|| unsupported("I2 needs m, e.g. I2(5)"))? as u32
            } else {
                m.parse().map_err(|_| unsupported("I2(m) needs an integer m"))?
            };
            return CoxeterType::I2(m).validated();
        }
        let (letter, digits) = upper.split_at(1.min(upper.len()));
        let n = if digits.is_empty() {
            rank.ok_or_else(|| unsupported("a rank is required"))?
        } else {
            let parsed: usize = digits.parse().map_err(|_| unsupported("unrecognised rank"))?;
            if let Some(r) = rank {
                if r != parsed {
                    return Err(unsupported("label rank and --rank disagree"));
                }
            }
            parsed
        };
        let ty = match letter {
            "A" => CoxeterType::A(n),
            "B" => CoxeterType::B(n),
            "C" => CoxeterType::C(n),
            "D" => CoxeterType::D(n),
            "G" if n == 2 => CoxeterType::G2,
            "F" if n == 4 => CoxeterType::F4,
            "H" if n == 3 => CoxeterType::H3,
            "H" if n == 4 => CoxeterType::H4,
            _ => return Err(unsupported("supported: A1-A7, B2-B5, C2-C5, D4-D5, G2, F4, H3, H4, I2(2..30)")),
        };
        ty.validated()
    }

    fn validated(self) -> Result<CoxeterType> {
        let bad = |bound: &str| Err(Error::Unsupported { label: self.to_string(), bound: bound.to_string() });
        match self {
            CoxeterType::A(n) if !(1..=7).contains(&n) => bad("type A needs 1 <= n <= 7"),
            CoxeterType::B(n) if !(2..=5).contains(&n) => bad("type B needs 2 <= n <= 5"),
            CoxeterType::C(n) if !(2..=5).contains(&n) => bad("type C needs 2 <= n <= 5"),
            CoxeterType::D(n) if !(4..=5).contains(&n) => bad("type D needs 4 <= n <= 5"),
            CoxeterType::I2(m) if !(2..=30).contains(&m) => bad("I2(m) needs 2 <= m <= 30"),
            _ => Ok(self),
        }
    }

    /// Every supported type, smallest rank first within each family.
    pub fn all_supported() -> Vec<CoxeterType> {
        let mut out: Vec<CoxeterType> = (1..=7).map(CoxeterType::A).collect();
        out.extend((2..=5).map(CoxeterType::B));
        out.extend((2..=5).map(CoxeterType::C));
        out.extend((4..=5).map(CoxeterType::D));
        out.extend([CoxeterType::G2, CoxeterType::F4, CoxeterType::H3, CoxeterType::H4]);
        out.extend((2..=30).map(CoxeterType::I2));
        out
    }

    pub fn rank(&self) -> usize {
        match *self {
            CoxeterType::A(n) | CoxeterType::B(n) | CoxeterType::C(n) | CoxeterType::D(n) => n,
            CoxeterType::G2 | CoxeterType::I2(_) => 2,
            CoxeterType::H3 => 3,
            CoxeterType::F4 | CoxeterType::H4 => 4,
        }
    }

    /// Classical order formula.
    pub fn order(&self) -> usize {
        let fact = |n: usize| (1..=n).product::<usize>();
        match *self {
            CoxeterType::A(n) => fact(n + 1),
            CoxeterType::B(n) | CoxeterType::C(n) => (1 << n) * fact(n),
            CoxeterType::D(n) => (1 << (n - 1)) * fact(n),
            CoxeterType::G2 => 12,
            CoxeterType::F4 => 1152,
            CoxeterType::H3 => 120,
            CoxeterType::H4 => 14400,
            CoxeterType::I2(m) => 2 * m as usize,
        }
    }

    pub fn exponents(&self) -> Vec<u32> {
        match *self {
            CoxeterType::A(n) => (1..=n as u32).collect(),
            CoxeterType::B(n) | CoxeterType::C(n) => (1..=n as u32).map(|i| 2 * i - 1).collect(),
            CoxeterType::D(n) => {
                let mut e: Vec<u32> = (1..n as u32).map(|i| 2 * i - 1).collect();
                e.push(n as u32 - 1);
                e.sort_unstable();
                e
            }
            CoxeterType::G2 => vec![1, 5],
            CoxeterType::F4 => vec![1, 5, 7, 11],
            CoxeterType::H3 => vec![1, 5, 9],
            CoxeterType::H4 => vec![1, 11, 19, 29],
            CoxeterType::I2(m) => vec![1, m - 1],
        }
    }

    pub fn is_crystallographic(&self) -> bool {
        !matches!(self, CoxeterType::H3 | CoxeterType::H4 | CoxeterType::I2(_))
    }

    /// Bad primes; `None` for non-crystallographic types.
    pub fn bad_primes(&self) -> Option<Vec<u32>> {
        match self {
            CoxeterType::A(_) => Some(vec![]),
            CoxeterType::B(_) | CoxeterType::C(_) | CoxeterType::D(_) => Some(vec![2]),
            CoxeterType::G2 | CoxeterType::F4 => Some(vec![2, 3]),
            _ => None,
        }
    }

    /// `cartan[i][j] = ⟨α_i^∨, α_j⟩`; symmetric `-2cos(π/m_ij)` off the
    /// diagonal for the non-crystallographic types.
    fn cartan(&self, field: &Arc<NumberField>) -> Vec<Vec<Elem>> {
        let n = self.rank();
        let mut a = vec![vec![field.zero(); n]; n];
        for (i, row) in a.iter_mut().enumerate() {
            row[i] = field.int(2);
        }
        let mut set = |i: usize, j: usize, v: Elem| a[i][j] = v;
        let m1 = field.int(-1);
        let m2 = field.int(-2);
        let m3 = field.int(-3);
        let chain = |set: &mut dyn FnMut(usize, usize, Elem), upto: usize| {
            for i in 0..upto {
                set(i, i + 1, field.int(-1));
                set(i + 1, i, field.int(-1));
            }
        };
        match *self {
            CoxeterType::A(n) => chain(&mut set, n - 1),
            CoxeterType::B(n) => {
                chain(&mut set, n - 1);
                set(n - 1, n - 2, m2);
            }
            CoxeterType::C(n) => {
                chain(&mut set, n - 1);
                set(n - 2, n - 1, m2);
            }
            CoxeterType::D(n) => {
                chain(&mut set, n - 2);
                set(n - 1, n - 3, m1.clone());
                set(n - 3, n - 1, m1);
            }
            CoxeterType::G2 => {
                set(0, 1, m3);
                set(1, 0, m1);
            }
            CoxeterType::F4 => {
                chain(&mut set, 3);
                set(2, 1, m2);
            }
            CoxeterType::H3 | CoxeterType::H4 | CoxeterType::I2(_) => {
                chain(&mut set, n - 1);
                let theta = field.generator().neg();
                set(0, 1, theta.clone());
                set(1, 0, theta);
            }
        }
        a
    }

    fn field(&self) -> Arc<NumberField> {
        match *self {
            CoxeterType::H3 | CoxeterType::H4 => NumberField::two_cos_pi_over(5),
            CoxeterType::I2(m) => NumberField::two_cos_pi_over(m),
            _ => NumberField::rationals(),
        }
    }
}

/// A class of simple-root subsets under `J ~ K ⇔ w(J) = K` for some `w`.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct SimpleSubsetClass {
    pub representative: Subset,
    pub members: Vec<Subset>,
    pub size: usize,
    pub rank: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct GroupSummary {
    #[serde(rename = "type")]
    pub type_label: String,
    pub rank: usize,
    pub order: usize,
    pub positive_roots: usize,
    pub exponents: Vec<u32>,
    pub crystallographic: bool,
    pub bad_primes: Option<Vec<u32>>,
    pub field: String,
    pub classes: Vec<ClassSummary>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassSummary {
    pub representative: Vec<usize>,
    pub members: Vec<Vec<usize>>,
    pub size: usize,
    pub rank: usize,
}

/// A finite Coxeter group with its root system and full element list.
pub struct CoxeterGroup {
    ty: CoxeterType,
    field: Arc<NumberField>,
    cartan: Vec<Vec<Elem>>,
    roots: Vec<Vec<Elem>>,
    npos: usize,
    root_index: HashMap<Vec<Elem>, u16>,
    perms: Vec<u16>,
    words: Vec<Vec<u8>>,
    lengths: Vec<u32>,
    descents: Vec<Subset>,
    inverses: Vec<u32>,
    index: HashMap<Key, u32>,
    longest: usize,
    parabolic_roots: Vec<RootSet>,
    fix_dims: OnceLock<Vec<u8>>,
    classes: OnceLock<Vec<SimpleSubsetClass>>,
    mul_table: OnceLock<Vec<u32>>,
}

impl fmt::Debug for CoxeterGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CoxeterGroup({}, |W| = {})", self.ty, self.order())
    }
}

/// Builds the group of the given type.
pub fn build_group(ty: CoxeterType) -> Result<Arc<CoxeterGroup>> {
    CoxeterGroup::new(ty).map(Arc::new)
}

/// Parses `label`/`rank` and builds the group.
pub fn build_group_from_label(label: &str, rank: Option<usize>) -> Result<Arc<CoxeterGroup>> {
    build_group(CoxeterType::parse(label, rank)?)
}

fn reflect(cartan: &[Vec<Elem>], i: usize, v: &[Elem]) -> Vec<Elem> {
    let mut s = v[0].field().zero();
    for (a, x) in cartan[i].iter().zip(v) {
        if !a.is_zero() && !x.is_zero() {
            s = s.add(&a.mul(x));
        }
    }
    let mut out = v.to_vec();
    out[i] = out[i].sub(&s);
    out
}

impl CoxeterGroup {
    pub fn new(ty: CoxeterType) -> Result<CoxeterGroup> {
        let ty = ty.validated()?;
        let n = ty.rank();
        let field = ty.field();
        let cartan = ty.cartan(&field);

        // Positive roots: closure of the simple roots under simple
        // reflections, keeping only positive images.
        let unit = |i: usize| -> Vec<Elem> {
            (0..n).map(|j| if i == j { field.one() } else { field.zero() }).collect()
        };
        let mut positives: Vec<Vec<Elem>> = (0..n).map(unit).collect();
        let mut seen: HashMap<Vec<Elem>, usize> =
            positives.iter().enumerate().map(|(i, r)| (r.clone(), i)).collect();
        let mut head = 0;
        while head < positives.len() {
            let beta = positives[head].clone();
            head += 1;
            for i in 0..n {
                let img = reflect(&cartan, i, &beta);
                if img.iter().any(|c| c.is_negative()) || seen.contains_key(&img) {
                    continue;
                }
                seen.insert(img.clone(), positives.len());
                positives.push(img);
            }
        }
        let npos = positives.len();
        if 2 * npos > 128 {
            return Err(Error::Resource(format!("{ty}: more than 128 roots")));
        }
        let mut roots = positives.clone();
        roots.extend(positives.iter().map(|r| r.iter().map(Elem::neg).collect::<Vec<_>>()));
        let root_index: HashMap<Vec<Elem>, u16> =
            roots.iter().enumerate().map(|(i, r)| (r.clone(), i as u16)).collect();
        let nroots = roots.len();

        let gens: Vec<Vec<u16>> = (0..n)
            .map(|i| {
                roots
                    .iter()
                    .map(|r| {
                        root_index
                            .get(&reflect(&cartan, i, r))
                            .copied()
                            .ok_or_else(|| Error::Invariant(format!("{ty}: root system not closed")))
                    })
                    .collect::<Result<Vec<u16>>>()
            })
            .collect::<Result<_>>()?;

        let key_of = |perm: &[u16]| -> Key {
            let mut k = [u16::MAX; MAX_RANK];
            k[..n].copy_from_slice(&perm[..n]);
            k
        };
        let identity: Vec<u16> = (0..nroots as u16).collect();
        let mut perms: Vec<u16> = identity.clone();
        let mut words: Vec<Vec<u8>> = vec![vec![]];
        let mut index: HashMap<Key, u32> = HashMap::new();
        index.insert(key_of(&identity), 0);
        let mut head = 0;
        while head < words.len() {
            let w = perms[head * nroots..(head + 1) * nroots].to_vec();
            for (i, g) in gens.iter().enumerate() {
                let img: Vec<u16> = w.iter().map(|&r| g[r as usize]).collect();
                let key = key_of(&img);
                if index.contains_key(&key) {
                    continue;
                }
                index.insert(key, words.len() as u32);
                let mut word = vec![i as u8];
                word.extend_from_slice(&words[head]);
                words.push(word);
                perms.extend_from_slice(&img);
            }
            head += 1;
            if words.len() > ty.order() {
                return Err(Error::Invariant(format!("{ty}: more elements than |W| = {}", ty.order())));
            }
        }
        let order = words.len();
        if order != ty.order() {
            return Err(Error::Invariant(format!("{ty}: enumerated {order} elements, expected {}", ty.order())));
        }

        let mut lengths = Vec::with_capacity(order);
        let mut descents = Vec::with_capacity(order);
        let mut inverses = vec![0u32; order];
        for w in 0..order {
            let p = &perms[w * nroots..(w + 1) * nroots];
            lengths.push(p[..npos].iter().filter(|&&r| (r as usize) >= npos).count() as u32);
            let mut d = 0;
            for (i, &r) in p[..n].iter().enumerate() {
                if (r as usize) >= npos {
                    d |= 1 << i;
                }
            }
            descents.push(d);
            let mut inv = vec![0u16; nroots];
            for (r, &img) in p.iter().enumerate() {
                inv[img as usize] = r as u16;
            }
            inverses[w] = index[&key_of(&inv)];
        }
        let longest = (0..order)
            .find(|&w| descents[w] == (1 << n) - 1)
            .ok_or_else(|| Error::Invariant("no longest element".into()))?;

        let support = |r: &[Elem]| -> Subset {
            r.iter().enumerate().filter(|(_, c)| !c.is_zero()).fold(0, |m, (i, _)| m | 1 << i)
        };
        let supports: Vec<Subset> = roots.iter().map(|r| support(r)).collect();
        let parabolic_roots = (0..1u32 << n)
            .map(|k| {
                supports
                    .iter()
                    .enumerate()
                    .filter(|(_, &s)| s & !k == 0)
                    .fold(0 as RootSet, |m, (i, _)| m | (1 as RootSet) << i)
            })
            .collect();

        let exps = ty.exponents();
        let prod: usize = exps.iter().map(|&m| m as usize + 1).product();
        if prod != order {
            return Err(Error::Invariant(format!("{ty}: exponents do not multiply to |W|")));
        }

        Ok(CoxeterGroup {
            ty,
            field,
            cartan,
            roots,
            npos,
            root_index,
            perms,
            words,
            lengths,
            descents,
            inverses,
            index,
            longest,
            parabolic_roots,
            fix_dims: OnceLock::new(),
            classes: OnceLock::new(),
            mul_table: OnceLock::new(),
        })
    }

    pub fn coxeter_type(&self) -> CoxeterType {
        self.ty
    }

    pub fn label(&self) -> String {
        self.ty.to_string()
    }

    pub fn rank(&self) -> usize {
        self.ty.rank()
    }

    pub fn order(&self) -> usize {
        self.words.len()
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn cartan(&self) -> &[Vec<Elem>] {
        &self.cartan
    }

    pub fn exponents(&self) -> Vec<u32> {
        self.ty.exponents()
    }

    pub fn is_crystallographic(&self) -> bool {
        self.ty.is_crystallographic()
    }

    pub fn full_subset(&self) -> Subset {
        (1 << self.rank()) - 1
    }

    /// All roots; indices `< num_positive_roots()` are positive, and root
    /// `i + N` is the negative of root `i`.
    pub fn roots(&self) -> &[Vec<Elem>] {
        &self.roots
    }

    pub fn num_roots(&self) -> usize {
        self.roots.len()
    }

    pub fn num_positive_roots(&self) -> usize {
        self.npos
    }

    pub fn root_index(&self, coords: &[Elem]) -> Option<usize> {
        self.root_index.get(coords).map(|&i| i as usize)
    }

    pub fn is_positive_root(&self, r: usize) -> bool {
        r < self.npos
    }

    pub fn negate_root(&self, r: usize) -> usize {
        (r + self.npos) % (2 * self.npos)
    }

    /// The positive root among `±r`.
    pub fn abs_root(&self, r: usize) -> usize {
        r % self.npos
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn longest_element(&self) -> usize {
        self.longest
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order()
    }

    pub fn root_permutation(&self, w: usize) -> &[u16] {
        let m = self.roots.len();
        &self.perms[w * m..(w + 1) * m]
    }

    /// `w(r)` as a root index.
    pub fn act(&self, w: usize, r: usize) -> usize {
        self.perms[w * self.roots.len() + r] as usize
    }

    pub fn word(&self, w: usize) -> &[u8] {
        &self.words[w]
    }

    /// Reduced word with 1-based generator names, e.g. `"s1 s2"`.
    pub fn word_string(&self, w: usize) -> String {
        if self.words[w].is_empty() {
            return "e".into();
        }
        self.words[w].iter().map(|i| format!("s{}", i + 1)).collect::<Vec<_>>().join(" ")
    }

    pub fn length(&self, w: usize) -> u32 {
        self.lengths[w]
    }

    pub fn descent_set(&self, w: usize) -> Subset {
        self.descents[w]
    }

    pub fn descent_count(&self, w: usize) -> u32 {
        self.descents[w].count_ones()
    }

    pub fn inverse(&self, w: usize) -> usize {
        self.inverses[w] as usize
    }

    /// The element whose images of the simple roots are the given root indices.
    pub fn element_from_simple_images(&self, images: &[usize]) -> Option<usize> {
        if images.len() != self.rank() {
            return None;
        }
        let mut k = [u16::MAX; MAX_RANK];
        for (slot, &r) in k.iter_mut().zip(images) {
            *slot = r as u16;
        }
        self.index.get(&k).map(|&w| w as usize)
    }

    /// Product `a·b` (apply `b` first).
    pub fn mul(&self, a: usize, b: usize) -> usize {
        if let Some(t) = self.mul_table.get() {
            return t[a * self.order() + b] as usize;
        }
        let n = self.rank();
        let mut k = [u16::MAX; MAX_RANK];
        for (i, slot) in k.iter_mut().enumerate().take(n) {
            *slot = self.perms[a * self.roots.len() + self.act(b, i)];
        }
        self.index[&k] as usize
    }

    /// Materializes the multiplication table (|W|² entries); only sensible
    /// for groups of order at most a few thousand.
    pub fn multiplication_table(&self) -> &[u32] {
        self.mul_table.get_or_init(|| {
            let m = self.order();
            let mut t = vec![0u32; m * m];
            for a in 0..m {
                for b in 0..m {
                    t[a * m + b] = self.mul_uncached(a, b) as u32;
                }
            }
            t
        })
    }

    fn mul_uncached(&self, a: usize, b: usize) -> usize {
        let n = self.rank();
        let mut k = [u16::MAX; MAX_RANK];
        for (i, slot) in k.iter_mut().enumerate().take(n) {
            *slot = self.perms[a * self.roots.len() + self.act(b, i)];
        }
        self.index[&k] as usize
    }

    /// Roots (both signs) of the parabolic subgroup `W_K`.
    pub fn parabolic_root_set(&self, k: Subset) -> RootSet {
        self.parabolic_roots[k as usize]
    }

    /// Positive roots of `W_K` as a bitmask over positive root indices.
    pub fn parabolic_positive_roots(&self, k: Subset) -> u64 {
        (self.parabolic_roots[k as usize] & (((1 as RootSet) << self.npos) - 1)) as u64
    }

    /// Elements of `W_K`: those with a reduced word in the letters of `K`.
    pub fn parabolic_subgroup(&self, k: Subset) -> Vec<usize> {
        self.elements()
            .filter(|&w| self.words[w].iter().all(|&i| k & (1 << i) != 0))
            .collect()
    }

    pub fn parabolic_order(&self, k: Subset) -> usize {
        self.elements()
            .filter(|&w| self.words[w].iter().all(|&i| k & (1 << i) != 0))
            .count()
    }

    /// `|N_W(W_K)|`: `w W_K w⁻¹ = W_K` iff `w` maps each simple root of `K`
    /// into the root subsystem of `K`.
    pub fn normalizer_order(&self, k: Subset) -> usize {
        let phi = self.parabolic_roots[k as usize];
        let gens: Vec<usize> = (0..self.rank()).filter(|i| k & (1 << i) != 0).collect();
        self.elements()
            .filter(|&w| gens.iter().all(|&i| phi >> self.act(w, i) & 1 == 1))
            .count()
    }

    /// Simple roots that `w` maps to simple roots.
    pub fn simple_to_simple(&self, w: usize) -> Subset {
        (0..self.rank())
            .filter(|&i| self.act(w, i) < self.rank())
            .fold(0, |m, i| m | 1 << i)
    }

    /// `w(K)` when it is again a set of simple roots.
    pub fn image_subset(&self, w: usize, k: Subset) -> Option<Subset> {
        let mut out = 0;
        for i in 0..self.rank() {
            if k & (1 << i) != 0 {
                let r = self.act(w, i);
                if r >= self.rank() {
                    return None;
                }
                out |= 1 << r;
            }
        }
        Some(out)
    }

    /// Partition of all subsets of the simple roots into W-classes.
    pub fn subset_classes(&self) -> &[SimpleSubsetClass] {
        self.classes.get_or_init(|| {
            let n = self.rank();
            let total = 1usize << n;
            let mut parent: Vec<usize> = (0..total).collect();
            fn find(p: &mut [usize], x: usize) -> usize {
                let mut r = x;
                while p[r] != r {
                    r = p[r];
                }
                let mut y = x;
                while p[y] != r {
                    let next = p[y];
                    p[y] = r;
                    y = next;
                }
                r
            }
            let mut maps: HashMap<Vec<u16>, ()> = HashMap::new();
            for w in self.elements() {
                let img: Vec<u16> = (0..n).map(|i| self.act(w, i) as u16).collect();
                maps.insert(img, ());
            }
            for img in maps.keys() {
                let s2s = img.iter().enumerate().filter(|(_, &r)| (r as usize) < n).fold(0usize, |m, (i, _)| m | 1 << i);
                // every J ⊆ s2s is mapped onto a set of simple roots
                let mut j = s2s;
                loop {
                    let image = (0..n).filter(|i| j & (1 << i) != 0).fold(0usize, |m, i| m | 1 << img[i]);
                    let (a, b) = (find(&mut parent, j), find(&mut parent, image));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                    if j == 0 {
                        break;
                    }
                    j = (j - 1) & s2s;
                }
            }
            let mut groups: HashMap<usize, Vec<Subset>> = HashMap::new();
            for s in 0..total {
                let r = find(&mut parent, s);
                groups.entry(r).or_default().push(s as Subset);
            }
            let mut classes: Vec<SimpleSubsetClass> = groups
                .into_values()
                .map(|mut members| {
                    members.sort_by_key(|&m| (m.count_ones(), m));
                    SimpleSubsetClass {
                        representative: members[0],
                        size: members.len(),
                        rank: members[0].count_ones() as usize,
                        members,
                    }
                })
                .collect();
            classes.sort_by_key(|c| (c.rank, c.representative));
            classes
        })
    }

    /// Index into [`subset_classes`](Self::subset_classes) of the class of `k`.
    pub fn class_of(&self, k: Subset) -> usize {
        self.subset_classes()
            .iter()
            .position(|c| c.members.contains(&k))
            .expect("every subset lies in a class")
    }

    /// Dimension of the fixed space of `w`.
    pub fn fixed_space_dimension(&self, w: usize) -> usize {
        self.fixed_space_dimensions()[w] as usize
    }

    pub fn fixed_space_dimensions(&self) -> &[u8] {
        self.fix_dims.get_or_init(|| {
            let n = self.rank();
            self.elements()
                .map(|w| {
                    // Column j of the action matrix is w(α_j).
                    let rows: Vec<Vec<Elem>> = (0..n)
                        .map(|i| {
                            (0..n)
                                .map(|j| {
                                    let c = &self.roots[self.act(w, j)][i];
                                    if i == j {
                                        c.sub(&self.field.one())
                                    } else {
                                        c.clone()
                                    }
                                })
                                .collect()
                        })
                        .collect();
                    (n - linalg::rank(&rows)) as u8
                })
                .collect()
        })
    }

    /// Brute force: `w` is the unique shortest element of `wW_K`.
    pub fn min_coset_representative_test(&self, w: usize, k: Subset) -> bool {
        let lw = self.length(w);
        self.parabolic_subgroup(k)
            .into_iter()
            .filter(|&u| u != 0)
            .all(|u| self.length(self.mul(w, u)) > lw)
    }

    /// `w` is the minimal representative of `wW_K` iff `K ∩ Des(w) = ∅`.
    pub fn is_min_coset_rep(&self, w: usize, k: Subset) -> bool {
        self.descents[w] & k == 0
    }

    /// Minimal-length representative of the coset `wW_K`.
    pub fn min_coset_rep(&self, w: usize, k: Subset) -> usize {
        let mut w = w;
        loop {
            let d = self.descents[w] & k;
            if d == 0 {
                return w;
            }
            let i = d.trailing_zeros() as usize;
            w = self.mul(w, self.generator(i));
        }
    }

    /// The simple reflection `s_i`.
    pub fn generator(&self, i: usize) -> usize {
        let mut k = [u16::MAX; MAX_RANK];
        for (j, slot) in k.iter_mut().enumerate().take(self.rank()) {
            *slot = self.act_generator(i, j) as u16;
        }
        self.index[&k] as usize
    }

    fn act_generator(&self, i: usize, r: usize) -> usize {
        let img = reflect(&self.cartan, i, &self.roots[r]);
        self.root_index[&img] as usize
    }

    pub fn summary(&self) -> GroupSummary {
        let names = |s: Subset| -> Vec<usize> { (0..self.rank()).filter(|i| s & (1 << i) != 0).map(|i| i + 1).collect() };
        GroupSummary {
            type_label: self.label(),
            rank: self.rank(),
            order: self.order(),
            positive_roots: self.npos,
            exponents: self.exponents(),
            crystallographic: self.is_crystallographic(),
            bad_primes: self.ty.bad_primes(),
            field: self.field.name().to_string(),
            classes: self
                .subset_classes()
                .iter()
                .map(|c| ClassSummary {
                    representative: names(c.representative),
                    members: c.members.iter().map(|&m| names(m)).collect(),
                    size: c.size,
                    rank: c.rank,
                })
                .collect(),
        }
    }

    /// Primes dividing some coefficient of a root in the simple-root basis.
    pub fn root_coefficient_primes(&self) -> Option<Vec<u32>> {
        if !self.is_crystallographic() {
            return None;
        }
        let mut primes = vec![];
        for r in &self.roots[..self.npos] {
            for c in r {
                let v = c.as_rational()?.to_integer();
                let v: u32 = num_traits::ToPrimitive::to_u32(&v)?;
                for p in 2..=v {
                    if v.is_multiple_of(p) && (2..p).all(|q| p % q != 0) && !primes.contains(&p) {
                        primes.push(p);
                    }
                }
            }
        }
        primes.sort_unstable();
        Some(primes)
    }
}

/// Renders a subset as 1-based simple root indices.
pub fn subset_indices(s: Subset, rank: usize) -> Vec<usize> {
    (0..rank).filter(|i| s & (1 << i) != 0).map(|i| i + 1).collect()
}

/// All subsets of `{0..n}` ordered by cardinality, then lexicographically
/// on their sorted index lists.
pub fn subsets_by_size(n: usize) -> Vec<Subset> {
    let mut all: Vec<Subset> = (0..1u32 << n).collect();
    all.sort_by_key(|&s| (s.count_ones(), subset_indices(s, n)));
    all
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(label: &str) -> Arc<CoxeterGroup> {
        build_group_from_label(label, None).unwrap()
    }

    #[test]
    fn orders_and_exponents() {
        let g2 = g("G2");
        assert_eq!(g2.order(), 12);
        assert_eq!(g2.exponents(), vec![1, 5]);
        let h3 = g("H3");
        assert_eq!(h3.order(), 120);
        assert_eq!(h3.exponents(), vec![1, 5, 9]);
        let a2 = g("A2");
        assert_eq!(a2.order(), 6);
        assert_eq!(a2.num_roots(), 6);
        assert_eq!(a2.exponents(), vec![1, 2]);
    }

    #[test]
    fn unsupported_names_the_bound() {
        let e = CoxeterType::parse("A", Some(8)).unwrap_err().to_string();
        assert!(e.contains("n <= 7"), "{e}");
        assert!(CoxeterType::parse("E", Some(6)).is_err());
        assert!(CoxeterType::parse("I2(31)", None).is_err());
        assert_eq!(CoxeterType::parse("I2(7)", None).unwrap(), CoxeterType::I2(7));
        assert_eq!(CoxeterType::parse("b", Some(3)).unwrap(), CoxeterType::B(3));
    }

    #[test]
    fn descent_examples() {
        let a2 = g("A2");
        assert_eq!(a2.descent_set(a2.identity()), 0);
        assert_eq!(a2.descent_set(a2.longest_element()), 0b11);
        let s1 = a2.generator(0);
        assert_eq!(a2.descent_set(s1), 0b01);
    }

    #[test]
    fn parabolic_examples() {
        let a2 = g("A2");
        assert_eq!(a2.parabolic_subgroup(0), vec![0]);
        assert_eq!(a2.parabolic_subgroup(0b01).len(), 2);
        assert_eq!(g("G2").parabolic_subgroup(0b11).len(), 12);
    }

    #[test]
    fn normalizer_examples() {
        let a2 = g("A2");
        // Oracle: direct conjugation check over the six elements.
        let wk = a2.parabolic_subgroup(0b01);
        let brute = a2
            .elements()
            .filter(|&w| {
                let mut conj: Vec<usize> = wk.iter().map(|&u| a2.mul(a2.mul(w, u), a2.inverse(w))).collect();
                conj.sort_unstable();
                conj == wk
            })
            .count();
        assert_eq!(brute, 2);
        assert_eq!(a2.normalizer_order(0b01), 2);
        for w in [g("B3"), g("G2"), g("H3")] {
            assert_eq!(w.normalizer_order(0), w.order());
            assert_eq!(w.normalizer_order(w.full_subset()), w.order());
        }
    }

    #[test]
    fn class_examples() {
        let g2 = g("G2");
        assert_eq!(g2.subset_classes().len(), 4);
        assert!(g2.subset_classes().iter().all(|c| c.size == 1));
        let a2 = g("A2");
        let sizes: Vec<usize> = a2.subset_classes().iter().map(|c| c.size).collect();
        assert_eq!(sizes, vec![1, 2, 1]);
        assert_eq!(a2.subset_classes()[1].members, vec![0b01, 0b10]);
    }

    #[test]
    fn classes_agree_with_conjugation_oracle() {
        // J ~ K iff some w maps J onto K, tested by brute force on B3 and D4.
        for w in [g("B3"), g("D4"), g("A3")] {
            let n = w.rank();
            for j in 0..1u32 << n {
                for k in 0..1u32 << n {
                    let related = w.elements().any(|x| w.image_subset(x, j) == Some(k));
                    assert_eq!(related, w.class_of(j) == w.class_of(k), "{:?} {j} {k}", w);
                }
            }
        }
    }

    #[test]
    fn fixed_space_examples() {
        let a2 = g("A2");
        assert_eq!(a2.fixed_space_dimension(0), 2);
        for w in a2.elements() {
            if a2.length(w) % 2 == 1 {
                // the three reflections of S_3
                assert_eq!(a2.fixed_space_dimension(w), 1);
            }
        }
    }

    #[test]
    fn min_coset_rep_matches_descent_predicate_on_b3() {
        let b3 = g("B3");
        for w in b3.elements() {
            for k in 0..8 {
                assert_eq!(b3.min_coset_representative_test(w, k), b3.is_min_coset_rep(w, k));
            }
        }
        assert!(!b3.min_coset_representative_test(b3.longest_element(), 0b001));
    }

    #[test]
    fn b_and_c_share_the_group_but_not_the_roots() {
        let b = g("B3");
        let c = g("C3");
        assert_eq!(b.order(), c.order());
        assert_ne!(b.roots(), c.roots());
        let desc = |w: &CoxeterGroup| {
            let mut v: Vec<u32> = w.elements().map(|x| w.descent_set(x)).collect();
            v.sort_unstable();
            v
        };
        assert_eq!(desc(&b), desc(&c));
    }

    #[test]
    fn bad_primes_match_root_coefficients() {
        for label in ["A3", "B3", "C4", "D4", "D5", "G2", "F4"] {
            let w = g(label);
            assert_eq!(w.root_coefficient_primes(), w.coxeter_type().bad_primes(), "{label}");
        }
        assert_eq!(g("H3").root_coefficient_primes(), None);
    }
}
