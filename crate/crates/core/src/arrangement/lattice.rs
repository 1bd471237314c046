//! Intersection lattices, ordered by reverse inclusion.
//!
//! A flat is identified by the set of hyperplanes containing it (a bitmask);
//! `X ≤ Y` iff `mask(X) ⊆ mask(Y)`. The ambient space has the empty mask.

use std::collections::{HashMap, VecDeque};

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::{Arrangement, ArrangementKind};
use crate::coxeter::CoxeterGroup;
use crate::error::{Error, Result};
use crate::field::Elem;
use crate::linalg::Echelon;
use crate::poly::Poly;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeNode {
    /// Hyperplanes containing the flat.
    pub mask: u64,
    pub dim: usize,
    /// For reflection arrangements, the index of the class of simple-root
    /// subsets `K` with this flat in the W-orbit of `Fix(W_K)`.
    pub class: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct IntersectionLattice {
    dim: usize,
    num_hyperplanes: usize,
    nodes: Vec<LatticeNode>,
    index: HashMap<u64, usize>,
    chi: Vec<Poly>,
    mobius_bottom: Vec<i64>,
}

impl IntersectionLattice {
    /// Builds the lattice appropriate to the arrangement's kind.
    pub fn new(arr: &Arrangement) -> Result<Self> {
        match arr.kind() {
            ArrangementKind::Reflection(g) => Ok(IntersectionLattice::reflection(g)),
            ArrangementKind::Generic => IntersectionLattice::by_linear_algebra(arr),
        }
    }

    /// Lattice of a reflection arrangement from group data: the flats are
    /// the W-translates of the fixed spaces `Fix(W_K)`, and the flat
    /// `w·Fix(W_K)` lies on exactly the hyperplanes of the roots `w(Φ_K)`.
    pub fn reflection(group: &CoxeterGroup) -> Self {
        let n = group.rank();
        let npos = group.num_positive_roots();
        let gens: Vec<Vec<usize>> = (0..n)
            .map(|i| {
                let s = group.generator(i);
                (0..npos).map(|r| group.abs_root(group.act(s, r))).collect()
            })
            .collect();
        let apply = |perm: &[usize], mask: u64| -> u64 {
            let mut out = 0u64;
            let mut m = mask;
            while m != 0 {
                let r = m.trailing_zeros() as usize;
                m &= m - 1;
                out |= 1 << perm[r];
            }
            out
        };
        let mut nodes = vec![];
        let mut seen: HashMap<u64, usize> = HashMap::new();
        for (ci, class) in group.subset_classes().iter().enumerate() {
            let start = group.parabolic_positive_roots(class.representative);
            let dim = n - class.rank;
            let mut queue = VecDeque::from([start]);
            seen.insert(start, ci);
            nodes.push(LatticeNode { mask: start, dim, class: Some(ci) });
            while let Some(m) = queue.pop_front() {
                for g in &gens {
                    let img = apply(g, m);
                    if let Some(&other) = seen.get(&img) {
                        assert_eq!(other, ci, "a flat lies in two W-orbits");
                        continue;
                    }
                    seen.insert(img, ci);
                    nodes.push(LatticeNode { mask: img, dim, class: Some(ci) });
                    queue.push_back(img);
                }
            }
        }
        let mut lat = IntersectionLattice::assemble(n, npos, nodes);
        // χ is constant on W-orbits; compute it once per class.
        let classes = group.subset_classes();
        let mut class_chi = vec![Poly::zero(); classes.len()];
        for (ci, class) in classes.iter().enumerate() {
            let node = lat.index[&group.parabolic_positive_roots(class.representative)];
            class_chi[ci] = lat.chi_by_mobius(node);
        }
        lat.chi = lat.nodes.iter().map(|nd| class_chi[nd.class.unwrap()].clone()).collect();
        lat
    }

    /// Lattice by exact linear algebra on the hyperplane equations; handles
    /// non-central arrangements (empty intersections are dropped).
    pub fn by_linear_algebra(arr: &Arrangement) -> Result<Self> {
        let n = arr.dim();
        let m = arr.num_hyperplanes();
        if m > 64 {
            return Err(Error::Resource("more than 64 hyperplanes".into()));
        }
        let row = |i: usize| -> Vec<Elem> {
            let mut r = arr.normal(i).to_vec();
            r.push(arr.offset(i).clone());
            r
        };
        let rows: Vec<Vec<Elem>> = (0..m).map(row).collect();
        let mut nodes = vec![LatticeNode { mask: 0, dim: n, class: None }];
        let mut systems: Vec<Echelon<Elem>> = vec![Echelon::new(n + 1)];
        let mut seen: HashMap<u64, usize> = HashMap::from([(0, 0)]);
        let mut head = 0;
        while head < nodes.len() {
            let mask = nodes[head].mask;
            for h in 0..m {
                if mask & (1 << h) != 0 {
                    continue;
                }
                let mut e = systems[head].clone();
                e.insert(&rows[h]);
                if e.pivots().contains(&n) {
                    continue; // empty intersection
                }
                let closure = (0..m).filter(|&j| e.contains(&rows[j])).fold(0u64, |acc, j| acc | 1 << j);
                if seen.contains_key(&closure) {
                    continue;
                }
                seen.insert(closure, nodes.len());
                nodes.push(LatticeNode { mask: closure, dim: n - e.rank(), class: None });
                systems.push(e);
            }
            head += 1;
        }
        let mut lat = IntersectionLattice::assemble(n, m, nodes);
        lat.chi = (0..lat.nodes.len()).map(|i| lat.chi_by_mobius(i)).collect();
        Ok(lat)
    }

    fn assemble(dim: usize, num_hyperplanes: usize, mut nodes: Vec<LatticeNode>) -> Self {
        nodes.sort_by(|a, b| b.dim.cmp(&a.dim).then(a.mask.count_ones().cmp(&b.mask.count_ones())).then(a.mask.cmp(&b.mask)));
        let index = nodes.iter().enumerate().map(|(i, nd)| (nd.mask, i)).collect();
        let mut lat = IntersectionLattice { dim, num_hyperplanes, nodes, index, chi: vec![], mobius_bottom: vec![] };
        let up = lat.mobius_up(0);
        let mut bottom = vec![0i64; lat.nodes.len()];
        for (z, mu) in up {
            bottom[z] = mu;
        }
        lat.mobius_bottom = bottom;
        lat
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_hyperplanes(&self) -> usize {
        self.num_hyperplanes
    }

    pub fn nodes(&self) -> &[LatticeNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Node index of the flat contained in exactly the hyperplanes `mask`.
    pub fn node_of_mask(&self, mask: u64) -> Option<usize> {
        self.index.get(&mask).copied()
    }

    /// The ambient space, always node 0.
    pub fn top(&self) -> usize {
        0
    }

    /// `X ≤ Y` in reverse inclusion.
    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.nodes[x].mask & !self.nodes[y].mask == 0
    }

    /// `μ(Y, Z)` for every `Z ≥ Y`, by the defining recursion.
    pub fn mobius_up(&self, y: usize) -> Vec<(usize, i64)> {
        let ym = self.nodes[y].mask;
        // nodes are sorted by decreasing dimension, so U < Z implies U first
        let up: Vec<usize> = (0..self.nodes.len()).filter(|&z| self.nodes[z].mask & ym == ym).collect();
        let mut mu: Vec<i64> = Vec::with_capacity(up.len());
        for (a, &z) in up.iter().enumerate() {
            if z == y {
                mu.push(1);
                continue;
            }
            let zm = self.nodes[z].mask;
            let mut s = 0i64;
            for b in 0..a {
                let um = self.nodes[up[b]].mask;
                if um & !zm == 0 {
                    s += mu[b];
                }
            }
            mu.push(-s);
        }
        up.into_iter().zip(mu).collect()
    }

    /// `μ(X, Y)`, zero unless `X ≤ Y`.
    pub fn mobius(&self, x: usize, y: usize) -> i64 {
        if !self.leq(x, y) {
            return 0;
        }
        self.mobius_up(x).into_iter().find(|&(z, _)| z == y).map(|(_, m)| m).unwrap_or(0)
    }

    /// `μ(V, X)`.
    pub fn mobius_from_top(&self, x: usize) -> i64 {
        self.mobius_bottom[x]
    }

    fn chi_by_mobius(&self, y: usize) -> Poly {
        let mut coeffs = vec![0i64; self.nodes[y].dim + 1];
        for (z, mu) in self.mobius_up(y) {
            coeffs[self.nodes[z].dim] += mu;
        }
        Poly::from_ints(&coeffs)
    }

    /// `χ(L^Y, x) = Σ_{Z ≥ Y} μ(Y, Z) x^{dim Z}`.
    pub fn char_poly(&self, y: usize) -> &Poly {
        &self.chi[y]
    }

    /// `(-1)^{dim Y} χ(L^Y, -1)`, the number of faces with support `Y`.
    pub fn zero_map_fiber_size(&self, y: usize) -> usize {
        let v = self.chi[y].eval(&crate::field::int(-1));
        let v = if self.nodes[y].dim.is_multiple_of(2) { v } else { -v };
        assert!(v.is_integer() && v > BigRational::zero(), "fiber size must be a positive integer");
        v.to_integer().to_usize().expect("fiber size fits in usize")
    }

    /// `Σ_{dim X = n-i} |μ(V, X)|` for `i = 0..=n`.
    pub fn mobius_profile(&self) -> Vec<usize> {
        let mut out = vec![0usize; self.dim + 1];
        for (x, nd) in self.nodes.iter().enumerate() {
            out[self.dim - nd.dim] += self.mobius_bottom[x].unsigned_abs() as usize;
        }
        out
    }

    /// Strict up-set `{Y : Y > X}`.
    pub fn strictly_above(&self, x: usize) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&y| y != x && self.leq(x, y)).collect()
    }

    /// Roots of `χ(L^Y, x)` if it splits over the integers.
    pub fn char_poly_integer_roots(&self, y: usize) -> Option<Vec<i64>> {
        let bound = self.num_hyperplanes as i64;
        self.chi[y].integer_roots(-bound..=bound)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::{sample_generic_arrangements, Arrangement};
    use crate::coxeter::build_group_from_label;
    use std::collections::HashSet;

    fn reflection(label: &str) -> (Arrangement, IntersectionLattice) {
        let g = build_group_from_label(label, None).unwrap();
        let a = Arrangement::reflection(&g);
        let l = IntersectionLattice::reflection(&g);
        (a, l)
    }

    #[test]
    fn boolean_lattice() {
        let (_, a) = sample_generic_arrangements().into_iter().next().unwrap();
        let l = IntersectionLattice::new(&a).unwrap();
        assert_eq!(l.len(), 4);
        let mu: Vec<i64> = (0..4).map(|x| l.mobius_from_top(x)).collect();
        assert_eq!(mu, vec![1, -1, -1, 1]);
        assert_eq!(*l.char_poly(0), Poly::from_ints(&[1, -2, 1]));
        assert_eq!(l.zero_map_fiber_size(0), 4);
    }

    #[test]
    fn braid_a2_lattice() {
        let (_, l) = reflection("A2");
        assert_eq!(l.len(), 5);
        let origin = l.nodes().iter().position(|n| n.dim == 0).unwrap();
        assert_eq!(l.mobius_from_top(origin), 2);
        assert_eq!(*l.char_poly(0), Poly::from_ints(&[2, -3, 1]));
        let line = l.nodes().iter().position(|n| n.dim == 1).unwrap();
        assert_eq!(*l.char_poly(line), Poly::from_ints(&[-1, 1]));
        assert_eq!(*l.char_poly(origin), Poly::from_ints(&[1]));
        assert_eq!(l.zero_map_fiber_size(0), 6);
        assert_eq!(l.zero_map_fiber_size(origin), 1);
    }

    #[test]
    fn g2_characteristic_polynomial() {
        let (_, l) = reflection("G2");
        assert_eq!(*l.char_poly(0), Poly::from_ints(&[5, -6, 1]));
    }

    #[test]
    fn group_theoretic_lattice_matches_linear_algebra() {
        for label in ["A2", "A3", "B3", "G2", "H3", "D4", "I2(7)"] {
            let (a, l) = reflection(label);
            let lin = IntersectionLattice::by_linear_algebra(&a).unwrap();
            let masks = |l: &IntersectionLattice| l.nodes().iter().map(|n| (n.mask, n.dim)).collect::<HashSet<_>>();
            assert_eq!(masks(&l), masks(&lin), "{label}");
            for x in 0..l.len() {
                let y = lin.node_of_mask(l.nodes()[x].mask).unwrap();
                assert_eq!(l.char_poly(x), lin.char_poly(y), "{label}");
            }
        }
    }

    #[test]
    fn mobius_recursion_holds() {
        for (_, a) in sample_generic_arrangements() {
            let l = IntersectionLattice::new(&a).unwrap();
            for x in 0..l.len() {
                for y in 0..l.len() {
                    if x != y && l.leq(x, y) {
                        let s: i64 = (0..l.len()).filter(|&z| l.leq(x, z) && l.leq(z, y)).map(|z| l.mobius(z, y)).sum();
                        assert_eq!(s, 0);
                    }
                }
            }
        }
    }

    #[test]
    fn triangle_is_non_central() {
        let (_, a) = sample_generic_arrangements().into_iter().find(|(n, _)| *n == "triangle").unwrap();
        let l = IntersectionLattice::new(&a).unwrap();
        // V, three lines, three points; no common point
        assert_eq!(l.len(), 7);
        assert_eq!(*l.char_poly(0), Poly::from_ints(&[3, -3, 1]));
        // 7 regions in the plane cut by three lines in general position
        assert_eq!(l.zero_map_fiber_size(0), 7);
    }
}
