//! The descent algebra: descent-class sums `x_J`, the matrices `μ` and `β`,
//! the orthogonal idempotents `e_λ`, and the measure `M_{W,x} = Σ_λ e_λ / x^{‖λ‖}`.
//!
//! Every element of the descent algebra is a function of the descent set,
//! so coefficients are stored per descent set (`2^n` entries) rather than
//! per group element.

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::algebra::{GroupAlgebraElement, SignedMeasure, Spectrum, SymbolicMeasure};
use crate::coxeter::{subsets_by_size, CoxeterGroup, Subset};
use crate::error::{Error, Result};
use crate::linalg::QMatrix;
use crate::poly::Poly;

/// `x_J = Σ_{w : Des(w) ∩ J = ∅} w`.
pub fn x_basis(group: &Arc<CoxeterGroup>, j: Subset) -> GroupAlgebraElement {
    GroupAlgebraElement::from_fn(group, |w| {
        if group.descent_set(w) & j == 0 {
            BigRational::one()
        } else {
            BigRational::zero()
        }
    })
}

fn is_subset(a: Subset, b: Subset) -> bool {
    a & !b == 0
}

/// The matrices `μ_K^J` and `β = μ⁻¹`, rows indexed by `K`, columns by `J`.
#[derive(Clone, Debug)]
pub struct MuBeta {
    /// Row/column order: subsets by cardinality, then lexicographically.
    pub order: Vec<Subset>,
    pub mu: QMatrix,
    pub beta: QMatrix,
}

impl MuBeta {
    fn position(&self, s: Subset) -> usize {
        self.order.iter().position(|&t| t == s).expect("subset of the simple roots")
    }

    pub fn mu(&self, k: Subset, j: Subset) -> &BigRational {
        self.mu.get(self.position(k), self.position(j))
    }

    pub fn beta(&self, k: Subset, j: Subset) -> &BigRational {
        self.beta.get(self.position(k), self.position(j))
    }
}

/// Builds `μ` and inverts it exactly.
pub fn mu_beta(group: &CoxeterGroup) -> Result<MuBeta> {
    let n = group.rank();
    // Histogram of (Des(w), {simple roots w sends to simple roots}).
    let mut hist: HashMap<(Subset, Subset), u64> = HashMap::new();
    for w in group.elements() {
        *hist.entry((group.descent_set(w), group.simple_to_simple(w))).or_default() += 1;
    }
    let class_size: Vec<usize> = {
        let mut v = vec![0; 1 << n];
        for c in group.subset_classes() {
            for &m in &c.members {
                v[m as usize] = c.size;
            }
        }
        v
    };
    let order = subsets_by_size(n);
    let size = order.len();
    let mut mu = QMatrix::zeros(size, size);
    for (r, &k) in order.iter().enumerate() {
        for (c, &j) in order.iter().enumerate() {
            if !is_subset(k, j) {
                continue;
            }
            let count: u64 = hist
                .iter()
                .filter(|((d, s), _)| d & j == 0 && is_subset(k, *s))
                .map(|(_, &c)| c)
                .sum();
            mu.set(r, c, BigRational::new(BigInt::from(count), BigInt::from(class_size[k as usize])));
        }
    }
    let beta = mu.inverse().map_err(|_| Error::Invariant(format!("{}: μ is singular", group.label())))?;
    Ok(MuBeta { order, mu, beta })
}

/// The idempotents `e_λ` and the measure `M_{W,x}` for one group.
#[derive(Clone, Debug)]
pub struct DescentAlgebra {
    group: Arc<CoxeterGroup>,
    mu_beta: MuBeta,
    /// `coeffs[λ][D]`: coefficient of `e_λ` at any element with descent set `D`.
    coeffs: Vec<Vec<BigRational>>,
}

impl DescentAlgebra {
    pub fn new(group: &Arc<CoxeterGroup>) -> Result<Self> {
        let mb = mu_beta(group)?;
        let n = group.rank();
        let classes = group.subset_classes();
        let mut coeffs = Vec::with_capacity(classes.len());
        for class in classes {
            // Σ_{J∈λ} Σ_{K⊆J} β_K^J x_K, then divide by |λ|.
            let mut by_k = vec![BigRational::zero(); 1 << n];
            for &j in &class.members {
                let mut k = j;
                loop {
                    by_k[k as usize] += mb.beta(k, j);
                    if k == 0 {
                        break;
                    }
                    k = (k - 1) & j;
                }
            }
            let scale = BigRational::new(BigInt::one(), BigInt::from(class.size));
            let row: Vec<BigRational> = (0..1u32 << n)
                .map(|d| {
                    let s: BigRational = (0..1u32 << n)
                        .filter(|&k| k & d == 0)
                        .map(|k| &by_k[k as usize])
                        .sum();
                    s * &scale
                })
                .collect();
            coeffs.push(row);
        }
        Ok(DescentAlgebra { group: group.clone(), mu_beta: mb, coeffs })
    }

    pub fn group(&self) -> &Arc<CoxeterGroup> {
        &self.group
    }

    pub fn mu_beta(&self) -> &MuBeta {
        &self.mu_beta
    }

    /// Coefficient of `e_λ` (class index into `subset_classes`) on descent set `d`.
    pub fn idempotent_coefficient(&self, class: usize, d: Subset) -> &BigRational {
        &self.coeffs[class][d as usize]
    }

    pub fn idempotent(&self, class: usize) -> GroupAlgebraElement {
        let g = &self.group;
        GroupAlgebraElement::from_fn(g, |w| self.coeffs[class][g.descent_set(w) as usize].clone())
    }

    /// Expresses `e_λ` in the `x_K` basis: `(K, coefficient)` for nonzero coefficients.
    pub fn idempotent_in_x_basis(&self, class: usize) -> Vec<(Subset, BigRational)> {
        let c = &self.group.subset_classes()[class];
        let n = self.group.rank();
        let mut by_k = vec![BigRational::zero(); 1 << n];
        for &j in &c.members {
            for k in 0..1u32 << n {
                if is_subset(k, j) {
                    by_k[k as usize] += self.mu_beta.beta(k, j);
                }
            }
        }
        let scale = BigRational::new(BigInt::one(), BigInt::from(c.size));
        subsets_by_size(n)
            .into_iter()
            .filter(|&k| !by_k[k as usize].is_zero())
            .map(|k| (k, &by_k[k as usize] * &scale))
            .collect()
    }

    /// `M_{W,x}` with numerators `p_D(x) = Σ_λ c_λ(D) x^{n - ‖λ‖}` over `x^n`.
    pub fn measure_symbolic(&self) -> SymbolicMeasure {
        let n = self.group.rank();
        let classes = self.group.subset_classes();
        let numerators = (0..1usize << n)
            .map(|d| {
                let mut coeffs = vec![BigRational::zero(); n + 1];
                for (ci, class) in classes.iter().enumerate() {
                    coeffs[n - class.rank] += &self.coeffs[ci][d];
                }
                Poly::new(coeffs)
            })
            .collect();
        SymbolicMeasure::new(self.group.clone(), numerators)
    }

    pub fn measure(&self, x: &BigRational) -> Result<SignedMeasure> {
        self.measure_symbolic().eval(x)
    }
}

/// `M_{W,x}` evaluated at a nonzero rational.
pub fn measure_m(group: &Arc<CoxeterGroup>, x: &BigRational) -> Result<SignedMeasure> {
    if x.is_zero() {
        return Err(Error::Domain("the parameter x must be nonzero".into()));
    }
    DescentAlgebra::new(group)?.measure(x)
}

/// `M_{W,x}` as exact polynomials over `x^n`.
pub fn measure_m_symbolic(group: &Arc<CoxeterGroup>) -> Result<SymbolicMeasure> {
    Ok(DescentAlgebra::new(group)?.measure_symbolic())
}

/// Eigenvalues `x^{-i}` of multiplication by `M_{W,x}`, `0 ≤ i ≤ n`, with
/// multiplicity the number of elements whose fixed space has dimension `n - i`.
pub fn spectrum_m(group: &CoxeterGroup, x: &BigRational) -> Result<Spectrum> {
    if x.is_zero() {
        return Err(Error::Domain("the parameter x must be nonzero".into()));
    }
    Ok(Spectrum::powers_of_inverse(x, &fixed_space_profile(group)))
}

/// `profile[i] = #{w : dim Fix(w) = n - i}`.
pub fn fixed_space_profile(group: &CoxeterGroup) -> Vec<usize> {
    let n = group.rank();
    let mut mult = vec![0usize; n + 1];
    for &d in group.fixed_space_dimensions() {
        mult[n - d as usize] += 1;
    }
    mult
}

/// Closed forms for the values at the identity and at the longest element:
/// `∏(x + m_i) / (x^n |W|)` and `∏(x - m_i) / (x^n |W|)`, as numerators over `x^n`.
pub fn endpoint_numerators(group: &CoxeterGroup) -> (Poly, Poly) {
    let w = BigRational::new(BigInt::one(), BigInt::from(group.order()));
    let exps = group.exponents();
    let plus = exps.iter().fold(Poly::one(), |acc, &m| &acc * &Poly::from_ints(&[m as i64, 1]));
    let minus = exps.iter().fold(Poly::one(), |acc, &m| &acc * &Poly::from_ints(&[-(m as i64), 1]));
    (plus.scale(&w), minus.scale(&w))
}

/// Endpoint values at a nonzero rational `x`.
pub fn endpoint_values(group: &CoxeterGroup, x: &BigRational) -> Result<(BigRational, BigRational)> {
    if x.is_zero() {
        return Err(Error::Domain("the parameter x must be nonzero".into()));
    }
    let (p, q) = endpoint_numerators(group);
    let xn = num_traits::pow(x.clone(), group.rank());
    Ok((p.eval(x) / &xn, q.eval(x) / xn))
}
