//! Exact real number fields.
//!
//! Every field used here is `Q(θ)` with `θ = 2cos(π/m)` (or plain `Q`). An
//! element is stored as a coefficient vector in the power basis of `θ`,
//! reduced modulo the minimal polynomial. Signs are decided in the real
//! embedding that sends `θ` to `2cos(π/m)`, by interval evaluation on a
//! rational isolating interval for that root.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Field operations shared by [`BigRational`] and [`Elem`], used by the
/// generic echelon routines in [`crate::linalg`].
pub trait Scalar: Clone + PartialEq + fmt::Debug {
    fn is_nil(&self) -> bool;
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    /// Panics when `other` is zero.
    fn over(&self, other: &Self) -> Self;
    fn negated(&self) -> Self;
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
}

impl Scalar for BigRational {
    fn is_nil(&self) -> bool {
        Zero::is_zero(self)
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn over(&self, other: &Self) -> Self {
        self / other
    }
    fn negated(&self) -> Self {
        -self
    }
    fn zero_like(&self) -> Self {
        BigRational::zero()
    }
    fn one_like(&self) -> Self {
        BigRational::one()
    }
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `Q(θ)` together with a rational isolating interval for the chosen real root.
#[derive(Debug)]
pub struct NumberField {
    name: String,
    /// Monic minimal polynomial of θ, lowest degree first.
    minpoly: Vec<BigRational>,
    lo: BigRational,
    hi: BigRational,
}

impl PartialEq for NumberField {
    fn eq(&self, other: &Self) -> bool {
        self.minpoly == other.minpoly && self.lo <= other.hi && other.lo <= self.hi
    }
}

impl NumberField {
    pub fn rationals() -> Arc<Self> {
        Arc::new(NumberField {
            name: "Q".into(),
            minpoly: vec![BigRational::zero(), BigRational::one()],
            lo: BigRational::zero(),
            hi: BigRational::zero(),
        })
    }

    /// The field generated by `2cos(π/m)`, `m ≥ 2`.
    pub fn two_cos_pi_over(m: u32) -> Arc<Self> {
        assert!(m >= 2, "2cos(pi/m) needs m >= 2");
        let minpoly = two_cos_minpoly(m);
        let name = format!("Q(2cos(pi/{m}))");
        if minpoly.len() == 2 {
            let root = -minpoly[0].clone();
            return Arc::new(NumberField {
                name,
                minpoly,
                lo: root.clone(),
                hi: root,
            });
        }
        let approx = 2.0 * (std::f64::consts::PI / m as f64).cos();
        let mut lo = BigRational::from_float(approx - 1e-6).expect("finite");
        let mut hi = BigRational::from_float(approx + 1e-6).expect("finite");
        let s_lo = eval_rat(&minpoly, &lo).signum();
        let s_hi = eval_rat(&minpoly, &hi).signum();
        assert!(
            s_lo != s_hi && !s_lo.is_zero() && !s_hi.is_zero(),
            "isolating interval for 2cos(pi/{m}) is not a sign change"
        );
        // The other conjugates 2cos(kπ/m) are far further away than 1e-6
        // for m ≤ 30, so the interval isolates the designated root.
        let tiny = BigRational::new(BigInt::one(), BigInt::one() << 100usize);
        while &hi - &lo > tiny {
            let mid = (&lo + &hi) / int(2);
            let s_mid = eval_rat(&minpoly, &mid).signum();
            if s_mid.is_zero() {
                lo = mid.clone();
                hi = mid;
                break;
            }
            if s_mid == s_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Arc::new(NumberField { name, minpoly, lo, hi })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn degree(&self) -> usize {
        self.minpoly.len() - 1
    }

    pub fn minimal_polynomial(&self) -> &[BigRational] {
        &self.minpoly
    }

    pub fn elem(self: &Arc<Self>, q: BigRational) -> Elem {
        let mut coeffs = vec![BigRational::zero(); self.degree()];
        coeffs[0] = q;
        Elem { field: self.clone(), coeffs }
    }

    pub fn int(self: &Arc<Self>, n: i64) -> Elem {
        self.elem(int(n))
    }

    pub fn zero(self: &Arc<Self>) -> Elem {
        self.int(0)
    }

    pub fn one(self: &Arc<Self>) -> Elem {
        self.int(1)
    }

    /// The designated generator θ.
    pub fn generator(self: &Arc<Self>) -> Elem {
        if self.degree() == 1 {
            return self.elem(-self.minpoly[0].clone());
        }
        let mut coeffs = vec![BigRational::zero(); self.degree()];
        coeffs[1] = BigRational::one();
        Elem { field: self.clone(), coeffs }
    }

    /// Approximate value of θ in the designated embedding.
    pub fn generator_f64(&self) -> f64 {
        let mid = (&self.lo + &self.hi) / int(2);
        to_f64(&mid)
    }
}

/// An element of a [`NumberField`].
#[derive(Clone)]
pub struct Elem {
    field: Arc<NumberField>,
    coeffs: Vec<BigRational>,
}

impl PartialEq for Elem {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}
impl Eq for Elem {}

impl Hash for Elem {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state);
    }
}

impl fmt::Debug for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*t")?,
                _ => write!(f, "{c}*t^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl Elem {
    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn coefficients(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// The rational value when the element lies in `Q`.
    pub fn as_rational(&self) -> Option<&BigRational> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    fn reduce(field: &Arc<NumberField>, mut prod: Vec<BigRational>) -> Elem {
        let d = field.degree();
        let mp = &field.minpoly;
        while prod.len() > d {
            let top = prod.pop().expect("nonempty");
            if top.is_zero() {
                continue;
            }
            let shift = prod.len() - d;
            for (k, c) in mp[..d].iter().enumerate() {
                prod[shift + k] -= &top * c;
            }
        }
        prod.resize(d, BigRational::zero());
        Elem { field: field.clone(), coeffs: prod }
    }

    pub fn add(&self, o: &Elem) -> Elem {
        let coeffs = self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect();
        Elem { field: self.field.clone(), coeffs }
    }

    pub fn sub(&self, o: &Elem) -> Elem {
        let coeffs = self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a - b).collect();
        Elem { field: self.field.clone(), coeffs }
    }

    pub fn neg(&self) -> Elem {
        Elem {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|a| -a).collect(),
        }
    }

    pub fn mul(&self, o: &Elem) -> Elem {
        let d = self.coeffs.len();
        if d == 1 {
            return Elem {
                field: self.field.clone(),
                coeffs: vec![&self.coeffs[0] * &o.coeffs[0]],
            };
        }
        let mut prod = vec![BigRational::zero(); 2 * d - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        Elem::reduce(&self.field, prod)
    }

    pub fn scale(&self, q: &BigRational) -> Elem {
        Elem {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|a| a * q).collect(),
        }
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inv(&self) -> Elem {
        assert!(!self.is_zero(), "inverse of zero");
        let d = self.coeffs.len();
        if d == 1 {
            return Elem {
                field: self.field.clone(),
                coeffs: vec![self.coeffs[0].recip()],
            };
        }
        // Column k of the multiplication-by-self matrix is self * θ^k.
        let mut cols = Vec::with_capacity(d);
        let mut basis = self.field.one();
        let theta = self.field.generator();
        for _ in 0..d {
            cols.push(self.mul(&basis).coeffs);
            basis = basis.mul(&theta);
        }
        let rows: Vec<Vec<BigRational>> = (0..d)
            .map(|i| {
                let mut r: Vec<BigRational> = cols.iter().map(|c| c[i].clone()).collect();
                r.push(if i == 0 { BigRational::one() } else { BigRational::zero() });
                r
            })
            .collect();
        let sol = crate::linalg::solve_augmented(rows).expect("nonzero field element is invertible");
        Elem { field: self.field.clone(), coeffs: sol }
    }

    /// Sign in the designated real embedding.
    pub fn signum(&self) -> Ordering {
        if let Some(q) = self.as_rational() {
            return q.cmp(&BigRational::zero());
        }
        let f = &*self.field;
        let mut lo = f.lo.clone();
        let mut hi = f.hi.clone();
        let s_lo = eval_rat(&f.minpoly, &lo).signum();
        loop {
            let (a, b) = eval_interval(&self.coeffs, &lo, &hi);
            if a.is_positive() {
                return Ordering::Greater;
            }
            if b.is_negative() {
                return Ordering::Less;
            }
            if lo == hi {
                // θ is rational only in degree one, handled above.
                unreachable!("degenerate isolating interval");
            }
            let mid = (&lo + &hi) / int(2);
            let s_mid = eval_rat(&f.minpoly, &mid).signum();
            if s_mid == s_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    pub fn is_negative(&self) -> bool {
        self.signum() == Ordering::Less
    }

    pub fn to_f64(&self) -> f64 {
        let t = self.field.generator_f64();
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * t + to_f64(c))
    }
}

impl Scalar for Elem {
    fn is_nil(&self) -> bool {
        Elem::is_zero(self)
    }
    fn plus(&self, other: &Self) -> Self {
        self.add(other)
    }
    fn minus(&self, other: &Self) -> Self {
        self.sub(other)
    }
    fn times(&self, other: &Self) -> Self {
        self.mul(other)
    }
    fn over(&self, other: &Self) -> Self {
        self.mul(&other.inv())
    }
    fn negated(&self) -> Self {
        self.neg()
    }
    fn zero_like(&self) -> Self {
        self.field.zero()
    }
    fn one_like(&self) -> Self {
        self.field.one()
    }
}

pub fn to_f64(q: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or(f64::NAN)
}

fn eval_rat(p: &[BigRational], t: &BigRational) -> BigRational {
    p.iter().rev().fold(BigRational::zero(), |acc, c| acc * t + c)
}

/// Horner evaluation of `p` over the interval `[lo, hi]`.
fn eval_interval(p: &[BigRational], lo: &BigRational, hi: &BigRational) -> (BigRational, BigRational) {
    let mut a = BigRational::zero();
    let mut b = BigRational::zero();
    for c in p.iter().rev() {
        let cands = [&a * lo, &a * hi, &b * lo, &b * hi];
        let mut mn = cands[0].clone();
        let mut mx = cands[0].clone();
        for v in &cands[1..] {
            if *v < mn {
                mn = v.clone();
            }
            if *v > mx {
                mx = v.clone();
            }
        }
        a = mn + c;
        b = mx + c;
    }
    (a, b)
}

fn cyclotomic(n: u32) -> Vec<i64> {
    // z^n - 1 divided by Φ_d for every proper divisor d.
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in 1..n {
        if n.is_multiple_of(d) {
            num = div_exact(&num, &cyclotomic(d));
        }
    }
    num
}

fn div_exact(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let lead = *den.last().expect("nonempty");
    let mut q = vec![0i64; rem.len() - dd];
    for k in (0..q.len()).rev() {
        let c = rem[k + dd] / lead;
        q[k] = c;
        for (j, dc) in den.iter().enumerate() {
            rem[k + j] -= c * dc;
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    q
}

/// Minimal polynomial of `2cos(π/m)`, from the palindromic cyclotomic
/// polynomial `Φ_{2m}(z) = z^d Ψ(z + 1/z)`.
fn two_cos_minpoly(m: u32) -> Vec<BigRational> {
    let phi = cyclotomic(2 * m);
    let d = (phi.len() - 1) / 2;
    // D_k(t) with z^k + z^{-k} = D_k(z + 1/z).
    let mut dk: Vec<Vec<i64>> = vec![vec![2], vec![0, 1]];
    for k in 2..=d {
        let mut next = vec![0i64; k + 1];
        for (i, c) in dk[k - 1].iter().enumerate() {
            next[i + 1] += c;
        }
        for (i, c) in dk[k - 2].iter().enumerate() {
            next[i] -= c;
        }
        dk.push(next);
    }
    let mut psi = vec![0i64; d + 1];
    psi[0] = phi[d];
    for k in 1..=d {
        for (i, c) in dk[k].iter().enumerate() {
            psi[i] += phi[d + k] * c;
        }
    }
    debug_assert_eq!(psi[d], 1);
    psi.into_iter().map(int).collect()
}
