//! Dense univariate polynomials over `Q`, lowest degree first.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::field::int;

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<BigRational>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Poly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_ints(c: &[i64]) -> Poly {
        Poly::new(c.iter().map(|&v| int(v)).collect())
    }

    pub fn zero() -> Poly {
        Poly { coeffs: vec![] }
    }

    pub fn constant(c: BigRational) -> Poly {
        Poly::new(vec![c])
    }

    pub fn one() -> Poly {
        Poly::constant(BigRational::one())
    }

    /// `x^k`.
    pub fn monomial(k: usize) -> Poly {
        let mut c = vec![BigRational::zero(); k + 1];
        c[k] = BigRational::one();
        Poly { coeffs: c }
    }

    /// `a·x + b`.
    pub fn linear(a: BigRational, b: BigRational) -> Poly {
        Poly::new(vec![b, a])
    }

    /// `∏ (x - r)` over the given roots.
    pub fn from_roots<'a>(roots: impl IntoIterator<Item = &'a BigRational>) -> Poly {
        roots.into_iter().fold(Poly::one(), |acc, r| {
            &acc * &Poly::linear(BigRational::one(), -r.clone())
        })
    }

    /// `C(a·x + b, n) = (a·x + b)(a·x + b - 1)⋯(a·x + b - n + 1) / n!`.
    pub fn binomial_of_linear(a: &BigRational, b: &BigRational, n: usize) -> Poly {
        let mut acc = Poly::one();
        let mut fact = BigInt::one();
        for j in 0..n {
            acc = &acc * &Poly::linear(a.clone(), b - int(j as i64));
            fact *= BigInt::from(j + 1);
        }
        acc.scale(&BigRational::from_integer(fact).recip())
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> BigRational {
        self.coeffs.get(k).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    pub fn scale(&self, s: &BigRational) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Multiply by `x^k`.
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![BigRational::zero(); k];
        c.extend(self.coeffs.iter().cloned());
        Poly { coeffs: c }
    }

    pub fn pow(&self, k: usize) -> Poly {
        (0..k).fold(Poly::one(), |acc, _| &acc * self)
    }

    /// Exact division by `x - r`; `None` when `r` is not a root.
    pub fn div_linear(&self, r: &BigRational) -> Option<Poly> {
        if self.is_zero() {
            return Some(Poly::zero());
        }
        let n = self.coeffs.len();
        let mut q = vec![BigRational::zero(); n - 1];
        let mut carry = BigRational::zero();
        for k in (0..n).rev() {
            let v = &self.coeffs[k] + &carry * r;
            if k == 0 {
                return if v.is_zero() { Some(Poly::new(q)) } else { None };
            }
            q[k - 1] = v.clone();
            carry = v;
        }
        unreachable!()
    }

    /// Splits a monic polynomial into `∏(x - b_i)` with integer roots drawn
    /// from `candidates`; returns the roots with multiplicity if it splits.
    pub fn integer_roots(&self, candidates: impl IntoIterator<Item = i64> + Clone) -> Option<Vec<i64>> {
        let mut rest = self.clone();
        let mut roots = vec![];
        'outer: while rest.degree().unwrap_or(0) > 0 {
            for b in candidates.clone() {
                if let Some(q) = rest.div_linear(&int(b)) {
                    roots.push(b);
                    rest = q;
                    continue 'outer;
                }
            }
            return None;
        }
        if rest == Poly::one() {
            roots.sort_unstable();
            Some(roots)
        } else {
            None
        }
    }

    /// Coefficients rendered as exact fraction strings, lowest degree first.
    pub fn to_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(crate::format_rational).collect()
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})x")?,
                _ => write!(f, "({c})x^{k}")?,
            }
        }
        Ok(())
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + o.coeff(k)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) - o.coeff(k)).collect())
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![BigRational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly::new(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::rat;

    #[test]
    fn roots_and_evaluation() {
        let p = Poly::from_roots([int(1), int(5)].iter());
        assert_eq!(p, Poly::from_ints(&[5, -6, 1]));
        assert_eq!(p.eval(&int(5)), int(0));
        assert_eq!(p.integer_roots(1..=11), Some(vec![1, 5]));
        assert_eq!(Poly::from_ints(&[1, 0, 1]).integer_roots(-5..=5), None);
    }

    #[test]
    fn binomial_of_linear_matches_direct_values() {
        // C(x + 2, 3) at x = 4 is C(6,3) = 20.
        let b = Poly::binomial_of_linear(&int(1), &int(2), 3);
        assert_eq!(b.eval(&int(4)), int(20));
        // C((x-1)/2 + 2, 2) at x = 3 is C(3,2) = 3.
        let b = Poly::binomial_of_linear(&rat(1, 2), &rat(3, 2), 2);
        assert_eq!(b.eval(&int(3)), int(3));
    }

    #[test]
    fn div_linear_rejects_non_roots() {
        let p = Poly::from_ints(&[-1, 0, 1]);
        assert_eq!(p.div_linear(&int(1)), Some(Poly::from_ints(&[1, 1])));
        assert_eq!(p.div_linear(&int(2)), None);
    }
}
