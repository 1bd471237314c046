//! Exact linear algebra.
//!
//! Small systems (root data, lattice flats, μ/β inversion) use row echelon
//! forms over any [`Scalar`]. Large square matrices (group-algebra
//! multiplication, chamber walks) are stored as an integer matrix over a
//! common denominator; their characteristic polynomials are computed modulo
//! a sequence of 62-bit primes and lifted by CRT past a Gershgorin-type
//! coefficient bound, so the result is exact.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::field::Scalar;
use crate::poly::Poly;

/// Incrementally built reduced row echelon basis of a row space.
#[derive(Clone, Debug)]
pub struct Echelon<S: Scalar> {
    ncols: usize,
    rows: Vec<Vec<S>>,
    pivots: Vec<usize>,
}

impl<S: Scalar> Echelon<S> {
    pub fn new(ncols: usize) -> Self {
        Echelon { ncols, rows: vec![], pivots: vec![] }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<S>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Remainder of `v` after eliminating every pivot column.
    pub fn reduce(&self, v: &[S]) -> Vec<S> {
        let mut v = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if !v[p].is_nil() {
                let f = v[p].clone();
                for (x, r) in v.iter_mut().zip(row) {
                    if !r.is_nil() {
                        *x = x.minus(&f.times(r));
                    }
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[S]) -> bool {
        self.reduce(v).iter().all(|x| x.is_nil())
    }

    /// Adds `v` to the span; returns `false` if it was already there.
    pub fn insert(&mut self, v: &[S]) -> bool {
        debug_assert_eq!(v.len(), self.ncols);
        let r = self.reduce(v);
        let Some(p) = r.iter().position(|x| !x.is_nil()) else {
            return false;
        };
        let inv = r[p].one_like().over(&r[p]);
        let r: Vec<S> = r.iter().map(|x| x.times(&inv)).collect();
        for row in &mut self.rows {
            if !row[p].is_nil() {
                let f = row[p].clone();
                for (x, y) in row.iter_mut().zip(&r) {
                    if !y.is_nil() {
                        *x = x.minus(&f.times(y));
                    }
                }
            }
        }
        self.rows.push(r);
        self.pivots.push(p);
        true
    }
}

pub fn rank<S: Scalar>(rows: &[Vec<S>]) -> usize {
    let Some(first) = rows.first() else { return 0 };
    let mut e = Echelon::new(first.len());
    for r in rows {
        e.insert(r);
    }
    e.rank()
}

/// Basis of `{v : rows · v = 0}`, one vector per free column.
pub fn nullspace<S: Scalar>(rows: &[Vec<S>], ncols: usize, zero: &S) -> Vec<Vec<S>> {
    let mut e = Echelon::new(ncols);
    for r in rows {
        e.insert(r);
    }
    let one = zero.one_like();
    let mut out = vec![];
    for free in 0..ncols {
        if e.pivots.contains(&free) {
            continue;
        }
        let mut v = vec![zero.clone(); ncols];
        v[free] = one.clone();
        for (row, &p) in e.rows.iter().zip(&e.pivots) {
            v[p] = row[free].negated();
        }
        out.push(v);
    }
    out
}

/// Solves the square system given as augmented rows `[A | b]`.
pub fn solve_augmented<S: Scalar>(rows: Vec<Vec<S>>) -> Option<Vec<S>> {
    let n = rows.len();
    let mut e = Echelon::new(n + 1);
    for r in &rows {
        e.insert(r);
    }
    if e.rank() != n || e.pivots.contains(&n) {
        return None;
    }
    let zero = rows[0][0].zero_like();
    let mut x = vec![zero; n];
    for (row, &p) in e.rows.iter().zip(&e.pivots) {
        x[p] = row[n].clone();
    }
    Some(x)
}

/// One particular solution of `A v = b` (augmented rows), or `None` if inconsistent.
pub fn particular_solution<S: Scalar>(rows: &[Vec<S>], ncols: usize, zero: &S) -> Option<Vec<S>> {
    let mut e = Echelon::new(ncols + 1);
    for r in rows {
        e.insert(r);
    }
    if e.pivots.contains(&ncols) {
        return None;
    }
    let mut x = vec![zero.clone(); ncols];
    for (row, &p) in e.rows.iter().zip(&e.pivots) {
        x[p] = row[ncols].clone();
    }
    Some(x)
}

/// Dense exact rational matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix { rows, cols, data: vec![BigRational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = QMatrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigRational::one();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigRational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn mul(&self, o: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, o.rows);
        let mut out = QMatrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if !b.is_zero() {
                        out.data[i * o.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    /// Gauss–Jordan inverse over `Q`.
    pub fn inverse(&self) -> Result<QMatrix> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = QMatrix::identity(n);
        for col in 0..n {
            let piv = (col..n)
                .find(|&r| !a.get(r, col).is_zero())
                .ok_or_else(|| Error::Invariant("singular matrix".into()))?;
            if piv != col {
                for j in 0..n {
                    a.data.swap(piv * n + j, col * n + j);
                    inv.data.swap(piv * n + j, col * n + j);
                }
            }
            let p = a.get(col, col).recip();
            for j in 0..n {
                a.data[col * n + j] *= &p;
                inv.data[col * n + j] *= &p;
            }
            for r in 0..n {
                if r == col || a.get(r, col).is_zero() {
                    continue;
                }
                let f = a.get(r, col).clone();
                for j in 0..n {
                    let av = &f * a.get(col, j);
                    let iv = &f * inv.get(col, j);
                    a.data[r * n + j] -= av;
                    inv.data[r * n + j] -= iv;
                }
            }
        }
        Ok(inv)
    }

    /// Exact characteristic polynomial `det(tI - A)`.
    pub fn charpoly(&self) -> Result<Poly> {
        ScaledMatrix::from_rational(self.rows, &self.data)?.charpoly()
    }
}

/// Square matrix `num / denom` with `i64` numerators.
#[derive(Clone, Debug)]
pub struct ScaledMatrix {
    n: usize,
    denom: BigInt,
    num: Vec<i64>,
}

impl ScaledMatrix {
    /// Builds the matrix from row-major rational entries.
    pub fn from_rational(n: usize, entries: &[BigRational]) -> Result<Self> {
        assert_eq!(entries.len(), n * n);
        let denom = entries
            .iter()
            .fold(BigInt::one(), |acc, e| acc.lcm(e.denom()));
        let num = entries
            .iter()
            .map(|e| {
                (e.numer() * (&denom / e.denom()))
                    .to_i64()
                    .ok_or_else(|| Error::Resource("matrix numerator exceeds 64 bits".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ScaledMatrix { n, denom, num })
    }

    /// Builds `num / denom` from integer numerators (row-major).
    pub fn from_parts(n: usize, denom: BigInt, num: Vec<i64>) -> Self {
        assert_eq!(num.len(), n * n);
        ScaledMatrix { n, denom, num }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn denominator(&self) -> &BigInt {
        &self.denom
    }

    pub fn entry(&self, i: usize, j: usize) -> BigRational {
        BigRational::new(BigInt::from(self.num[i * self.n + j]), self.denom.clone())
    }

    pub fn trace(&self) -> BigRational {
        let t: BigInt = (0..self.n).map(|i| BigInt::from(self.num[i * self.n + i])).sum();
        BigRational::new(t, self.denom.clone())
    }

    pub fn row_sum(&self, i: usize) -> BigRational {
        let s: BigInt = self.num[i * self.n..(i + 1) * self.n].iter().map(|&v| BigInt::from(v)).sum();
        BigRational::new(s, self.denom.clone())
    }

    /// `num · v` for an integer vector.
    fn apply_num(&self, v: &[BigInt]) -> Vec<BigInt> {
        (0..self.n)
            .map(|i| {
                let row = &self.num[i * self.n..(i + 1) * self.n];
                let mut acc = BigInt::zero();
                for (a, x) in row.iter().zip(v) {
                    if *a != 0 && !x.is_zero() {
                        acc += x * *a;
                    }
                }
                acc
            })
            .collect()
    }

    /// Checks `∏ (A - λ_i I) v = 0` for an integer vector `v`.
    pub fn annihilates(&self, eigenvalues: &[BigRational], v: &[i64]) -> bool {
        let mut w: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x)).collect();
        for lam in eigenvalues {
            // b·num·w - a·denom·w is a nonzero multiple of (A - λ I) w.
            let a = lam.numer();
            let b = lam.denom();
            let shift = a * &self.denom;
            let aw = self.apply_num(&w);
            w = aw
                .into_iter()
                .zip(&w)
                .map(|(x, y)| x * b - &shift * y)
                .collect();
            let g = w.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
            if g.is_zero() {
                return true;
            }
            if !g.is_one() {
                for x in &mut w {
                    *x /= &g;
                }
            }
        }
        w.iter().all(|x| x.is_zero())
    }

    /// Exact characteristic polynomial, computed multimodularly.
    pub fn charpoly(&self) -> Result<Poly> {
        let ints = charpoly_integer(self.n, &self.num);
        // det(tI - num/D) = D^{-n} det(D t I - num)
        let d = BigRational::from_integer(self.denom.clone());
        let mut dk = BigRational::one();
        let dn = (0..self.n).fold(BigRational::one(), |acc, _| acc * &d);
        let mut coeffs = Vec::with_capacity(self.n + 1);
        for c in ints {
            coeffs.push(BigRational::from_integer(c) * &dk / &dn);
            dk *= &d;
        }
        Ok(Poly::new(coeffs))
    }
}

/// Characteristic polynomial `det(tI - A)` of an integer matrix, lowest degree first.
pub fn charpoly_integer(n: usize, a: &[i64]) -> Vec<BigInt> {
    if n == 0 {
        return vec![BigInt::one()];
    }
    // Every eigenvalue is bounded by the maximal absolute row sum R, so the
    // coefficients are bounded by (1 + R)^n.
    let r = (0..n)
        .map(|i| a[i * n..(i + 1) * n].iter().map(|x| BigInt::from(*x).abs()).sum::<BigInt>())
        .max()
        .unwrap_or_default();
    let bound = num_traits::pow(r + 1u32, n) * 2u32;
    let mut modulus = BigInt::one();
    let mut acc: Vec<BigInt> = vec![BigInt::zero(); n + 1];
    let mut p = 1u64 << 62;
    while modulus <= bound {
        p = prev_prime(p);
        let residues = charpoly_mod(n, a, p);
        let bp = BigInt::from(p);
        let m_inv = BigInt::from(mod_inv((&modulus % &bp).to_u64().expect("reduced"), p));
        for (c, r) in acc.iter_mut().zip(residues) {
            let diff = (BigInt::from(r) - (&*c % &bp)).mod_floor(&bp);
            let t = (diff * &m_inv).mod_floor(&bp);
            *c += &modulus * t;
        }
        modulus *= bp;
    }
    let half = &modulus >> 1usize;
    acc.into_iter()
        .map(|c| if c > half { c - &modulus } else { c })
        .collect()
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, p);
        }
        b = mul_mod(b, b, p);
        e >>= 1;
    }
    r
}

fn mod_inv(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn prev_prime(mut p: u64) -> u64 {
    loop {
        p -= 1;
        if is_prime(p) {
            return p;
        }
    }
}

/// Hessenberg reduction followed by the standard recurrence, modulo `p`.
fn charpoly_mod(n: usize, a: &[i64], p: u64) -> Vec<u64> {
    let mut h: Vec<u64> = a.iter().map(|&x| x.rem_euclid(p as i64) as u64).collect();
    let idx = |i: usize, j: usize| i * n + j;
    for m in 1..n.saturating_sub(1) {
        let Some(piv) = (m..n).find(|&i| h[idx(i, m - 1)] != 0) else {
            continue;
        };
        if piv != m {
            for j in 0..n {
                h.swap(idx(piv, j), idx(m, j));
            }
            for i in 0..n {
                h.swap(idx(i, piv), idx(i, m));
            }
        }
        let inv = mod_inv(h[idx(m, m - 1)], p);
        for i in m + 1..n {
            let u = mul_mod(h[idx(i, m - 1)], inv, p);
            if u == 0 {
                continue;
            }
            for j in 0..n {
                let t = mul_mod(u, h[idx(m, j)], p);
                h[idx(i, j)] = (h[idx(i, j)] + p - t) % p;
            }
            for j in 0..n {
                let t = mul_mod(u, h[idx(j, i)], p);
                h[idx(j, m)] = (h[idx(j, m)] + t) % p;
            }
        }
    }
    // polys[m] is the characteristic polynomial of the leading m×m block.
    let mut polys: Vec<Vec<u64>> = vec![vec![1]];
    for m in 1..=n {
        let mut next = vec![0u64; m + 1];
        let prev = &polys[m - 1];
        let diag = h[idx(m - 1, m - 1)];
        for (k, &c) in prev.iter().enumerate() {
            next[k + 1] = (next[k + 1] + c) % p;
            next[k] = (next[k] + p - mul_mod(diag, c, p)) % p;
        }
        let mut t = 1u64;
        for i in 1..m {
            t = mul_mod(t, h[idx(m - i, m - i - 1)], p);
            let coef = mul_mod(h[idx(m - 1 - i, m - 1)], t, p);
            if coef == 0 {
                continue;
            }
            for (k, &c) in polys[m - i - 1].iter().enumerate() {
                next[k] = (next[k] + p - mul_mod(coef, c, p)) % p;
            }
        }
        polys.push(next);
    }
    polys.pop().expect("n >= 1")
}

/// Faddeev–LeVerrier over `Q`; cubic in matrix products, used as an
/// independent oracle for small matrices.
pub fn charpoly_leverrier(m: &QMatrix) -> Poly {
    let n = m.rows();
    let mut coeffs = vec![BigRational::zero(); n + 1];
    coeffs[n] = BigRational::one();
    let mut mk = QMatrix::zeros(n, n);
    for k in 1..=n {
        // M_k = A·M_{k-1} + c_{n-k+1} I
        let mut next = m.mul(&mk);
        for i in 0..n {
            let v = next.get(i, i) + &coeffs[n - k + 1];
            next.set(i, i, v);
        }
        let am = m.mul(&next);
        let tr: BigRational = (0..n).map(|i| am.get(i, i).clone()).sum();
        coeffs[n - k] = -tr / BigRational::from_integer(BigInt::from(k as i64));
        mk = next;
    }
    Poly::new(coeffs)
}
