//! Sparse multivariate polynomials over `Q` in the generators
//! `h = t^{1/2}, x₁..x_n, r`, reduced modulo `r² = Σ xᵢ²`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::collections::BTreeMap;

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qr(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Exponent vector `[h, x₁, .., x_n, r]`.
pub type Monomial = Vec<u32>;

/// Graded order: total degree first, then lexicographic.
pub fn grlex(a: &Monomial, b: &Monomial) -> Ordering {
    let da: u32 = a.iter().sum();
    let db: u32 = b.iter().sum();
    da.cmp(&db).then_with(|| a.cmp(b))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    n: usize,
    terms: BTreeMap<Monomial, Q>,
}

impl Poly {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, c: Q) -> Self {
        let mut p = Self::zero(n);
        if !c.is_zero() {
            p.terms.insert(vec![0; n + 2], c);
        }
        p
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, Q::one())
    }

    pub fn monomial(n: usize, exps: Monomial, c: Q) -> Self {
        assert_eq!(exps.len(), n + 2, "monomial arity");
        let mut p = Self::zero(n);
        if !c.is_zero() {
            p.terms.insert(exps, c);
        }
        p.reduce()
    }

    /// `h^k`, i.e. `t^{k/2}`.
    pub fn h_pow(n: usize, k: u32) -> Self {
        let mut e = vec![0; n + 2];
        e[0] = k;
        Self::monomial(n, e, Q::one())
    }

    /// `xᵢ` for `i` in `1..=n`.
    pub fn x(n: usize, i: usize) -> Self {
        let mut e = vec![0; n + 2];
        e[i] = 1;
        Self::monomial(n, e, Q::one())
    }

    /// `r = |x|`; in one dimension the region `x₁ > 0` is used, so `r = x₁`.
    pub fn r(n: usize) -> Self {
        if n == 1 {
            return Self::x(1, 1);
        }
        let mut e = vec![0; n + 2];
        e[n + 1] = 1;
        Self::monomial(n, e, Q::one())
    }

    /// `Σ xᵢ²`.
    pub fn r2(n: usize) -> Self {
        (1..=n).fold(Self::zero(n), |acc, i| acc.add(&Self::x(n, i).mul(&Self::x(n, i))))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Q)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Constant value, if the polynomial has no variables.
    pub fn as_constant(&self) -> Option<Q> {
        match self.terms.len() {
            0 => Some(Q::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().expect("one term");
                m.iter().all(|&e| e == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn r_degree(&self) -> u32 {
        self.terms.keys().map(|m| m[self.n + 1]).max().unwrap_or(0)
    }

    fn insert(&mut self, m: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Rewrite `r²` as `Σ xᵢ²` until the `r`-degree is at most one.
    fn reduce(self) -> Self {
        let n = self.n;
        if self.r_degree() < 2 {
            return self;
        }
        let mut out = Self::zero(n);
        for (m, c) in self.terms {
            let k = m[n + 1];
            let mut base = m.clone();
            base[n + 1] = k % 2;
            let mut p = Self::zero(n);
            p.insert(base, c);
            for _ in 0..k / 2 {
                p = p.mul_raw(&Self::r2(n));
            }
            for (m2, c2) in p.terms {
                out.insert(m2, c2);
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Q::one())
    }

    pub fn scale(&self, c: &Q) -> Self {
        let mut out = Self::zero(self.n);
        if c.is_zero() {
            return out;
        }
        for (m, v) in &self.terms {
            out.terms.insert(m.clone(), v * c);
        }
        out
    }

    fn mul_raw(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.n);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m: Monomial = ma.iter().zip(mb).map(|(a, b)| a + b).collect();
                out.insert(m, ca * cb);
            }
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.mul_raw(other).reduce()
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one(self.n);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Formal partial derivative in generator `v` (0 = h, `1..=n` = x, `n+1` = r).
    pub fn formal_derivative(&self, v: usize) -> Self {
        let mut out = Self::zero(self.n);
        for (m, c) in &self.terms {
            if m[v] == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2[v] -= 1;
            out.insert(m2, c * q(i64::from(m[v])));
        }
        out
    }

    /// Split `A + B·r` with `A`, `B` free of `r`.
    pub fn split_r(&self) -> (Self, Self) {
        let n = self.n;
        let (mut a, mut b) = (Self::zero(n), Self::zero(n));
        for (m, c) in &self.terms {
            let mut m2 = m.clone();
            match m[n + 1] {
                0 => a.insert(m2, c.clone()),
                1 => {
                    m2[n + 1] = 0;
                    b.insert(m2, c.clone());
                }
                _ => unreachable!("reduced polynomials have r-degree ≤ 1"),
            }
        }
        (a, b)
    }

    /// Leading term in graded order.
    pub fn leading(&self) -> Option<(&Monomial, &Q)> {
        self.terms.iter().max_by(|a, b| grlex(a.0, b.0))
    }

    /// Exact quotient `self / d`, if `d` divides `self` with `r` treated as
    /// a free variable (sufficient when `d` is free of `r`).
    pub fn exact_div(&self, d: &Self) -> Option<Self> {
        if d.is_zero() {
            return None;
        }
        let (dm, dc) = d.terms.iter().next_back().map(|(m, c)| (m.clone(), c.clone()))?;
        let mut rem = self.clone();
        let mut quot = Self::zero(self.n);
        while let Some((rm, rc)) = rem.terms.iter().next_back().map(|(m, c)| (m.clone(), c.clone())) {
            if rm.iter().zip(&dm).any(|(a, b)| a < b) {
                return None;
            }
            let qm: Monomial = rm.iter().zip(&dm).map(|(a, b)| a - b).collect();
            let qc = rc / &dc;
            let mut t = Self::zero(self.n);
            t.insert(qm.clone(), qc.clone());
            quot.insert(qm, qc);
            rem = rem.sub(&t.mul_raw(d));
        }
        Some(quot)
    }

    /// Greatest common monomial divisor.
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else {
            return vec![0; self.n + 2];
        };
        let mut g = first.clone();
        for m in it {
            for (a, b) in g.iter_mut().zip(m) {
                *a = (*a).min(*b);
            }
        }
        g
    }

    /// Rational `c` with `self / c` having coprime integer coefficients and
    /// a positive leading coefficient in graded order.
    pub fn content(&self) -> Q {
        if self.is_zero() {
            return Q::one();
        }
        let mut num = BigInt::zero();
        let mut den = BigInt::one();
        for c in self.terms.values() {
            num = num.gcd(c.numer());
            den = den.lcm(c.denom());
        }
        let mut c = Q::new(num, den);
        if self.leading().map(|(_, c)| c.is_negative()).unwrap_or(false) {
            c = -c;
        }
        c
    }

    /// Divide every term by the monomial `m`, which must divide each of them.
    pub fn divide_monomial(&self, m: &Monomial) -> Self {
        let mut out = Self::zero(self.n);
        for (k, c) in &self.terms {
            let k2: Monomial = k.iter().zip(m).map(|(a, b)| a - b).collect();
            out.insert(k2, c.clone());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn r_squared_reduces() {
        let n = 2;
        let r = Poly::r(n);
        assert_eq!(r.mul(&r), Poly::r2(n));
        assert_eq!(r.pow(3), Poly::r2(n).mul(&r));
        assert_eq!(Poly::r(1), Poly::x(1, 1));
    }

    #[test]
    fn exact_division() {
        let n = 2;
        let a = Poly::x(n, 1).add(&Poly::h_pow(n, 3).scale(&qr(2, 3)));
        let b = Poly::r2(n).sub(&Poly::h_pow(n, 2));
        let p = a.mul(&b).mul(&Poly::r(n));
        assert_eq!(p.exact_div(&b).unwrap(), a.mul(&Poly::r(n)));
        assert!(p.exact_div(&Poly::x(n, 2)).is_none());
    }

    #[test]
    fn content_normalizes_sign() {
        let p = Poly::x(1, 1).scale(&qr(-4, 3)).add(&Poly::one(1).scale(&qr(2, 9)));
        let c = p.content();
        assert_eq!(c, qr(-2, 9));
        let prim = p.scale(&(Q::one() / c));
        assert_eq!(prim.leading().unwrap().1, &q(6));
    }
}
