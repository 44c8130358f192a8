//! Rational functions `N / Π fₖ^{eₖ}` over the generators of [`Poly`].
//!
//! Denominator factors are kept free of `r` (by rationalizing), primitive
//! with a positive graded-leading coefficient, and never constant; a
//! monomial content is split into single-generator factors so that `h`
//! and `xᵢ` powers cancel individually.

use crate::poly::{grlex, q, qr, Monomial, Poly, Q};
use num_traits::{One, Signed, Zero};
use std::fmt;

#[derive(Debug, Clone)]
pub struct Coeff {
    num: Poly,
    den: Vec<(Poly, u32)>,
}

/// Differentiation variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    T,
    X(usize),
}

impl Coeff {
    pub fn from_poly(p: Poly) -> Self {
        Self { num: p, den: Vec::new() }
    }

    pub fn zero(n: usize) -> Self {
        Self::from_poly(Poly::zero(n))
    }

    pub fn one(n: usize) -> Self {
        Self::from_poly(Poly::one(n))
    }

    pub fn constant(n: usize, c: Q) -> Self {
        Self::from_poly(Poly::constant(n, c))
    }

    pub fn int(n: usize, c: i64) -> Self {
        Self::constant(n, q(c))
    }

    pub fn ratio(n: usize, a: i64, b: i64) -> Self {
        Self::constant(n, qr(a, b))
    }

    /// `t^{k/2}` for any integer `k`.
    pub fn t_half_pow(n: usize, k: i64) -> Self {
        let p = Poly::h_pow(n, k.unsigned_abs() as u32);
        if k >= 0 {
            Self::from_poly(p)
        } else {
            Self::one(n).div_poly(&p)
        }
    }

    pub fn t_pow(n: usize, k: i64) -> Self {
        Self::t_half_pow(n, 2 * k)
    }

    pub fn x(n: usize, i: usize) -> Self {
        Self::from_poly(Poly::x(n, i))
    }

    pub fn r(n: usize) -> Self {
        Self::from_poly(Poly::r(n))
    }

    pub fn r2(n: usize) -> Self {
        Self::from_poly(Poly::r2(n))
    }

    pub fn dim(&self) -> usize {
        self.num.dim()
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &[(Poly, u32)] {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_empty() && self.num.as_constant().is_some_and(|c| c.is_one())
    }

    pub fn as_constant(&self) -> Option<Q> {
        if self.den.is_empty() {
            self.num.as_constant()
        } else if self.num.is_zero() {
            Some(Q::zero())
        } else {
            None
        }
    }

    fn den_product(&self) -> Poly {
        let n = self.dim();
        self.den
            .iter()
            .fold(Poly::one(n), |acc, (f, e)| acc.mul(&f.pow(*e)))
    }

    /// Register `f^e` (with `f` free of `r`) as a denominator factor,
    /// returning the constant to divide the numerator by.
    fn push_factor(&mut self, f: Poly, e: u32) -> Q {
        let n = self.dim();
        if e == 0 {
            return Q::one();
        }
        if let Some(c) = f.as_constant() {
            return pow_q(&c, e);
        }
        let mc = f.monomial_content();
        let mut scale = Q::one();
        let mut rest = f;
        if mc.iter().any(|&k| k > 0) {
            rest = rest.divide_monomial(&mc);
            for (v, &k) in mc.iter().enumerate() {
                if k > 0 {
                    let mut m: Monomial = vec![0; n + 2];
                    m[v] = 1;
                    self.add_primitive(Poly::monomial(n, m, Q::one()), k * e);
                }
            }
        }
        if let Some(c) = rest.as_constant() {
            return pow_q(&c, e);
        }
        let c = rest.content();
        rest = rest.scale(&(Q::one() / &c));
        scale *= pow_q(&c, e);
        // peel off known factors
        loop {
            let mut progressed = false;
            for i in 0..self.den.len() {
                if let Some(qt) = rest.exact_div(&self.den[i].0) {
                    self.den[i].1 += e;
                    rest = qt;
                    progressed = true;
                    break;
                }
            }
            if !progressed {
                break;
            }
            if let Some(c) = rest.as_constant() {
                return scale * pow_q(&c, e);
            }
        }
        let c = rest.content();
        rest = rest.scale(&(Q::one() / &c));
        scale *= pow_q(&c, e);
        self.add_primitive(rest, e);
        scale
    }

    fn add_primitive(&mut self, f: Poly, e: u32) {
        if let Some(slot) = self.den.iter_mut().find(|(g, _)| *g == f) {
            slot.1 += e;
        } else {
            self.den.push((f, e));
            self.den.sort_by(|a, b| {
                let la = a.0.leading().map(|l| l.0.clone()).unwrap_or_default();
                let lb = b.0.leading().map(|l| l.0.clone()).unwrap_or_default();
                grlex(&la, &lb).then_with(|| a.0.len().cmp(&b.0.len()))
            });
        }
    }

    /// Divide by a polynomial, rationalizing any `r` it contains.
    pub fn div_poly(&self, d: &Poly) -> Self {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let n = self.dim();
        let (a, b) = d.split_r();
        let (mult, plain) = if b.is_zero() {
            (Poly::one(n), a)
        } else {
            // 1/(a + b r) = (a − b r)/(a² − b² R²)
            let conj = a.sub(&b.mul(&Poly::r(n)));
            let norm = a.mul(&a).sub(&b.mul(&b).mul(&Poly::r2(n)));
            assert!(!norm.is_zero(), "denominator is a zero divisor");
            (conj, norm)
        };
        let mut out = Self {
            num: self.num.mul(&mult),
            den: self.den.clone(),
        };
        let s = out.push_factor(plain, 1);
        out.num = out.num.scale(&(Q::one() / s));
        out.cancel()
    }

    fn cancel(mut self) -> Self {
        if self.num.is_zero() {
            self.den.clear();
            return self;
        }
        for (f, e) in self.den.iter_mut() {
            while *e > 0 {
                match self.num.exact_div(f) {
                    Some(qt) => {
                        self.num = qt;
                        *e -= 1;
                    }
                    None => break,
                }
            }
        }
        self.den.retain(|(_, e)| *e > 0);
        self
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self {
            num: self.num.mul(&other.num),
            den: self.den.clone(),
        };
        for (f, e) in &other.den {
            out.add_primitive(f.clone(), *e);
        }
        out.cancel()
    }

    pub fn scale(&self, c: &Q) -> Self {
        Self {
            num: self.num.scale(c),
            den: if c.is_zero() { Vec::new() } else { self.den.clone() },
        }
    }

    pub fn mul_poly(&self, p: &Poly) -> Self {
        self.mul(&Self::from_poly(p.clone()))
    }

    pub fn add(&self, other: &Self) -> Self {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.clone();
        }
        let n = self.dim();
        let mut den = self.den.clone();
        for (f, e) in &other.den {
            match den.iter_mut().find(|(g, _)| g == f) {
                Some(slot) => slot.1 = slot.1.max(*e),
                None => den.push((f.clone(), *e)),
            }
        }
        let missing = |own: &[(Poly, u32)]| {
            den.iter().fold(Poly::one(n), |acc, (f, e)| {
                let have = own.iter().find(|(g, _)| g == f).map_or(0, |x| x.1);
                acc.mul(&f.pow(e - have))
            })
        };
        let num = self
            .num
            .mul(&missing(&self.den))
            .add(&other.num.mul(&missing(&other.den)));
        let mut out = Self { num, den: Vec::new() };
        for (f, e) in den {
            out.add_primitive(f, e);
        }
        out.cancel()
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Q::one())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn inv(&self) -> Self {
        assert!(!self.is_zero(), "inverse of zero");
        Self::from_poly(self.den_product()).div_poly(&self.num)
    }

    pub fn div(&self, other: &Self) -> Self {
        self.mul(&other.inv())
    }

    pub fn pow(&self, k: i64) -> Self {
        let base = if k < 0 { self.inv() } else { self.clone() };
        let mut out = Self::one(self.dim());
        for _ in 0..k.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    /// Derivative of a polynomial, with `∂t h = 1/(2h)` and `∂ᵢ r = xᵢ/r`.
    fn poly_derivative(p: &Poly, v: Var) -> Self {
        let n = p.dim();
        match v {
            Var::T => Self::from_poly(p.formal_derivative(0).scale(&qr(1, 2))).div_poly(&Poly::h_pow(n, 1)),
            Var::X(i) => {
                let direct = Self::from_poly(p.formal_derivative(i));
                if n == 1 {
                    return direct;
                }
                let dr = p.formal_derivative(n + 1);
                if dr.is_zero() {
                    return direct;
                }
                let chain = Self::from_poly(dr.mul(&Poly::x(n, i)).mul(&Poly::r(n))).div_poly(&Poly::r2(n));
                direct.add(&chain)
            }
        }
    }

    pub fn derivative(&self, v: Var) -> Self {
        let mut out = Self {
            num: Poly::zero(self.dim()),
            den: self.den.clone(),
        };
        out = out.add(&Self {
            num: Poly::one(self.dim()),
            den: self.den.clone(),
        }
        .mul(&Self::poly_derivative(&self.num, v)));
        for (f, e) in &self.den {
            let term = Self::poly_derivative(f, v)
                .mul(&Self::from_poly(self.num.scale(&q(i64::from(*e)))))
                .mul(&Self {
                    num: Poly::one(self.dim()),
                    den: self.den.clone(),
                })
                .div_poly(f);
            out = out.sub(&term);
        }
        out
    }
}

fn pow_q(c: &Q, e: u32) -> Q {
    let mut out = Q::one();
    for _ in 0..e {
        out *= c;
    }
    out
}

impl PartialEq for Coeff {
    fn eq(&self, other: &Self) -> bool {
        self.sub(other).is_zero()
    }
}

pub(crate) fn fmt_q(c: &Q) -> String {
    if c.denom().is_one() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

#[allow(clippy::needless_range_loop)]
fn fmt_monomial(m: &Monomial) -> Vec<String> {
    let n = m.len() - 2;
    let mut parts = Vec::new();
    match m[0] {
        0 => {}
        k if k % 2 == 0 && k == 2 => parts.push("t".to_string()),
        k if k % 2 == 0 => parts.push(format!("t^{}", k / 2)),
        k => parts.push(format!("t^({k}/2)")),
    }
    for i in 1..=n {
        match m[i] {
            0 => {}
            1 => parts.push(format!("x{i}")),
            k => parts.push(format!("x{i}^{k}")),
        }
    }
    match m[n + 1] {
        0 => {}
        1 => parts.push("r".into()),
        k => parts.push(format!("r^{k}")),
    }
    parts
}

/// DSL text of a polynomial, highest graded terms first.
pub fn fmt_poly(p: &Poly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut terms: Vec<(&Monomial, &Q)> = p.terms().collect();
    terms.sort_by(|a, b| grlex(b.0, a.0));
    let mut out = String::new();
    for (idx, (m, c)) in terms.into_iter().enumerate() {
        let neg = c.is_negative();
        let mag = c.abs();
        if idx == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let mut parts = fmt_monomial(m);
        if !mag.is_one() || parts.is_empty() {
            parts.insert(0, fmt_q(&mag));
        }
        out.push_str(&parts.join("*"));
    }
    out
}

/// `k` when `p = h^k`.
fn h_power(p: &Poly) -> Option<u32> {
    let mut it = p.terms();
    let (m, c) = it.next()?;
    if it.next().is_some() || !c.is_one() || m[1..].iter().any(|&e| e > 0) {
        return None;
    }
    Some(m[0])
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", fmt_poly(&self.num))?;
        if !self.den.is_empty() {
            let parts: Vec<String> = self
                .den
                .iter()
                .map(|(p, e)| {
                    if let Some(k) = h_power(p) {
                        let k = k * e;
                        return match k {
                            2 => "t".to_string(),
                            k if k % 2 == 0 => format!("t^{}", k / 2),
                            k => format!("t^({k}/2)"),
                        };
                    }
                    if *e == 1 {
                        format!("({})", fmt_poly(p))
                    } else {
                        format!("({})^{e}", fmt_poly(p))
                    }
                })
                .collect();
            write!(f, "/({})", parts.join("*"))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_cancels() {
        let n = 2;
        let x1 = Coeff::x(n, 1);
        let r = Coeff::r(n);
        let a = x1.div(&r);
        assert_eq!(a.mul(&r), x1);
        let d = Coeff::r2(n).scale(&q(9)).sub(&Coeff::t_pow(n, 3).scale(&q(4)));
        let e = Coeff::one(n).div(&d).add(&Coeff::int(n, 2));
        let back = e.sub(&Coeff::int(n, 2)).mul(&d);
        assert!(back.is_one(), "{back}");
        assert!(x1.sub(&x1).is_zero());
    }

    #[test]
    fn derivatives() {
        let n = 2;
        // ∂t t^{1/2} = 1/(2 t^{1/2})
        let h = Coeff::t_half_pow(n, 1);
        assert_eq!(h.derivative(Var::T), Coeff::t_half_pow(n, -1).scale(&qr(1, 2)));
        // ∂₁ r = x₁/r
        assert_eq!(Coeff::r(n).derivative(Var::X(1)), Coeff::x(n, 1).div(&Coeff::r(n)));
        // ∂₁ (1/r) = −x₁/r³
        let inv = Coeff::r(n).inv();
        assert_eq!(inv.derivative(Var::X(1)), Coeff::x(n, 1).neg().div(&Coeff::r(n).pow(3)));
        // quotient rule on x₁/(x₁ + t)
        let f = Coeff::x(n, 1).div(&Coeff::x(n, 1).add(&Coeff::t_pow(n, 1)));
        let want = Coeff::t_pow(n, 1).div(&Coeff::x(n, 1).add(&Coeff::t_pow(n, 1)).pow(2));
        assert_eq!(f.derivative(Var::X(1)), want);
    }

    #[test]
    fn printing() {
        let n = 2;
        let c = Coeff::x(n, 1).scale(&qr(-3, 4)).add(&Coeff::t_half_pow(n, 3));
        assert_eq!(c.to_string(), "(t^(3/2) - 3/4*x1)");
        let d = Coeff::one(n).div(&Coeff::t_pow(n, 2));
        assert_eq!(d.to_string(), "(1)/(t^2)");
    }
}
