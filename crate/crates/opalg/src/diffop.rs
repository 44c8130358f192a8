//! Operators `Σ c_α ∂^α` with `α = (a, b₁..b_n)` and [`Coeff`] coefficients.

use crate::coeff::{Coeff, Var};
use crate::poly::{grlex, q, Q};
use std::collections::{BTreeMap, HashMap};
use std::fmt;

/// Derivative multi-index `[a, b₁, .., b_n]`.
pub type Index = Vec<u32>;

#[derive(Debug, Clone)]
pub struct DiffOp {
    n: usize,
    terms: BTreeMap<Index, Coeff>,
}

/// Outcome of comparing two operators.
#[derive(Debug, Clone)]
pub struct Verification {
    pub zero: bool,
    pub residual: DiffOp,
}

fn binom(n: u32, k: u32) -> i64 {
    let mut out: i64 = 1;
    for i in 0..k {
        out = out * i64::from(n - i) / i64::from(i + 1);
    }
    out
}

impl DiffOp {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn coeff(c: Coeff) -> Self {
        let n = c.dim();
        Self::term(n, vec![0; n + 1], c)
    }

    pub fn identity(n: usize) -> Self {
        Self::coeff(Coeff::one(n))
    }

    pub fn term(n: usize, idx: Index, c: Coeff) -> Self {
        assert_eq!(idx.len(), n + 1, "multi-index arity");
        let mut out = Self::zero(n);
        if !c.is_zero() {
            out.terms.insert(idx, c);
        }
        out
    }

    pub fn dt(n: usize) -> Self {
        let mut idx = vec![0; n + 1];
        idx[0] = 1;
        Self::term(n, idx, Coeff::one(n))
    }

    pub fn dx(n: usize, i: usize) -> Self {
        assert!((1..=n).contains(&i), "∂{i} out of range for n={n}");
        let mut idx = vec![0; n + 1];
        idx[i] = 1;
        Self::term(n, idx, Coeff::one(n))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Index, &Coeff)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, idx: &[u32]) -> Coeff {
        self.terms.get(idx).cloned().unwrap_or_else(|| Coeff::zero(self.n))
    }

    pub fn order(&self) -> u32 {
        self.terms.keys().map(|k| k.iter().sum()).max().unwrap_or(0)
    }

    /// Coefficient-only operator value, if there are no derivatives.
    pub fn as_coeff(&self) -> Option<Coeff> {
        match self.terms.len() {
            0 => Some(Coeff::zero(self.n)),
            1 => {
                let (k, c) = self.terms.iter().next().expect("one term");
                k.iter().all(|&e| e == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    fn insert(&mut self, idx: Index, c: Coeff) {
        if c.is_zero() {
            return;
        }
        let merged = match self.terms.remove(&idx) {
            Some(old) => old.add(&c),
            None => c,
        };
        if !merged.is_zero() {
            self.terms.insert(idx, merged);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.insert(k.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-q(1))
    }

    pub fn scale(&self, c: &Q) -> Self {
        self.left_mul(&Coeff::constant(self.n, c.clone()))
    }

    /// `c · A`.
    pub fn left_mul(&self, c: &Coeff) -> Self {
        let mut out = Self::zero(self.n);
        for (k, v) in &self.terms {
            out.insert(k.clone(), c.mul(v));
        }
        out
    }

    /// `A ∘ B` by the generalized Leibniz rule.
    pub fn compose(&self, other: &Self) -> Self {
        let n = self.n;
        let mut out = Self::zero(n);
        for (beta, b) in &other.terms {
            let mut cache: HashMap<Index, Coeff> = HashMap::new();
            cache.insert(vec![0; n + 1], b.clone());
            for (alpha, a) in &self.terms {
                let mut gamma = vec![0u32; n + 1];
                loop {
                    let db = derivative_cached(&mut cache, &gamma);
                    if !db.is_zero() {
                        let mult: i64 = alpha.iter().zip(&gamma).map(|(&p, &g)| binom(p, g)).product();
                        let idx: Index = (0..=n).map(|v| alpha[v] - gamma[v] + beta[v]).collect();
                        out.insert(idx, a.mul(&db).scale(&q(mult)));
                    }
                    // next γ ≤ α in odometer order
                    let mut v = 0;
                    while v <= n {
                        if gamma[v] < alpha[v] {
                            gamma[v] += 1;
                            break;
                        }
                        gamma[v] = 0;
                        v += 1;
                    }
                    if v > n {
                        break;
                    }
                }
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::identity(self.n), |acc, _| acc.compose(self))
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.compose(other).sub(&other.compose(self))
    }

    /// Keep only the terms of total order `≥ k`.
    pub fn order_at_least(&self, k: u32) -> Self {
        Self {
            n: self.n,
            terms: self
                .terms
                .iter()
                .filter(|(i, _)| i.iter().sum::<u32>() >= k)
                .map(|(i, c)| (i.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn verify_identity(lhs: &Self, rhs: &Self) -> Verification {
        let residual = lhs.sub(rhs);
        Verification {
            zero: residual.is_zero(),
            residual,
        }
    }

    /// Indices in descending graded-lex order.
    pub fn sorted_indices(&self) -> Vec<&Index> {
        let mut idx: Vec<&Index> = self.terms.keys().collect();
        idx.sort_by(|a, b| grlex(b, a));
        idx
    }
}

fn derivative_cached(cache: &mut HashMap<Index, Coeff>, gamma: &Index) -> Coeff {
    if let Some(c) = cache.get(gamma) {
        return c.clone();
    }
    let v = gamma.iter().position(|&g| g > 0).expect("nonzero γ is cached as base");
    let mut lower = gamma.clone();
    lower[v] -= 1;
    let base = derivative_cached(cache, &lower);
    let var = if v == 0 { Var::T } else { Var::X(v) };
    let d = base.derivative(var);
    cache.insert(gamma.clone(), d.clone());
    d
}

impl PartialEq for DiffOp {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.sub(other).is_zero()
    }
}

fn fmt_index(idx: &Index) -> Vec<String> {
    let mut parts = Vec::new();
    for (v, &k) in idx.iter().enumerate() {
        if k == 0 {
            continue;
        }
        let name = if v == 0 { "Dt".to_string() } else { format!("D{v}") };
        parts.push(if k == 1 { name } else { format!("{name}^{k}") });
    }
    parts
}

impl fmt::Display for DiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, idx) in self.sorted_indices().into_iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            let c = &self.terms[idx];
            let mut parts = fmt_index(idx);
            if !c.is_one() || parts.is_empty() {
                parts.insert(0, c.to_string());
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}
