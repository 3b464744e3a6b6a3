//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! Monomials are exponent vectors with trailing zeros trimmed, so a
//! polynomial does not need to know how many variables exist.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{fmt_q, is_integer, parse_q, Scalar, Q};

pub type Monomial = Vec<u32>;

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Q>,
}

fn trim(mut m: Monomial) -> Monomial {
    while m.last() == Some(&0) {
        m.pop();
    }
    m
}

fn mono_mul(a: &[u32], b: &[u32]) -> Monomial {
    let len = a.len().max(b.len());
    let out = (0..len).map(|i| a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0)).collect();
    trim(out)
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Q) -> Self {
        let mut p = Self::zero();
        p.add_term(Vec::new(), c);
        p
    }

    pub fn var(i: usize) -> Self {
        let mut m = vec![0; i + 1];
        m[i] = 1;
        let mut p = Self::zero();
        p.add_term(m, Q::one());
        p
    }

    pub fn add_term(&mut self, mono: Monomial, coef: Q) {
        if coef.is_zero() {
            return;
        }
        let mono = trim(mono);
        let entry = self.terms.entry(mono.clone()).or_insert_with(Q::zero);
        *entry += coef;
        if entry.is_zero() {
            self.terms.remove(&mono);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Q)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, mono: &[u32]) -> Q {
        self.terms.get(&trim(mono.to_vec())).cloned().unwrap_or_else(Q::zero)
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self { terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(mono_mul(ma, mb), ca * cb);
            }
        }
        out
    }

    /// Highest variable index that occurs, plus one.
    pub fn num_vars_used(&self) -> usize {
        self.terms.keys().map(|m| m.len()).max().unwrap_or(0)
    }

    pub fn uses_var(&self, i: usize) -> bool {
        self.terms.keys().any(|m| m.get(i).copied().unwrap_or(0) > 0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.iter().sum()).max().unwrap_or(0)
    }

    /// Maximum weighted degree, where variable `i` has weight `w[i]`.
    pub fn weighted_degree(&self, w: &[u32]) -> Option<u32> {
        self.terms.keys().map(|m| m.iter().enumerate().map(|(i, e)| e * w[i]).sum()).max()
    }

    /// Whether every monomial has weighted degree exactly `d`.
    pub fn is_weighted_homogeneous(&self, w: &[u32], d: u32) -> bool {
        self.terms.keys().all(|m| m.iter().enumerate().map(|(i, e)| e * w[i]).sum::<u32>() == d)
    }

    pub fn is_integral(&self) -> bool {
        self.terms.values().all(is_integer)
    }

    pub fn eval<S: Scalar>(&self, vars: &[S]) -> S {
        let mut acc = S::zero_elem();
        for (m, c) in &self.terms {
            let mut t = S::from_q(c);
            for (i, &e) in m.iter().enumerate() {
                if e > 0 {
                    t = t.mul(&vars[i].pow(e));
                }
            }
            acc = acc.add(&t);
        }
        acc
    }

    /// Substitute `vars[i]` for variable `i`.
    pub fn substitute(&self, vars: &[Poly]) -> Poly {
        self.eval(vars)
    }

    /// Evaluate with absolute coefficients on nonnegative bounds; an upper
    /// bound for `|p(x)|` whenever `|x_i| <= bounds[i]`.
    pub fn abs_bound(&self, bounds: &[Q]) -> Q {
        let mut acc = Q::zero();
        for (m, c) in &self.terms {
            let mut t = c.abs();
            for (i, &e) in m.iter().enumerate() {
                for _ in 0..e {
                    t *= &bounds[i];
                }
            }
            acc += t;
        }
        acc
    }

    pub fn compile(&self) -> CompiledPoly {
        CompiledPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let factors = m.iter().enumerate().filter(|(_, e)| **e > 0).map(|(i, e)| (i, *e)).collect();
                    (c.clone(), factors)
                })
                .collect(),
        }
    }

    /// Render using the given variable names (index `i` prints as `names[i]`).
    pub fn display_with(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mut factors: Vec<String> = Vec::new();
            for (i, &e) in m.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(names[i].clone()),
                    _ => factors.push(format!("{}^{}", names[i], e)),
                }
            }
            if factors.is_empty() || !mag.is_one() {
                factors.insert(0, fmt_q(&mag));
            }
            out.push_str(&factors.join("*"));
        }
        out
    }

    /// Parse `-1/2*a1*b2 + 1/2*a2*b1`-style strings. `names[i]` is the
    /// spelling of variable `i`.
    pub fn parse(s: &str, names: &[String]) -> Result<Poly> {
        let bad = |msg: String| Error::Invalid(format!("polynomial {s:?}: {msg}"));
        let cleaned: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if cleaned.is_empty() {
            return Err(bad("empty".into()));
        }
        // split into signed terms; a sign right after ^ / * belongs to the factor
        let mut terms: Vec<(bool, String)> = Vec::new();
        let mut cur = String::new();
        let mut neg = false;
        let mut prev: Option<char> = None;
        for ch in cleaned.chars() {
            let in_factor = matches!(prev, Some('^') | Some('/') | Some('*'));
            if (ch == '+' || ch == '-') && !in_factor {
                if !cur.is_empty() {
                    terms.push((neg, std::mem::take(&mut cur)));
                    neg = false;
                }
                if ch == '-' {
                    neg = !neg;
                }
            } else {
                cur.push(ch);
            }
            prev = Some(ch);
        }
        if cur.is_empty() {
            return Err(bad("trailing operator".into()));
        }
        terms.push((neg, cur));

        let mut out = Poly::zero();
        for (neg, term) in terms {
            let mut coef = Q::one();
            let mut mono: Monomial = Vec::new();
            for factor in term.split('*') {
                if factor.is_empty() {
                    return Err(bad("empty factor".into()));
                }
                let (base, exp) = match factor.split_once('^') {
                    Some((b, e)) => {
                        let e: u32 = e.parse().map_err(|_| bad(format!("bad exponent {e}")))?;
                        (b, e)
                    }
                    None => (factor, 1),
                };
                if let Some(i) = names.iter().position(|n| n == base) {
                    if mono.len() <= i {
                        mono.resize(i + 1, 0);
                    }
                    mono[i] += exp;
                } else {
                    let c = parse_q(base).map_err(|_| bad(format!("unknown symbol {base}")))?;
                    for _ in 0..exp {
                        coef *= &c;
                    }
                }
            }
            out.add_term(mono, if neg { -coef } else { coef });
        }
        Ok(out)
    }
}

impl Scalar for Poly {
    fn zero_elem() -> Self {
        Poly::zero()
    }
    fn one_elem() -> Self {
        Poly::constant(Q::one())
    }
    fn from_q(c: &Q) -> Self {
        Poly::constant(c.clone())
    }
    fn add(&self, other: &Self) -> Self {
        Poly::add(self, other)
    }
    fn sub(&self, other: &Self) -> Self {
        Poly::sub(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        Poly::mul(self, other)
    }
    fn neg(&self) -> Self {
        self.scale(&-Q::one())
    }
    fn is_zero_elem(&self) -> bool {
        Poly::is_zero(self)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.num_vars_used()).map(|i| format!("x{}", i + 1)).collect();
        f.write_str(&self.display_with(&names))
    }
}

/// Flattened polynomial for fast repeated evaluation.
#[derive(Clone, Debug)]
pub struct CompiledPoly {
    terms: Vec<(Q, Vec<(usize, u32)>)>,
}

impl CompiledPoly {
    pub fn eval<S: Scalar>(&self, vars: &[S]) -> S {
        let mut acc = S::zero_elem();
        for (c, factors) in &self.terms {
            let mut t = S::from_q(c);
            for &(i, e) in factors {
                t = t.mul(&vars[i].pow(e));
            }
            acc = acc.add(&t);
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Integer-coefficient form, if every coefficient is an integer that fits.
    pub fn to_integral(&self) -> Option<IntPoly> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (c, f) in &self.terms {
            if !is_integer(c) {
                return None;
            }
            let c: i128 = c.numer().try_into().ok()?;
            terms.push((c, f.clone()));
        }
        Some(IntPoly { terms })
    }
}

/// Integer polynomial evaluated with overflow checks.
#[derive(Clone, Debug)]
pub struct IntPoly {
    terms: Vec<(i128, Vec<(usize, u32)>)>,
}

impl IntPoly {
    pub fn eval(&self, vars: &[i128]) -> Option<i128> {
        let mut acc: i128 = 0;
        for (c, factors) in &self.terms {
            let mut t = *c;
            for &(i, e) in factors {
                for _ in 0..e {
                    t = t.checked_mul(vars[i])?;
                }
            }
            acc = acc.checked_add(t)?;
        }
        Some(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qr};

    fn names() -> Vec<String> {
        ["a1", "a2", "a3", "b1", "b2", "b3"].iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn parse_and_display() {
        let p = Poly::parse("-1/2*a1*b2 + 1/2*a2*b1", &names()).unwrap();
        assert_eq!(p.num_terms(), 2);
        assert_eq!(p.coeff(&[1, 0, 0, 0, 1]), qr(-1, 2));
        assert_eq!(p.coeff(&[0, 1, 0, 1]), qr(1, 2));
        let s = p.display_with(&names());
        assert_eq!(Poly::parse(&s, &names()).unwrap(), p);
    }

    #[test]
    fn parse_powers_and_constants() {
        let p = Poly::parse("3 - a1^2*b1 + 0.5*a2", &names()).unwrap();
        assert_eq!(p.coeff(&[]), q(3));
        assert_eq!(p.coeff(&[2, 0, 0, 1]), q(-1));
        assert_eq!(p.coeff(&[0, 1]), qr(1, 2));
        assert!(Poly::parse("a1 +", &names()).is_err());
        assert!(Poly::parse("c7", &names()).is_err());
        assert!(Poly::parse("0", &names()).unwrap().is_zero());
    }

    #[test]
    fn arithmetic_cancels() {
        let x = Poly::var(0);
        let y = Poly::var(1);
        let p = x.add(&y).mul(&x.sub(&y));
        let expect = x.mul(&x).sub(&y.mul(&y));
        assert_eq!(p, expect);
        assert!(p.sub(&expect).is_zero());
    }

    #[test]
    fn compiled_matches_direct() {
        let p = Poly::parse("2*a1^2*b2 - 1/3*a3 + 5", &names()).unwrap();
        let v: Vec<Q> = vec![q(2), q(-1), qr(3, 4), q(0), q(7), q(1)];
        assert_eq!(p.eval(&v), p.compile().eval(&v));
        let ip = Poly::parse("2*a1^2*b2 - a3", &names()).unwrap().compile().to_integral().unwrap();
        assert_eq!(ip.eval(&[2, -1, 3, 0, 7, 1]), Some(2 * 4 * 7 - 3));
        assert!(p.compile().to_integral().is_none());
    }
}
