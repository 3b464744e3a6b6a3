//! Nilpotent Lie groups in exponential coordinates.
//!
//! A group is `R^n` with product `(g*h)_i = g_i + h_i + p_i(g_<i, h_<i)`.
//! The polynomials `p_i` either come from structure constants through the BCH
//! series or are supplied directly. Polynomial variables are laid out as
//! `a_1..a_n` (indices `0..n`) for the left factor and `b_1..b_n` (indices
//! `n..2n`) for the right factor.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bch::{self, MAX_WEIGHT};
use crate::error::{check_dim, Error, Result};
use crate::linalg;
use crate::poly::{CompiledPoly, IntPoly, Poly};
use crate::rational::{random_q, to_f64, Scalar, Q};

/// Exponential coordinates of a group element.
pub type Point = Vec<Q>;

/// Sparse table `s_ijk` with `[e_i, e_j] = sum_k s_ijk e_k`, zero-based and
/// stored for both orders of `(i, j)`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct StructureConstants {
    n: usize,
    table: BTreeMap<(usize, usize, usize), Q>,
}

impl StructureConstants {
    pub fn new(n: usize) -> Self {
        Self { n, table: BTreeMap::new() }
    }

    /// Build from raw zero-based entries. Giving `(i,j,k,c)` implies
    /// `(j,i,k,-c)`; contradicting pairs are rejected.
    pub fn from_entries(n: usize, entries: &[(usize, usize, usize, Q)]) -> Result<Self> {
        let mut sc = Self::new(n);
        for (i, j, k, c) in entries {
            let (i, j, k) = (*i, *j, *k);
            if i >= n || j >= n || k >= n {
                return Err(Error::Invalid(format!(
                    "structure constant index ({}, {}, {}) out of range 1..={n}",
                    i + 1,
                    j + 1,
                    k + 1
                )));
            }
            if c.is_zero() {
                continue;
            }
            if i == j {
                return Err(Error::Antisymmetry(i + 1, j + 1, k + 1));
            }
            for (key, val) in [((i, j, k), c.clone()), ((j, i, k), -c.clone())] {
                if let Some(old) = sc.table.get(&key) {
                    if *old != val {
                        return Err(Error::Antisymmetry(i + 1, j + 1, k + 1));
                    }
                }
                sc.table.insert(key, val);
            }
        }
        Ok(sc)
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> Q {
        self.table.get(&(i, j, k)).cloned().unwrap_or_else(Q::zero)
    }

    /// Entries with `i < j`, zero-based.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, usize, &Q)> {
        self.table.iter().filter(|((i, j, _), _)| i < j).map(|((i, j, k), c)| (*i, *j, *k, c))
    }

    pub fn is_abelian(&self) -> bool {
        self.table.is_empty()
    }

    pub fn bracket<S: Scalar>(&self, u: &[S], v: &[S]) -> Vec<S> {
        let mut out = vec![S::zero_elem(); self.n];
        for ((i, j, k), c) in &self.table {
            let t = u[*i].mul(&v[*j]);
            if t.is_zero_elem() {
                continue;
            }
            out[*k] = out[*k].add(&S::from_q(c).mul(&t));
        }
        out
    }

    fn basis(&self, i: usize) -> Vec<Q> {
        (0..self.n).map(|k| if k == i { Q::one() } else { Q::zero() }).collect()
    }

    /// Spans of the lower central series `g = g^1 > g^2 > ...` until zero.
    pub fn lower_central_series(&self) -> Vec<Vec<Vec<Q>>> {
        let mut terms = vec![(0..self.n).map(|i| self.basis(i)).collect::<Vec<_>>()];
        loop {
            let last = terms.last().unwrap();
            let mut gens = Vec::new();
            for i in 0..self.n {
                let e = self.basis(i);
                for v in last {
                    let b = self.bracket(&e, v);
                    if b.iter().any(|c| !c.is_zero()) {
                        gens.push(b);
                    }
                }
            }
            let next = linalg::row_reduce(&gens);
            if next.is_empty() || next.len() == last.len() {
                if !next.is_empty() {
                    // g^{j+1} = g^j: not nilpotent (impossible once triangular)
                    terms.push(next);
                }
                break;
            }
            terms.push(next);
        }
        terms
    }

    /// Nilpotency step: the number of nonzero lower-central-series terms.
    pub fn nilpotency_step(&self) -> usize {
        self.lower_central_series().len()
    }

    pub fn validate(&self, step: usize) -> Result<()> {
        for (i, j, k) in self.table.keys() {
            if *k <= (*i).max(*j) {
                return Err(Error::NotTriangular(i + 1, j + 1, k + 1));
            }
        }
        let n = self.n;
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let (ei, ej, ek) = (self.basis(i), self.basis(j), self.basis(k));
                    let t1 = self.bracket(&self.bracket(&ei, &ej), &ek);
                    let t2 = self.bracket(&self.bracket(&ej, &ek), &ei);
                    let t3 = self.bracket(&self.bracket(&ek, &ei), &ej);
                    if (0..n).any(|c| !(&t1[c] + &t2[c] + &t3[c]).is_zero()) {
                        return Err(Error::JacobiViolation(i + 1, j + 1, k + 1));
                    }
                }
            }
        }
        if self.nilpotency_step() > step {
            return Err(Error::NonNilpotent(step + 1));
        }
        Ok(())
    }

    /// Filtration weights: `w_k = max(1, max { w_i + w_j : s_ijk != 0 })`.
    /// Equals the lower-central-series depth for adapted bases.
    pub fn weights(&self) -> Vec<u32> {
        let mut w = vec![1u32; self.n];
        for k in 0..self.n {
            for (i, j, kk) in self.table.keys() {
                if *kk == k {
                    w[k] = w[k].max(w[*i] + w[*j]);
                }
            }
        }
        w
    }

    /// Drop the last basis vector (quotient by the span of `e_n`).
    pub fn project(&self) -> Self {
        let n = self.n - 1;
        let table = self.table.iter().filter(|((_, _, k), _)| *k < n).map(|(key, c)| (*key, c.clone())).collect();
        Self { n, table }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LawSource {
    StructureConstants(StructureConstants),
    /// `p_1..p_n` over `a_1..a_n, b_1..b_n`.
    Explicit(Vec<Poly>),
}

/// Which exponential coordinates the points of a law are expressed in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coordinates {
    First,
    Second,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroupSpec {
    pub dimension: usize,
    pub step: usize,
    pub labels: Vec<String>,
    pub source: LawSource,
    pub weights: Option<Vec<u32>>,
    pub coordinates: Coordinates,
}

fn default_labels(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

impl GroupSpec {
    pub fn from_constants(n: usize, step: usize, entries: &[(usize, usize, usize, Q)]) -> Result<Self> {
        Ok(Self {
            dimension: n,
            step,
            labels: default_labels(n),
            source: LawSource::StructureConstants(StructureConstants::from_entries(n, entries)?),
            weights: None,
            coordinates: Coordinates::First,
        })
    }

    pub fn from_law(polys: Vec<Poly>, step: usize, coordinates: Coordinates) -> Self {
        let n = polys.len();
        Self {
            dimension: n,
            step,
            labels: default_labels(n),
            source: LawSource::Explicit(polys),
            weights: None,
            coordinates,
        }
    }

    /// Heisenberg group with `[e1, e2] = -e3`, i.e. `p_3 = -(a1 b2 - a2 b1)/2`.
    pub fn heisenberg() -> Self {
        let mut s = Self::from_constants(3, 2, &[(0, 1, 2, -Q::one())]).unwrap();
        s.labels = vec!["x".into(), "y".into(), "z".into()];
        s
    }

    /// Heisenberg group with `[e1, e2] = 2 e3`, so `p_3 = a1 b2 - a2 b1` has
    /// integer coefficients and `G(Z)` is a subgroup.
    pub fn heisenberg_integral() -> Self {
        let mut s = Self::from_constants(3, 2, &[(0, 1, 2, Q::from_integer(2.into()))]).unwrap();
        s.labels = vec!["x".into(), "y".into(), "z".into()];
        s
    }

    /// Four-dimensional filiform algebra `[e1,e2] = e3`, `[e1,e3] = e4`.
    pub fn filiform() -> Self {
        Self::from_constants(4, 3, &[(0, 1, 2, Q::one()), (0, 2, 3, Q::one())]).unwrap()
    }

    pub fn abelian(n: usize) -> Self {
        Self::from_constants(n, 1, &[]).unwrap()
    }

    /// Named presets accepted by the CLI.
    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "heisenberg" => Some(Self::heisenberg()),
            "heisenberg-integral" => Some(Self::heisenberg_integral()),
            "filiform" => Some(Self::filiform()),
            _ => {
                let n = name.strip_prefix("abelian")?.parse().ok()?;
                (n > 0).then(|| Self::abelian(n))
            }
        }
    }

    pub fn constants(&self) -> Option<&StructureConstants> {
        match &self.source {
            LawSource::StructureConstants(sc) => Some(sc),
            LawSource::Explicit(_) => None,
        }
    }

    /// Quotient by the last basis vector.
    pub fn project(&self) -> Result<Self> {
        if self.dimension < 2 {
            return Err(Error::DimensionTooSmall(self.dimension));
        }
        let n = self.dimension - 1;
        let source = match &self.source {
            LawSource::StructureConstants(sc) => LawSource::StructureConstants(sc.project()),
            LawSource::Explicit(p) => LawSource::Explicit(project_polys(&p[..n], n + 1)),
        };
        let mut out = Self {
            dimension: n,
            step: self.step,
            labels: self.labels[..n].to_vec(),
            source,
            weights: self.weights.as_ref().map(|w| w[..n].to_vec()),
            coordinates: self.coordinates,
        };
        if let LawSource::StructureConstants(sc) = &out.source {
            out.step = sc.nilpotency_step().max(1);
        }
        Ok(out)
    }

    /// Truncated BCH series `log(exp x exp y)`.
    pub fn bch(&self, x: &[Q], y: &[Q]) -> Result<Vec<Q>> {
        check_dim(self.dimension, x.len())?;
        check_dim(self.dimension, y.len())?;
        match &self.source {
            LawSource::StructureConstants(sc) => {
                if self.step > MAX_WEIGHT {
                    return Err(Error::StepTooLarge(self.step, MAX_WEIGHT));
                }
                sc.validate(self.step)?;
                let terms = bch::bch_terms(self.step);
                Ok(bch::eval_terms(&terms, x, y, |u, v| sc.bracket(u, v)))
            }
            // in first-kind coordinates the product is the BCH series itself
            LawSource::Explicit(_) if self.coordinates == Coordinates::First => {
                Ok(synthesize_law(self)?.multiply(x, y))
            }
            LawSource::Explicit(_) => Err(Error::Invalid("bch needs structure constants or a first-kind law".into())),
        }
    }
}

/// Rewrite polynomials over `a_1..a_m, b_1..b_m` (`m = old_n`) into the
/// layout of dimension `m-1`, dropping the last variables.
fn project_polys(polys: &[Poly], old_n: usize) -> Vec<Poly> {
    let n = old_n - 1;
    let mut vars = Vec::with_capacity(2 * old_n);
    for side in 0..2 {
        for i in 0..old_n {
            vars.push(if i < n { Poly::var(side * n + i) } else { Poly::zero() });
        }
    }
    polys.iter().map(|p| p.substitute(&vars)).collect()
}

/// Result of a rationality inspection of a group presentation.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalityReport {
    pub has_rational_basis: bool,
    pub law_is_integral: bool,
    pub law_is_integral_second_kind: bool,
    pub note: String,
}

/// A validated product law.
#[derive(Clone, Debug)]
pub struct GroupLaw {
    n: usize,
    step: usize,
    labels: Vec<String>,
    weights: Vec<u32>,
    polys: Vec<Poly>,
    compiled: Vec<CompiledPoly>,
    integral: Option<IntegralLaw>,
    coordinates: Coordinates,
    constants: Option<StructureConstants>,
}

/// Build and validate the product law of a spec.
pub fn synthesize_law(spec: &GroupSpec) -> Result<GroupLaw> {
    let n = spec.dimension;
    if n == 0 {
        return Err(Error::DimensionTooSmall(0));
    }
    if spec.labels.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: spec.labels.len() });
    }
    let (polys, constants, derived_w) = match &spec.source {
        LawSource::StructureConstants(sc) => {
            check_dim(n, sc.dimension())?;
            if spec.step > MAX_WEIGHT {
                return Err(Error::StepTooLarge(spec.step, MAX_WEIGHT));
            }
            sc.validate(spec.step)?;
            (bch_law(sc, spec.step), Some(sc.clone()), sc.weights())
        }
        LawSource::Explicit(polys) => {
            check_dim(n, polys.len())?;
            check_triangular(polys, n)?;
            let w = law_weights(polys, n);
            (polys.clone(), None, w)
        }
    };
    let weights = match &spec.weights {
        Some(w) => {
            check_dim(n, w.len())?;
            if w.contains(&0) {
                return Err(Error::Invalid("weights must be positive".into()));
            }
            w.clone()
        }
        None => derived_w,
    };
    let law = GroupLaw::from_parts(n, spec.step, spec.labels.clone(), weights, polys, spec.coordinates, constants);
    if matches!(spec.source, LawSource::Explicit(_)) {
        law.validate_samples(64, 0x5eed)?;
    }
    Ok(law)
}

fn bch_law(sc: &StructureConstants, step: usize) -> Vec<Poly> {
    let n = sc.dimension();
    let a: Vec<Poly> = (0..n).map(Poly::var).collect();
    let b: Vec<Poly> = (0..n).map(|i| Poly::var(n + i)).collect();
    let terms = bch::bch_terms(step.max(1));
    let z = bch::eval_terms(&terms, &a, &b, |u, v| sc.bracket(u, v));
    z.into_iter().enumerate().map(|(k, zk)| zk.sub(&a[k]).sub(&b[k])).collect()
}

fn check_triangular(polys: &[Poly], n: usize) -> Result<()> {
    for (i, p) in polys.iter().enumerate() {
        for v in 0..2 * n {
            let coord = v % n;
            if coord >= i && p.uses_var(v) {
                return Err(Error::AssociativityFailure(format!(
                    "p{} depends on coordinate {} (must only use coordinates below {})",
                    i + 1,
                    coord + 1,
                    i + 1
                )));
            }
        }
    }
    Ok(())
}

/// `w_i` = weighted degree of `p_i` (at least 1), computed in coordinate order.
fn law_weights(polys: &[Poly], n: usize) -> Vec<u32> {
    let mut w = vec![1u32; n];
    for i in 0..n {
        let mut var_w = w.clone();
        var_w.extend_from_slice(&w);
        if let Some(d) = polys[i].weighted_degree(&var_w) {
            w[i] = d.max(1);
        }
    }
    w
}

impl GroupLaw {
    fn from_parts(
        n: usize,
        step: usize,
        labels: Vec<String>,
        weights: Vec<u32>,
        polys: Vec<Poly>,
        coordinates: Coordinates,
        constants: Option<StructureConstants>,
    ) -> Self {
        let compiled: Vec<CompiledPoly> = polys.iter().map(Poly::compile).collect();
        let integral = compiled
            .iter()
            .map(CompiledPoly::to_integral)
            .collect::<Option<Vec<_>>>()
            .map(|polys| IntegralLaw { n, polys });
        Self { n, step, labels, weights, polys, compiled, integral, coordinates, constants }
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn step(&self) -> usize {
        self.step
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn polys(&self) -> &[Poly] {
        &self.polys
    }

    pub fn coordinates(&self) -> Coordinates {
        self.coordinates
    }

    pub fn constants(&self) -> Option<&StructureConstants> {
        self.constants.as_ref()
    }

    /// Variable names `a1..an, b1..bn` used when printing the law.
    pub fn var_names(&self) -> Vec<String> {
        variable_names(self.n)
    }

    pub fn identity(&self) -> Point {
        vec![Q::zero(); self.n]
    }

    pub fn basis(&self, i: usize, t: Q) -> Point {
        let mut g = self.identity();
        g[i] = t;
        g
    }

    pub fn integral(&self) -> Option<&IntegralLaw> {
        self.integral.as_ref()
    }

    pub fn require_integral(&self) -> Result<&IntegralLaw> {
        self.integral.as_ref().ok_or(Error::NonIntegralLaw)
    }

    pub fn mul_generic<S: Scalar>(&self, g: &[S], h: &[S]) -> Vec<S> {
        let mut vars = Vec::with_capacity(2 * self.n);
        vars.extend_from_slice(g);
        vars.extend_from_slice(h);
        (0..self.n)
            .map(|i| {
                let s = g[i].add(&h[i]);
                if self.compiled[i].is_zero() {
                    s
                } else {
                    s.add(&self.compiled[i].eval(&vars))
                }
            })
            .collect()
    }

    pub fn multiply(&self, g: &[Q], h: &[Q]) -> Point {
        self.mul_generic(g, h)
    }

    pub fn try_multiply(&self, g: &[Q], h: &[Q]) -> Result<Point> {
        check_dim(self.n, g.len())?;
        check_dim(self.n, h.len())?;
        Ok(self.multiply(g, h))
    }

    /// Solve `g * x = 0` coordinate by coordinate.
    pub fn inv_generic<S: Scalar>(&self, g: &[S]) -> Vec<S> {
        if self.coordinates == Coordinates::First {
            return g.iter().map(Scalar::neg).collect();
        }
        let mut x: Vec<S> = vec![S::zero_elem(); self.n];
        let mut vars: Vec<S> = Vec::with_capacity(2 * self.n);
        vars.extend_from_slice(g);
        vars.extend(std::iter::repeat_with(S::zero_elem).take(self.n));
        for i in 0..self.n {
            let p = self.compiled[i].eval(&vars);
            x[i] = g[i].neg().sub(&p);
            vars[self.n + i] = x[i].clone();
        }
        x
    }

    pub fn invert(&self, g: &[Q]) -> Point {
        self.inv_generic(g)
    }

    /// `g^{-1} * h`.
    pub fn left_quotient(&self, g: &[Q], h: &[Q]) -> Point {
        self.multiply(&self.invert(g), h)
    }

    /// `exp(b_1 e_1) * ... * exp(b_n e_n)` in this law's coordinates.
    pub fn from_second_kind_generic<S: Scalar>(&self, b: &[S]) -> Vec<S> {
        if self.coordinates == Coordinates::Second {
            return b.to_vec();
        }
        let mut acc = vec![S::zero_elem(); self.n];
        for i in 0..self.n {
            let mut e = vec![S::zero_elem(); self.n];
            e[i] = b[i].clone();
            acc = self.mul_generic(&acc, &e);
        }
        acc
    }

    pub fn to_second_kind_generic<S: Scalar>(&self, g: &[S]) -> Vec<S> {
        if self.coordinates == Coordinates::Second {
            return g.to_vec();
        }
        let mut y = g.to_vec();
        let mut b = Vec::with_capacity(self.n);
        for i in 0..self.n {
            let bi = y[i].clone();
            let mut e = vec![S::zero_elem(); self.n];
            e[i] = bi.neg();
            y = self.mul_generic(&e, &y);
            b.push(bi);
        }
        b
    }

    pub fn from_second_kind(&self, b: &[Q]) -> Point {
        self.from_second_kind_generic(b)
    }

    pub fn to_second_kind(&self, g: &[Q]) -> Point {
        self.to_second_kind_generic(g)
    }

    /// Product law `q_i` in second-kind coordinates.
    pub fn second_kind_polys(&self) -> Vec<Poly> {
        let n = self.n;
        let a: Vec<Poly> = (0..n).map(Poly::var).collect();
        let b: Vec<Poly> = (0..n).map(|i| Poly::var(n + i)).collect();
        let prod = self.mul_generic(&self.from_second_kind_generic(&a), &self.from_second_kind_generic(&b));
        let q = self.to_second_kind_generic(&prod);
        q.into_iter().enumerate().map(|(k, qk)| qk.sub(&a[k]).sub(&b[k])).collect()
    }

    /// The same group with points in second-kind coordinates.
    pub fn second_kind_law(&self) -> GroupLaw {
        GroupLaw::from_parts(
            self.n,
            self.step,
            self.labels.clone(),
            self.weights.clone(),
            self.second_kind_polys(),
            Coordinates::Second,
            self.constants.clone(),
        )
    }

    pub fn check_rationality(&self) -> RationalityReport {
        let second = self.second_kind_polys();
        RationalityReport {
            has_rational_basis: true,
            law_is_integral: self.integral.is_some(),
            law_is_integral_second_kind: second.iter().all(Poly::is_integral),
            note: "structure constants are exact rationals by construction; \
                   irrational groups must be given by rational approximants"
                .into(),
        }
    }

    /// Whether every `p_i` is weighted-homogeneous of degree `w_i`, making
    /// the dilations automorphisms.
    pub fn is_graded(&self) -> bool {
        let mut var_w = self.weights.clone();
        var_w.extend_from_slice(&self.weights);
        self.polys.iter().zip(&self.weights).all(|(p, w)| p.is_zero() || p.is_weighted_homogeneous(&var_w, *w))
    }

    /// Homogeneous dimension `sum w_i`.
    pub fn homogeneous_dimension(&self) -> u32 {
        self.weights.iter().sum()
    }

    pub fn dilate(&self, g: &[Q], lambda: &Q) -> Point {
        g.iter().zip(&self.weights).map(|(x, w)| x * num_traits::pow(lambda.clone(), *w as usize)).collect()
    }

    /// `max_i |g_i|^{1/w_i}`.
    pub fn quasi_norm(&self, g: &[Q]) -> f64 {
        Metric::QuasiMax.norm_f64(&g.iter().map(to_f64).collect::<Vec<_>>(), &self.weights)
    }

    pub fn project(&self) -> Result<GroupLaw> {
        if self.n < 2 {
            return Err(Error::DimensionTooSmall(self.n));
        }
        let m = self.n - 1;
        let polys = project_polys(&self.polys[..m], self.n);
        let constants = self.constants.as_ref().map(StructureConstants::project);
        let step = match &constants {
            Some(sc) => sc.nilpotency_step().max(1),
            None => self.step,
        };
        Ok(GroupLaw::from_parts(
            m,
            step,
            self.labels[..m].to_vec(),
            self.weights[..m].to_vec(),
            polys,
            self.coordinates,
            constants,
        ))
    }

    pub fn project_point(&self, g: &[Q]) -> Point {
        g[..self.n - 1].to_vec()
    }

    /// Check identity, associativity and (first kind) inverse = negation on
    /// random exact samples drawn from a seeded generator.
    pub fn validate_samples(&self, samples: usize, seed: u64) -> Result<()> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let zero = self.identity();
        for _ in 0..samples {
            let g: Point = (0..self.n).map(|_| random_q(&mut rng, 5, 6)).collect();
            let h: Point = (0..self.n).map(|_| random_q(&mut rng, 5, 6)).collect();
            let k: Point = (0..self.n).map(|_| random_q(&mut rng, 5, 6)).collect();
            if self.multiply(&g, &zero) != g || self.multiply(&zero, &g) != g {
                return Err(Error::AssociativityFailure(format!("0 is not an identity at {}", fmt_point(&g))));
            }
            if self.multiply(&self.multiply(&g, &h), &k) != self.multiply(&g, &self.multiply(&h, &k)) {
                return Err(Error::AssociativityFailure(format!(
                    "(g*h)*k != g*(h*k) at g={}, h={}, k={}",
                    fmt_point(&g),
                    fmt_point(&h),
                    fmt_point(&k)
                )));
            }
            let gi = self.invert(&g);
            if !self.multiply(&g, &gi).iter().all(Zero::is_zero) || !self.multiply(&gi, &g).iter().all(Zero::is_zero) {
                return Err(Error::AssociativityFailure(format!(
                    "negation is not an inverse at {} (first-kind coordinates require it)",
                    fmt_point(&g)
                )));
            }
        }
        Ok(())
    }

    pub fn describe(&self) -> String {
        let names = self.var_names();
        let mut out = String::new();
        for (i, p) in self.polys.iter().enumerate() {
            out.push_str(&format!("p{} = {}\n", i + 1, p.display_with(&names)));
        }
        out
    }
}

pub fn variable_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("a{i}")).chain((1..=n).map(|i| format!("b{i}"))).collect()
}

pub fn fmt_point(g: &[Q]) -> String {
    let parts: Vec<String> = g.iter().map(crate::rational::fmt_q).collect();
    format!("({})", parts.join(", "))
}

/// Integer-coefficient law on `G(Z)` evaluated in checked `i128`.
#[derive(Clone, Debug)]
pub struct IntegralLaw {
    n: usize,
    polys: Vec<IntPoly>,
}

impl IntegralLaw {
    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn mul(&self, g: &[i64], h: &[i64]) -> Result<Vec<i64>> {
        let mut vars: Vec<i128> = Vec::with_capacity(2 * self.n);
        vars.extend(g.iter().map(|&x| x as i128));
        vars.extend(h.iter().map(|&x| x as i128));
        (0..self.n)
            .map(|i| {
                let p = self.polys[i].eval(&vars).ok_or(Error::Overflow)?;
                let v = vars[i] + vars[self.n + i] + p;
                i64::try_from(v).map_err(|_| Error::Overflow)
            })
            .collect()
    }

    pub fn inv(&self, g: &[i64]) -> Result<Vec<i64>> {
        let mut vars: Vec<i128> = g.iter().map(|&x| x as i128).collect();
        vars.extend(std::iter::repeat_n(0, self.n));
        let mut x = Vec::with_capacity(self.n);
        for i in 0..self.n {
            let p = self.polys[i].eval(&vars).ok_or(Error::Overflow)?;
            let v = -vars[i] - p;
            vars[self.n + i] = v;
            x.push(i64::try_from(v).map_err(|_| Error::Overflow)?);
        }
        Ok(x)
    }

    /// The `i`-th polynomial evaluated at integer arguments.
    pub fn poly_eval(&self, i: usize, g: &[i64], h: &[i64]) -> Result<i128> {
        let mut vars: Vec<i128> = Vec::with_capacity(2 * self.n);
        vars.extend(g.iter().map(|&x| x as i128));
        vars.extend(h.iter().map(|&x| x as i128));
        self.polys[i].eval(&vars).ok_or(Error::Overflow)
    }
}

pub fn to_q_point(g: &[i64]) -> Point {
    g.iter().map(|&x| Q::from_integer(x.into())).collect()
}

/// Integer coordinates, if every entry is an integer in range.
pub fn to_int_point(g: &[Q]) -> Option<Vec<i64>> {
    g.iter().map(|x| if x.is_integer() { i64::try_from(x.numer()).ok() } else { None }).collect()
}

/// Distance functions used for separation estimates and boundaries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Metric {
    /// `max_i |g_i|^{1/w_i}`
    QuasiMax,
    /// `(sum_i |g_i|^{2/w_i})^{1/2}`
    QuasiL2,
    /// Euclidean norm of the coordinates, ignoring the group structure.
    Euclidean,
}

impl Metric {
    pub fn norm_f64(self, g: &[f64], w: &[u32]) -> f64 {
        match self {
            Metric::QuasiMax => g.iter().zip(w).map(|(x, w)| x.abs().powf(1.0 / *w as f64)).fold(0.0, f64::max),
            Metric::QuasiL2 => g.iter().zip(w).map(|(x, w)| x.abs().powf(2.0 / *w as f64)).sum::<f64>().sqrt(),
            Metric::Euclidean => g.iter().map(|x| x * x).sum::<f64>().sqrt(),
        }
    }

    /// Left-invariant `|x^{-1} y|` for the quasi-norms, `|y - x|` for Euclidean.
    pub fn distance(self, law: &GroupLaw, x: &[Q], y: &[Q]) -> f64 {
        match self {
            Metric::Euclidean => x
                .iter()
                .zip(y)
                .map(|(a, b)| {
                    let d = to_f64(&(b - a));
                    d * d
                })
                .sum::<f64>()
                .sqrt(),
            _ => {
                let q: Vec<f64> = law.left_quotient(x, y).iter().map(to_f64).collect();
                self.norm_f64(&q, law.weights())
            }
        }
    }

    /// Float version of [`Metric::distance`] for bulk scans.
    pub fn distance_f64(self, law: &GroupLaw, x: &[f64], y: &[f64]) -> f64 {
        match self {
            Metric::Euclidean => x.iter().zip(y).map(|(a, b)| (b - a) * (b - a)).sum::<f64>().sqrt(),
            _ => {
                let xi = law.inv_generic(x);
                self.norm_f64(&law.mul_generic(&xi, y), law.weights())
            }
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "quasi" | "quasi-max" | "max" => Ok(Metric::QuasiMax),
            "quasi-l2" | "l2" => Ok(Metric::QuasiL2),
            "euclidean" => Ok(Metric::Euclidean),
            _ => Err(Error::Invalid(format!("unknown metric {s:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qr};

    fn pt(v: &[(i64, i64)]) -> Point {
        v.iter().map(|&(a, b)| qr(a, b)).collect()
    }

    fn ints(v: &[i64]) -> Point {
        v.iter().map(|&a| q(a)).collect()
    }

    #[test]
    fn heisenberg_law_closed_form() {
        let law = synthesize_law(&GroupSpec::heisenberg()).unwrap();
        let names = law.var_names();
        let expected = Poly::parse("-1/2*a1*b2 + 1/2*a2*b1", &names).unwrap();
        assert!(law.polys()[0].is_zero() && law.polys()[1].is_zero());
        assert_eq!(law.polys()[2], expected);
        assert_eq!(law.weights(), &[1, 1, 2]);
        assert!(law.is_graded());
    }

    #[test]
    fn heisenberg_products() {
        let law = synthesize_law(&GroupSpec::heisenberg()).unwrap();
        assert_eq!(law.multiply(&ints(&[1, 0, 0]), &ints(&[0, 1, 0])), pt(&[(1, 1), (1, 1), (-1, 2)]));
        assert_eq!(law.multiply(&ints(&[2, 0, 0]), &ints(&[1, 1, 0])), ints(&[3, 1, -1]));
        assert_eq!(law.invert(&ints(&[1, 2, 3])), ints(&[-1, -2, -3]));
        assert!(law.try_multiply(&ints(&[1, 2]), &ints(&[1, 2, 3])).is_err());
    }

    #[test]
    fn integral_heisenberg_has_integer_fast_path() {
        let law = synthesize_law(&GroupSpec::heisenberg_integral()).unwrap();
        let il = law.require_integral().unwrap();
        assert_eq!(il.mul(&[1, 0, 0], &[0, 1, 0]).unwrap(), vec![1, 1, 1]);
        assert_eq!(il.inv(&[3, -2, 5]).unwrap(), vec![-3, 2, -5]);
        let fig = synthesize_law(&GroupSpec::heisenberg()).unwrap();
        assert!(fig.integral().is_none());
        assert!(matches!(fig.require_integral(), Err(Error::NonIntegralLaw)));
    }

    #[test]
    fn abelian_law_is_zero() {
        let law = synthesize_law(&GroupSpec::abelian(3)).unwrap();
        assert!(law.polys().iter().all(Poly::is_zero));
        let g = pt(&[(1, 2), (3, 1), (-2, 3)]);
        assert_eq!(law.to_second_kind(&g), g);
    }

    #[test]
    fn bch_examples() {
        let spec = GroupSpec::heisenberg();
        let x = ints(&[1, 0, 0]);
        let y = ints(&[0, 1, 0]);
        assert_eq!(spec.bch(&x, &y).unwrap(), pt(&[(1, 1), (1, 1), (-1, 2)]));
        let g = pt(&[(2, 3), (-1, 7), (5, 2)]);
        let mg: Point = g.iter().map(|c| -c.clone()).collect();
        assert!(spec.bch(&g, &mg).unwrap().iter().all(Zero::is_zero));
        let z = ints(&[0, 0, 1]);
        assert_eq!(spec.bch(&x, &z).unwrap(), ints(&[1, 0, 1]));
    }

    #[test]
    fn second_kind_conversion() {
        let law = synthesize_law(&GroupSpec::heisenberg()).unwrap();
        assert_eq!(law.from_second_kind(&ints(&[1, 1, 0])), pt(&[(1, 1), (1, 1), (-1, 2)]));
        let g = pt(&[(3, 2), (-5, 3), (7, 4)]);
        assert_eq!(law.from_second_kind(&law.to_second_kind(&g)), g);
        let report = law.check_rationality();
        assert!(report.has_rational_basis);
        assert!(!report.law_is_integral);
        assert!(report.law_is_integral_second_kind);
        let names = law.var_names();
        assert_eq!(law.second_kind_polys()[2], Poly::parse("a2*b1", &names).unwrap());
    }

    #[test]
    fn second_kind_law_is_a_group_law() {
        let law = synthesize_law(&GroupSpec::heisenberg()).unwrap().second_kind_law();
        law.validate_samples(32, 3).unwrap();
        let il = law.require_integral().unwrap();
        let g = [2, -1, 3];
        let gi = il.inv(&g).unwrap();
        assert_eq!(il.mul(&g, &gi).unwrap(), vec![0, 0, 0]);
    }

    #[test]
    fn dilation_and_norm() {
        let law = synthesize_law(&GroupSpec::heisenberg()).unwrap();
        assert_eq!(law.dilate(&ints(&[1, 1, 1]), &q(2)), ints(&[2, 2, 4]));
        assert_eq!(law.quasi_norm(&ints(&[0, 0, 4])), 2.0);
        assert_eq!(law.quasi_norm(&ints(&[0, 0, 0])), 0.0);
    }

    #[test]
    fn projection_drops_last_coordinate() {
        let law = synthesize_law(&GroupSpec::heisenberg()).unwrap();
        let p = law.project().unwrap();
        assert_eq!(p.dimension(), 2);
        assert!(p.polys().iter().all(Poly::is_zero));
        assert_eq!(p.step(), 1);
        let fil = synthesize_law(&GroupSpec::filiform()).unwrap().project().unwrap();
        assert_eq!(fil.dimension(), 3);
        assert_eq!(fil.step(), 2);
        let one = synthesize_law(&GroupSpec::abelian(1)).unwrap();
        assert!(matches!(one.project(), Err(Error::DimensionTooSmall(1))));
    }

    #[test]
    fn rejects_jacobi_violation() {
        let spec = GroupSpec::from_constants(5, 3, &[(0, 1, 2, q(1)), (2, 3, 4, q(1))]).unwrap();
        assert!(matches!(synthesize_law(&spec), Err(Error::JacobiViolation(1, 2, 4))));
    }

    #[test]
    fn rejects_bad_constants() {
        assert!(matches!(
            GroupSpec::from_constants(3, 2, &[(0, 1, 2, q(1)), (1, 0, 2, q(1))]),
            Err(Error::Antisymmetry(..))
        ));
        let spec = GroupSpec::from_constants(3, 2, &[(1, 2, 0, q(1))]).unwrap();
        assert!(matches!(synthesize_law(&spec), Err(Error::NotTriangular(2, 3, 1))));
        let spec = GroupSpec::from_constants(4, 2, &[(0, 1, 2, q(1)), (0, 2, 3, q(1))]).unwrap();
        assert!(matches!(synthesize_law(&spec), Err(Error::NonNilpotent(3))));
    }

    #[test]
    fn rejects_non_associative_law() {
        let names = variable_names(3);
        let polys = vec![Poly::zero(), Poly::zero(), Poly::parse("a1*b1^2", &names).unwrap()];
        let spec = GroupSpec::from_law(polys, 2, Coordinates::First);
        assert!(matches!(synthesize_law(&spec), Err(Error::AssociativityFailure(_))));
    }

    #[test]
    fn explicit_law_round_trips() {
        let names = variable_names(3);
        let polys = vec![Poly::zero(), Poly::zero(), Poly::parse("a1*b2 - a2*b1", &names).unwrap()];
        let law = synthesize_law(&GroupSpec::from_law(polys.clone(), 2, Coordinates::First)).unwrap();
        assert_eq!(law.polys(), &polys[..]);
        assert_eq!(law.weights(), &[1, 1, 2]);
    }

    #[test]
    fn presets_by_name() {
        assert_eq!(GroupSpec::preset("abelian4").unwrap().dimension, 4);
        assert!(GroupSpec::preset("abelian0").is_none());
        assert!(GroupSpec::preset("nope").is_none());
    }
}
