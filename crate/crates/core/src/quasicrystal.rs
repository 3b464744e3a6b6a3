//! Cut-and-project quasicrystals `Y = {g : α(g) ∈ G(Z), (L(g) + S) ∩ Z^m ≠ ∅}`
//! where `L` factors through the abelianization: `L(g) = L'(g_1, .., g_d)`.
//!
//! Only invertible triangular `α` (`α_i = c_i x_i + f_i(x_<i)`, `c_i ≠ 0`)
//! is generated directly: candidates are the integer points `h` in an
//! interval enclosure of `α(window)`, pulled back by `α^{-1}`.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::criteria::{uniformly_spread_check, PerimeterOracle, SpreadReport, TestSet};
use crate::error::{check_dim, Error, Result};
use crate::group::{GroupLaw, Point};
use crate::io::{kv_lines, parse_list, KvLine};
use crate::linalg::{invert, mat_vec, Matrix};
use crate::net::Net;
use crate::poly::Poly;
use crate::rational::{ceil, floor, fmt_q, parse_q, q, qr, random_q, to_f64, Q};
use crate::tiling::{face_neighbors, grid, CoordBox, FaceSampling};

/// Candidates beyond this many are refused.
pub const MAX_CANDIDATES: u128 = 50_000_000;

/// The acceptance window `S` in the internal space `R^m`.
#[derive(Clone, Debug, PartialEq)]
pub enum InternalWindow {
    Box(CoordBox),
    /// `vertex + sum_j t_j edges[j]`, `t ∈ [0,1)^m`.
    Parallelotope {
        vertex: Vec<Q>,
        edges: Matrix,
    },
}

impl InternalWindow {
    pub fn dimension(&self) -> usize {
        match self {
            InternalWindow::Box(b) => b.dimension(),
            InternalWindow::Parallelotope { vertex, .. } => vertex.len(),
        }
    }

    pub fn volume(&self) -> Q {
        match self {
            InternalWindow::Box(b) => b.volume(),
            InternalWindow::Parallelotope { edges, .. } => det(edges).abs(),
        }
    }
}

fn det(m: &Matrix) -> Q {
    let n = m.len();
    let mut a = m.clone();
    let mut d = Q::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else { return Q::zero() };
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d *= &a[c][c];
        for r in c + 1..n {
            let f = &a[r][c] / &a[c][c];
            for k in c..n {
                let t = &f * &a[c][k];
                a[r][k] -= t;
            }
        }
    }
    d
}

#[derive(Clone, Debug)]
pub struct QCSpec {
    pub m: usize,
    /// `None` is the identity.
    pub alpha: Option<Vec<Poly>>,
    /// `m x d` matrix acting on the abelianized coordinates.
    pub l_prime: Matrix,
    pub window: InternalWindow,
    /// Translate of `S` (a basepoint); zero by default.
    pub offset: Vec<Q>,
}

/// Number of leading weight-one coordinates; these parametrize the
/// abelianization when their law polynomials vanish.
pub fn abelian_rank(law: &GroupLaw) -> Result<usize> {
    let d = law.weights().iter().take_while(|w| **w == 1).count();
    if law.polys()[..d].iter().any(|p| !p.is_zero()) {
        return Err(Error::Invalid("leading weight-one coordinates must be additive".into()));
    }
    Ok(d)
}

impl QCSpec {
    /// `m = 1`, identity `α`, `L(g) = θ g_1`, `S = [0, s)`.
    pub fn slope(law: &GroupLaw, theta: Q, s: Q) -> Result<Self> {
        let d = abelian_rank(law)?;
        let mut row = vec![Q::zero(); d];
        row[0] = theta;
        Self::new(law, None, vec![row], InternalWindow::Box(CoordBox::half_open(vec![Q::zero()], vec![s])))
    }

    pub fn new(law: &GroupLaw, alpha: Option<Vec<Poly>>, l_prime: Matrix, window: InternalWindow) -> Result<Self> {
        let d = abelian_rank(law)?;
        let m = window.dimension();
        if m == 0 {
            return Err(Error::Invalid("internal dimension must be at least 1".into()));
        }
        check_dim(m, l_prime.len())?;
        for row in &l_prime {
            check_dim(d, row.len())?;
        }
        if window.volume() <= Q::zero() {
            return Err(Error::Invalid("window must have positive volume".into()));
        }
        if let InternalWindow::Parallelotope { edges, .. } = &window {
            check_dim(m, edges.len())?;
        }
        if let Some(a) = &alpha {
            check_dim(law.dimension(), a.len())?;
        }
        let spec = Self { m, alpha, l_prime, window, offset: vec![Q::zero(); m] };
        spec.alpha_inverse_data(law.dimension())?;
        Ok(spec)
    }

    pub fn with_offset(mut self, offset: Vec<Q>) -> Result<Self> {
        check_dim(self.m, offset.len())?;
        self.offset = offset;
        Ok(self)
    }

    /// Expected covolume `1 / (|det α| vol(S))` of the generated set (for
    /// generic `L`).
    pub fn covolume(&self, n: usize) -> Result<Q> {
        let jac = match self.alpha_inverse_data(n)? {
            None => Q::one(),
            Some(rows) => rows.iter().fold(Q::one(), |acc, (c, _)| acc * c).abs(),
        };
        Ok(Q::one() / (jac * self.window.volume()))
    }

    /// `(c_i, f_i)` with `α_i = c_i x_i + f_i(x_<i)`, or `None` for identity.
    fn alpha_inverse_data(&self, n: usize) -> Result<Option<Vec<(Q, Poly)>>> {
        let Some(alpha) = &self.alpha else { return Ok(None) };
        let mut out = Vec::with_capacity(n);
        for (i, a) in alpha.iter().enumerate() {
            if (i + 1..n).any(|j| a.uses_var(j)) {
                return Err(Error::NonInvertibleAlpha(format!("alpha_{} uses later coordinates", i + 1)));
            }
            let mut mono = vec![0u32; i + 1];
            mono[i] = 1;
            let c = a.coeff(&mono);
            let rest = a.sub(&Poly::var(i).scale(&c));
            if c.is_zero() || rest.uses_var(i) {
                return Err(Error::NonInvertibleAlpha(format!(
                    "alpha_{} is not c*x_{} + (earlier terms) with c != 0",
                    i + 1,
                    i + 1
                )));
            }
            out.push((c, rest));
        }
        Ok(Some(out))
    }

    pub fn alpha(&self, g: &[Q]) -> Point {
        match &self.alpha {
            None => g.to_vec(),
            Some(a) => a.iter().map(|p| p.eval(g)).collect(),
        }
    }

    /// Checks `α(g*h) = α(g)*α(h)` exactly on random rational pairs.
    pub fn check_homomorphism(&self, law: &GroupLaw, samples: usize, seed: u64) -> Result<()> {
        if self.alpha.is_none() {
            return Ok(());
        }
        let n = law.dimension();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..samples {
            let g: Point = (0..n).map(|_| random_q(&mut rng, 5, 4)).collect();
            let h: Point = (0..n).map(|_| random_q(&mut rng, 5, 4)).collect();
            if self.alpha(&law.multiply(&g, &h)) != law.multiply(&self.alpha(&g), &self.alpha(&h)) {
                return Err(Error::Invalid("alpha is not a group homomorphism".into()));
            }
        }
        Ok(())
    }

    fn internal(&self, g: &[Q], d: usize) -> Vec<Q> {
        let mut l = mat_vec(&self.l_prime, &g[..d]);
        for (x, o) in l.iter_mut().zip(&self.offset) {
            *x += o;
        }
        l
    }

    /// `(L(g) + S) ∩ Z^m ≠ ∅`, decided exactly.
    pub fn window_hits(&self, l: &[Q]) -> bool {
        match &self.window {
            InternalWindow::Box(b) => (0..self.m).all(|j| {
                let shifted = CoordBox {
                    lo: vec![&b.lo[j] + &l[j]],
                    hi: vec![&b.hi[j] + &l[j]],
                    lo_closed: vec![b.lo_closed[j]],
                    hi_closed: vec![b.hi_closed[j]],
                };
                let (lo, hi) = shifted.multiple_range(0, &Q::one());
                lo <= hi
            }),
            InternalWindow::Parallelotope { vertex, edges } => {
                // columns of `e` are the edges; t = e^{-1} (k - l - vertex)
                let m = self.m;
                let e: Matrix = (0..m).map(|r| (0..m).map(|c| edges[c][r].clone()).collect()).collect();
                let Some(inv) = invert(&e) else { return false };
                let mut ranges = Vec::with_capacity(m);
                for r in 0..m {
                    let base = &vertex[r] + &l[r];
                    let lo: Q = edges.iter().map(|ed| ed[r].clone().min(Q::zero())).sum::<Q>() + &base;
                    let hi: Q = edges.iter().map(|ed| ed[r].clone().max(Q::zero())).sum::<Q>() + &base;
                    let (Some(a), Some(b)) = (ceil(&lo).to_i64(), floor(&hi).to_i64()) else { return false };
                    ranges.push((a, b));
                }
                grid(&ranges).iter().any(|k| {
                    let rel: Vec<Q> = (0..m).map(|r| q(k[r]) - &vertex[r] - &l[r]).collect();
                    mat_vec(&inv, &rel).iter().all(|t| !t.is_negative() && *t < Q::one())
                })
            }
        }
    }

    /// Exact membership test for `g ∈ Y`.
    pub fn contains(&self, g: &[Q], d: usize) -> bool {
        self.alpha(g).iter().all(|x| x.is_integer()) && self.window_hits(&self.internal(g, d))
    }
}

/// Interval enclosure of a polynomial over a box.
fn interval_eval(p: &Poly, lo: &[Q], hi: &[Q]) -> (Q, Q) {
    let mut acc = (Q::zero(), Q::zero());
    for (mono, c) in p.terms() {
        let mut t = (c.clone(), c.clone());
        for (i, &e) in mono.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let pw = |x: &Q| (0..e).fold(Q::one(), |a, _| a * x);
            let (a, b) = (pw(&lo[i]), pw(&hi[i]));
            let mut f = (a.clone().min(b.clone()), a.max(b));
            if e % 2 == 0 && lo[i].is_negative() && hi[i].is_positive() {
                f.0 = Q::zero();
            }
            let prods = [&t.0 * &f.0, &t.0 * &f.1, &t.1 * &f.0, &t.1 * &f.1];
            t = (prods.iter().min().unwrap().clone(), prods.iter().max().unwrap().clone());
        }
        acc = (acc.0 + t.0, acc.1 + t.1);
    }
    acc
}

/// Generated points of `Y` in a window, lexicographic.
#[derive(Clone, Debug)]
pub struct QCPointSet {
    pub window: CoordBox,
    pub points: Vec<Point>,
    pub candidates: u128,
}

pub fn qc_generate(law: &GroupLaw, spec: &QCSpec, window: &CoordBox) -> Result<QCPointSet> {
    let n = law.dimension();
    check_dim(n, window.dimension())?;
    let d = abelian_rank(law)?;
    let inv = spec.alpha_inverse_data(n)?;
    if window.is_empty() {
        return Ok(QCPointSet { window: window.clone(), points: vec![], candidates: 0 });
    }
    let ranges: Vec<(i64, i64)> = match &spec.alpha {
        None => (0..n).map(|i| window.int_range(i, &Q::one())).collect(),
        Some(alpha) => alpha
            .iter()
            .map(|p| {
                let (a, b) = interval_eval(p, &window.lo, &window.hi);
                match (ceil(&a).to_i64(), floor(&b).to_i64()) {
                    (Some(a), Some(b)) => Ok((a, b)),
                    _ => Err(Error::WindowUnbounded),
                }
            })
            .collect::<Result<_>>()?,
    };
    let candidates: u128 = ranges.iter().map(|(a, b)| if b < a { 0 } else { (b - a + 1) as u128 }).product();
    if candidates > MAX_CANDIDATES {
        return Err(Error::WindowUnbounded);
    }
    let points = match &inv {
        // the window condition only sees the first d coordinates
        None => {
            let heads: Vec<Vec<i64>> = grid(&ranges[..d])
                .into_par_iter()
                .filter(|h| {
                    let g: Vec<Q> = h.iter().map(|&v| q(v)).collect();
                    spec.window_hits(&spec.internal(&g, d))
                })
                .collect();
            let tails = grid(&ranges[d..]);
            let mut pts: Vec<Point> = heads
                .iter()
                .flat_map(|h| tails.iter().map(move |t| h.iter().chain(t).map(|&v| q(v)).collect::<Point>()))
                .collect();
            pts.sort();
            pts
        }
        Some(rows) => {
            let mut pts: Vec<Point> = grid(&ranges)
                .into_par_iter()
                .filter_map(|h| {
                    let mut g: Vec<Q> = Vec::with_capacity(n);
                    for (i, (c, f)) in rows.iter().enumerate() {
                        let mut padded = g.clone();
                        padded.resize(i + 1, Q::zero());
                        g.push((q(h[i]) - f.eval(&padded)) / c);
                    }
                    (window.contains(&g) && spec.window_hits(&spec.internal(&g, d))).then_some(g)
                })
                .collect();
            pts.sort();
            pts
        }
    };
    Ok(QCPointSet { window: window.clone(), points, candidates })
}

/// A quasicrystal as a [`Net`]; cell counts assume `α` is the identity, so
/// that `Y ⊂ G(Z)` and each cell holds at most its base point.
pub struct QuasiCrystal<'a> {
    law: &'a GroupLaw,
    spec: QCSpec,
    d: usize,
}

impl<'a> QuasiCrystal<'a> {
    pub fn new(law: &'a GroupLaw, spec: QCSpec) -> Result<Self> {
        if spec.alpha.is_some() {
            return Err(Error::MethodUnsupported(
                "cell counting needs alpha = id; generate points and use a PointSet".into(),
            ));
        }
        Ok(Self { law, d: abelian_rank(law)?, spec })
    }

    pub fn spec(&self) -> &QCSpec {
        &self.spec
    }
}

impl Net for QuasiCrystal<'_> {
    fn dimension(&self) -> usize {
        self.law.dimension()
    }

    fn cell_count(&self, cell: &[i64]) -> u64 {
        let g: Vec<Q> = cell[..self.d].iter().map(|&v| q(v)).collect();
        u64::from(self.spec.window_hits(&self.spec.internal(&g, self.d)))
    }

    fn points_in(&self, law: &GroupLaw, window: &CoordBox) -> Result<Vec<Point>> {
        Ok(qc_generate(law, &self.spec, window)?.points)
    }

    fn count_in_box(&self, _law: &GroupLaw, window: &CoordBox) -> Result<u64> {
        let n = self.law.dimension();
        let ranges: Vec<(i64, i64)> = (0..n).map(|i| window.int_range(i, &Q::one())).collect();
        if ranges.iter().any(|(a, b)| b < a) {
            return Ok(0);
        }
        let tail: u64 = ranges[self.d..].iter().map(|(a, b)| (b - a + 1) as u64).product();
        let heads = grid(&ranges[..self.d]).into_par_iter().filter(|h| self.cell_count(h) == 1).count() as u64;
        Ok(heads * tail)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Trend {
    Converging,
    Diverging,
}

#[derive(Clone, Debug, Serialize)]
pub struct DensityEntry {
    pub window: String,
    pub volume: f64,
    pub count: u64,
    pub covolume: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DensityReport {
    pub entries: Vec<DensityEntry>,
    pub trend: Trend,
}

/// Empirical covolume `‖W‖ / #(Y ∩ W)` over nested windows; converging when
/// the last step moves the estimate no more than the first.
pub fn qc_density(law: &GroupLaw, spec: &QCSpec, windows: &[CoordBox]) -> Result<DensityReport> {
    if windows.len() < 3 {
        return Err(Error::TooFewWindows(windows.len()));
    }
    let count = |w: &CoordBox| -> Result<u64> {
        match spec.alpha {
            None => QuasiCrystal::new(law, spec.clone())?.count_in_box(law, w),
            Some(_) => Ok(qc_generate(law, spec, w)?.points.len() as u64),
        }
    };
    let entries = windows
        .iter()
        .map(|w| {
            let count = count(w)?;
            let volume = to_f64(&w.volume());
            Ok(DensityEntry {
                window: w.to_string(),
                volume,
                count,
                covolume: if count == 0 { f64::INFINITY } else { volume / count as f64 },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let v: Vec<f64> = entries.iter().map(|e| e.covolume).collect();
    let first = (v[1] - v[0]).abs();
    let last = (v[v.len() - 1] - v[v.len() - 2]).abs();
    let trend =
        if v.iter().all(|x| x.is_finite()) && last <= first + 1e-12 { Trend::Converging } else { Trend::Diverging };
    Ok(DensityReport { entries, trend })
}

/// Golden-ratio conjugate `(√5 - 1)/2` to `digits` decimal places.
pub fn golden_theta(digits: u32) -> Q {
    // floor(10^digits (√5 - 1)/2) via integer square root
    let scale = BigInt::from(10u32).pow(digits);
    let root = (BigInt::from(5u32) * &scale * &scale).sqrt();
    Q::new((root - &scale) / 2u32, scale)
}

/// Liouville-type number `sum_{k=1}^{terms} 10^{-k!}`.
pub fn liouville_theta(terms: u32) -> Q {
    let mut out = Q::zero();
    let mut fact = 1u32;
    for k in 1..=terms {
        fact *= k;
        out += Q::new(BigInt::one(), BigInt::from(10u32).pow(fact));
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct ContrastRow {
    pub label: String,
    pub theta: String,
    pub sides: Vec<i64>,
    pub ratios: Vec<f64>,
    pub non_increasing: bool,
    pub strictly_increasing: bool,
}

/// Uniform-spread ratios of `L(g) = θ g_1`, `S = [0, 1/2)` quasicrystals on
/// the centred cubes `[-s/2, s/2)^n`.
pub fn qc_contrast(law: &GroupLaw, thetas: &[(String, Q)], sides: &[i64]) -> Result<Vec<ContrastRow>> {
    let il = law.require_integral()?;
    let fw = face_neighbors(law, &FaceSampling::default())?;
    let oracle = PerimeterOracle::new(il, &fw);
    let n = law.dimension();
    let sets: Vec<TestSet> =
        sides.iter().map(|&s| TestSet::Box(CoordBox::half_open(vec![qr(-s, 2); n], vec![qr(s, 2); n]))).collect();
    thetas
        .iter()
        .map(|(label, theta)| {
            let spec = QCSpec::slope(law, theta.clone(), qr(1, 2))?;
            let v = spec.covolume(n)?;
            let qc = QuasiCrystal::new(law, spec)?;
            let rep: SpreadReport = uniformly_spread_check(law, &oracle, &qc, &v, &sets)?;
            let ratios: Vec<f64> = rep.records.iter().map(|r| r.ratio).collect();
            Ok(ContrastRow {
                label: label.clone(),
                theta: fmt_q(theta),
                sides: sides.to_vec(),
                non_increasing: ratios.windows(2).all(|w| w[1] <= w[0]),
                strictly_increasing: ratios.windows(2).all(|w| w[1] > w[0]),
                ratios,
            })
        })
        .collect()
}

/// Reads a spec file:
///
/// ```text
/// m = 1
/// l1 = 6180339887/10000000000, 0     # row j of L' over the abelianized coordinates
/// window = [0,1/2)                   # or: vertex = .. and edge = .. (m lines)
/// alpha2 = x2 + 2*x1                 # optional; unlisted alpha_i = x_i
/// offset = 0
/// ```
pub fn parse_qc_spec(law: &GroupLaw, text: &str) -> Result<QCSpec> {
    let n = law.dimension();
    let lines = kv_lines(text)?;
    let names: Vec<String> = law.labels().to_vec();
    let mut m = None;
    let mut rows: Vec<(usize, Vec<Q>)> = Vec::new();
    let mut window = None;
    let mut vertex = None;
    let mut edges: Vec<Vec<Q>> = Vec::new();
    let mut alpha: Vec<(usize, KvLine)> = Vec::new();
    let mut offset = None;
    for kv in &lines {
        let perr = |msg: String| Error::Parse { line: kv.line, msg };
        let qs = |kv: &KvLine| parse_list(kv, parse_q);
        match kv.key.as_str() {
            "m" => m = Some(kv.value.parse::<usize>().map_err(|_| perr("m must be a count".into()))?),
            "window" => window = Some(CoordBox::parse(&kv.value).map_err(|e| perr(e.to_string()))?),
            "vertex" => vertex = Some(qs(kv)?),
            "edge" => edges.push(qs(kv)?),
            "offset" => offset = Some(qs(kv)?),
            key if key.starts_with('l') && key[1..].parse::<usize>().is_ok_and(|j| j >= 1) => {
                rows.push((key[1..].parse::<usize>().unwrap() - 1, qs(kv)?));
            }
            key if key.starts_with("alpha") && key[5..].parse::<usize>().is_ok_and(|i| (1..=n).contains(&i)) => {
                alpha.push((key[5..].parse::<usize>().unwrap() - 1, kv.clone()));
            }
            other => return Err(perr(format!("unknown key {other:?}"))),
        }
    }
    let m = m.ok_or(Error::Parse { line: 0, msg: "missing m".into() })?;
    let d = abelian_rank(law)?;
    let mut l_prime = vec![vec![Q::zero(); d]; m];
    for (j, row) in rows {
        if j >= m {
            return Err(Error::Invalid(format!("row l{} exceeds m = {m}", j + 1)));
        }
        check_dim(d, row.len())?;
        l_prime[j] = row;
    }
    let window = match (window, vertex) {
        (Some(b), None) => InternalWindow::Box(b),
        (None, Some(v)) => InternalWindow::Parallelotope { vertex: v, edges },
        _ => return Err(Error::Invalid("give exactly one of window or vertex/edge".into())),
    };
    let alpha = if alpha.is_empty() {
        None
    } else {
        let mut polys: Vec<Poly> = (0..n).map(Poly::var).collect();
        for (i, kv) in alpha {
            polys[i] =
                Poly::parse(&kv.value, &names).map_err(|e| Error::Parse { line: kv.line, msg: e.to_string() })?;
        }
        Some(polys)
    };
    let spec = QCSpec::new(law, alpha, l_prime, window)?;
    match offset {
        Some(o) => spec.with_offset(o),
        None => Ok(spec),
    }
}
