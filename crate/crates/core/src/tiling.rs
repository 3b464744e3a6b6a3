//! Lattice nets `G(Λ)`, their box tilings, face adjacency of the unit tiling
//! and the combinatorial perimeter of tile regions.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{check_dim, Error, Result};
use crate::group::{to_int_point, GroupLaw, IntegralLaw, Metric, Point};
use crate::rational::{ceil, floor, fmt_q, parse_q, q, qr, to_f64, Q};

/// Side lengths `λ_1..λ_n` of the fundamental box.
#[derive(Clone, Debug, PartialEq)]
pub struct Lambda(Vec<Q>);

impl Lambda {
    pub fn new(v: Vec<Q>) -> Result<Self> {
        if v.is_empty() || v.iter().any(|x| !x.is_positive()) {
            return Err(Error::Invalid("lambda entries must be positive".into()));
        }
        Ok(Self(v))
    }

    pub fn unit(n: usize) -> Self {
        Self(vec![Q::one(); n])
    }

    pub fn from_ints(v: &[i64]) -> Result<Self> {
        Self::new(v.iter().map(|&x| q(x)).collect())
    }

    pub fn parse(s: &str) -> Result<Self> {
        let v = s.trim_matches(|c| c == '(' || c == ')').split(',').map(parse_q).collect::<Result<Vec<_>>>()?;
        Self::new(v)
    }

    pub fn dimension(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[Q] {
        &self.0
    }

    pub fn covolume(&self) -> Q {
        self.0.iter().fold(Q::one(), |acc, x| acc * x)
    }

    /// Integer entries, if all are integers.
    pub fn as_ints(&self) -> Option<Vec<i64>> {
        to_int_point(&self.0)
    }

    /// Whether `x` lies in the half-open box `prod [-λ_i/2, λ_i/2)`.
    pub fn box_contains(&self, x: &[Q]) -> bool {
        x.iter().zip(&self.0).all(|(v, l)| {
            let h = l / q(2);
            *v >= -h.clone() && *v < h
        })
    }
}

impl fmt::Display for Lambda {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(fmt_q).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Axis-parallel box with per-side open/closed flags.
#[derive(Clone, Debug, PartialEq)]
pub struct CoordBox {
    pub lo: Vec<Q>,
    pub hi: Vec<Q>,
    pub lo_closed: Vec<bool>,
    pub hi_closed: Vec<bool>,
}

impl CoordBox {
    /// Closed box `prod [lo_i, hi_i]`.
    pub fn closed(lo: Vec<Q>, hi: Vec<Q>) -> Self {
        let n = lo.len();
        Self { lo, hi, lo_closed: vec![true; n], hi_closed: vec![true; n] }
    }

    /// Half-open box `prod [lo_i, hi_i)`.
    pub fn half_open(lo: Vec<Q>, hi: Vec<Q>) -> Self {
        let n = lo.len();
        Self { lo, hi, lo_closed: vec![true; n], hi_closed: vec![false; n] }
    }

    /// Closed cube `[-r, r]^n`.
    pub fn cube(n: usize, r: Q) -> Self {
        Self::closed(vec![-r.clone(); n], vec![r; n])
    }

    /// Parse `[a,b]x[c,d)x(e,f]` or `[a,b]^n`.
    pub fn parse(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::Invalid(format!("bad window {s:?}; expected e.g. [-2,2]x[0,4) or [-1,1]^3"));
        let (body, power) = match s.rsplit_once('^') {
            Some((b, p)) if p.chars().all(|c| c.is_ascii_digit()) && !p.is_empty() => {
                (b.to_string(), p.parse::<usize>().map_err(|_| bad())?)
            }
            _ => (s.clone(), 1),
        };
        let mut out = CoordBox { lo: vec![], hi: vec![], lo_closed: vec![], hi_closed: vec![] };
        for part in body.split(['x', '×']) {
            let part = part.trim();
            let mut chars = part.chars();
            let open = chars.next().ok_or_else(bad)?;
            let close = part.chars().last().ok_or_else(bad)?;
            if !matches!(open, '[' | '(') || !matches!(close, ']' | ')') || part.len() < 2 {
                return Err(bad());
            }
            let inner = &part[1..part.len() - 1];
            let (a, b) = inner.split_once(',').ok_or_else(bad)?;
            out.lo.push(parse_q(a)?);
            out.hi.push(parse_q(b)?);
            out.lo_closed.push(open == '[');
            out.hi_closed.push(close == ']');
        }
        if power > 1 {
            if out.lo.len() != 1 {
                return Err(bad());
            }
            out.lo = vec![out.lo[0].clone(); power];
            out.hi = vec![out.hi[0].clone(); power];
            out.lo_closed = vec![out.lo_closed[0]; power];
            out.hi_closed = vec![out.hi_closed[0]; power];
        }
        if power == 0 {
            return Err(bad());
        }
        Ok(out)
    }

    pub fn dimension(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, x: &[Q]) -> bool {
        (0..self.dimension()).all(|i| {
            let lo_ok = if self.lo_closed[i] { x[i] >= self.lo[i] } else { x[i] > self.lo[i] };
            let hi_ok = if self.hi_closed[i] { x[i] <= self.hi[i] } else { x[i] < self.hi[i] };
            lo_ok && hi_ok
        })
    }

    pub fn contains_int(&self, x: &[i64]) -> bool {
        (0..self.dimension()).all(|i| {
            let (lo, hi) = self.int_range(i, &Q::one());
            lo <= x[i] && x[i] <= hi
        })
    }

    /// Inclusive range of `k` with `k * step` inside axis `i`.
    pub fn multiple_range(&self, i: usize, step: &Q) -> (BigInt, BigInt) {
        let a = &self.lo[i] / step;
        let b = &self.hi[i] / step;
        let lo = if self.lo_closed[i] { ceil(&a) } else { floor(&a) + 1 };
        let hi = if self.hi_closed[i] { floor(&b) } else { ceil(&b) - 1 };
        (lo, hi)
    }

    /// Inclusive `i64` range of multiples of `step` (as multipliers).
    pub fn int_range(&self, i: usize, step: &Q) -> (i64, i64) {
        let (lo, hi) = self.multiple_range(i, step);
        (lo.to_i64().unwrap_or(i64::MAX), hi.to_i64().unwrap_or(i64::MIN))
    }

    pub fn is_empty(&self) -> bool {
        (0..self.dimension())
            .any(|i| self.lo[i] > self.hi[i] || (self.lo[i] == self.hi[i] && !(self.lo_closed[i] && self.hi_closed[i])))
    }

    pub fn volume(&self) -> Q {
        (0..self.dimension()).fold(Q::one(), |acc, i| acc * (&self.hi[i] - &self.lo[i]))
    }

    /// The integer points of the box as an inclusive integer box.
    pub fn int_box(&self) -> IntBox {
        let (lo, hi) = (0..self.dimension()).map(|i| self.int_range(i, &Q::one())).unzip();
        IntBox { lo, hi }
    }

    /// Whether `other` lies inside this box.
    pub fn contains_box(&self, other: &CoordBox) -> bool {
        (0..self.dimension()).all(|i| {
            let lo_ok =
                other.lo[i] > self.lo[i] || (other.lo[i] == self.lo[i] && (self.lo_closed[i] || !other.lo_closed[i]));
            let hi_ok =
                other.hi[i] < self.hi[i] || (other.hi[i] == self.hi[i] && (self.hi_closed[i] || !other.hi_closed[i]));
            lo_ok && hi_ok
        })
    }

    /// Integer points of the box, lexicographic.
    pub fn int_points(&self) -> Vec<Vec<i64>> {
        let ranges: Vec<(i64, i64)> = (0..self.dimension()).map(|i| self.int_range(i, &Q::one())).collect();
        grid(&ranges)
    }

    pub fn count_int_points(&self) -> u128 {
        (0..self.dimension())
            .map(|i| {
                let (lo, hi) = self.int_range(i, &Q::one());
                if hi < lo {
                    0
                } else {
                    (hi - lo + 1) as u128
                }
            })
            .product()
    }
}

impl fmt::Display for CoordBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = (0..self.dimension())
            .map(|i| {
                format!(
                    "{}{},{}{}",
                    if self.lo_closed[i] { '[' } else { '(' },
                    fmt_q(&self.lo[i]),
                    fmt_q(&self.hi[i]),
                    if self.hi_closed[i] { ']' } else { ')' }
                )
            })
            .collect();
        f.write_str(&parts.join("x"))
    }
}

/// Inclusive integer box `lo..=hi`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntBox {
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
}

impl IntBox {
    pub fn contains(&self, x: &[i64]) -> bool {
        x.iter().zip(self.lo.iter().zip(&self.hi)).all(|(v, (a, b))| a <= v && v <= b)
    }

    pub fn points(&self) -> Vec<Vec<i64>> {
        let ranges: Vec<(i64, i64)> = self.lo.iter().copied().zip(self.hi.iter().copied()).collect();
        grid(&ranges)
    }

    pub fn len(&self) -> u128 {
        self.lo.iter().zip(&self.hi).map(|(a, b)| if b < a { 0 } else { (b - a + 1) as u128 }).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Lexicographic product of inclusive integer ranges.
pub fn grid(ranges: &[(i64, i64)]) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::with_capacity(ranges.len())];
    for &(lo, hi) in ranges {
        if hi < lo {
            return Vec::new();
        }
        let mut next = Vec::with_capacity(out.len() * (hi - lo + 1) as usize);
        for p in &out {
            for v in lo..=hi {
                let mut p = p.clone();
                p.push(v);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

/// Points of `G(Λ)` in the window, lexicographic.
pub fn lambda_net(law: &GroupLaw, lambda: &Lambda, window: &CoordBox) -> Result<Vec<Point>> {
    check_dim(law.dimension(), lambda.dimension())?;
    check_dim(law.dimension(), window.dimension())?;
    if window.is_empty() {
        return Err(Error::EmptyWindow);
    }
    let ranges: Vec<(i64, i64)> = (0..law.dimension()).map(|i| window.int_range(i, &lambda.0[i])).collect();
    Ok(grid(&ranges).into_iter().map(|k| k.iter().zip(&lambda.0).map(|(k, l)| l * q(*k)).collect()).collect())
}

fn round_to(c: &Q, l: &Q) -> Q {
    let k = floor(&(c / l + qr(1, 2)));
    l * Q::from_integer(k)
}

/// The unique `g ∈ G(Λ)` with `g^{-1} * x` in the half-open Λ-box.
pub fn locate_tile(law: &GroupLaw, x: &[Q], lambda: &Lambda) -> Point {
    let n = law.dimension();
    let mut g = law.identity();
    for i in 0..n {
        // coordinate i of g^{-1}*x is affine in g_i with slope -1
        let c = law.left_quotient(&g, x)[i].clone();
        g[i] = round_to(&c, &lambda.0[i]);
    }
    g
}

/// Unit-cell location in floating point, for Monte Carlo work.
pub fn locate_cell_f64(law: &GroupLaw, x: &[f64]) -> Vec<i64> {
    let n = law.dimension();
    let mut g = vec![0.0f64; n];
    for i in 0..n {
        let c = law.mul_generic(&law.inv_generic(&g), x)[i];
        g[i] = (c + 0.5).floor();
    }
    g.into_iter().map(|v| v as i64).collect()
}

/// `(g, g^{-1} * x)` for the tile containing `x`.
pub fn locate_with_residual(law: &GroupLaw, x: &[Q], lambda: &Lambda) -> (Point, Point) {
    let g = locate_tile(law, x, lambda);
    let r = law.left_quotient(&g, x);
    (g, r)
}

/// Faces of the unit tile `I_G`: neighbor `h` names the tile `h * I_G`.
#[derive(Clone, Debug, PartialEq)]
pub struct FaceWeights {
    /// Neighbor, weight, and the facet axis it was found through.
    pub faces: Vec<(Vec<i64>, Q, usize)>,
}

impl FaceWeights {
    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    pub fn weight(&self, h: &[i64]) -> Option<&Q> {
        self.faces.iter().find(|(f, _, _)| f == h).map(|(_, w, _)| w)
    }

    pub fn total_weight(&self) -> Q {
        self.faces.iter().fold(Q::zero(), |acc, (_, w, _)| acc + w)
    }
}

/// Sampling parameters for face detection.
#[derive(Clone, Debug)]
pub struct FaceSampling {
    pub per_axis: usize,
    pub eps: Q,
}

impl Default for FaceSampling {
    fn default() -> Self {
        Self { per_axis: 3, eps: qr(1, 1000) }
    }
}

/// Neighbors of `I_G` across each facet of the unit cube, found by pushing
/// sampled facet points just outside and locating them. Weights: the two
/// horizontal faces (last axis) get 1; a vertical face gets the weight of
/// its projected face in `G'`, split equally among all preimages.
pub fn face_neighbors(law: &GroupLaw, sampling: &FaceSampling) -> Result<FaceWeights> {
    let n = law.dimension();
    let found = raw_neighbors(law, sampling)?;
    if n == 1 {
        return Ok(FaceWeights { faces: found.into_iter().map(|(h, a)| (h, Q::one(), a)).collect() });
    }
    let projected = face_neighbors(&law.project()?, sampling)?;
    let mut groups: BTreeMap<Vec<i64>, usize> = BTreeMap::new();
    for (h, axis) in &found {
        if *axis < n - 1 {
            *groups.entry(h[..n - 1].to_vec()).or_default() += 1;
        }
    }
    let mut faces = Vec::with_capacity(found.len());
    for (h, axis) in found {
        let w = if axis == n - 1 {
            Q::one()
        } else {
            let ph = &h[..n - 1];
            let base = projected.weight(ph).cloned().ok_or_else(|| Error::DegenerateFace(axis + 1))?;
            base / q(groups[ph] as i64)
        };
        faces.push((h, w, axis));
    }
    Ok(FaceWeights { faces })
}

fn raw_neighbors(law: &GroupLaw, sampling: &FaceSampling) -> Result<Vec<(Vec<i64>, usize)>> {
    let n = law.dimension();
    let m = sampling.per_axis;
    let unit = Lambda::unit(n);
    let offsets: Vec<Q> = (0..m).map(|k| qr(2 * k as i64 + 1, 2 * m as i64) - qr(1, 2)).collect();
    let mut seen: BTreeSet<(Vec<i64>, usize)> = BTreeSet::new();
    let half = qr(1, 2);
    for axis in 0..n {
        let free: Vec<usize> = (0..n).filter(|&i| i != axis).collect();
        let ranges: Vec<(i64, i64)> = free.iter().map(|_| (0, m as i64 - 1)).collect();
        let combos = if free.is_empty() { vec![vec![]] } else { grid(&ranges) };
        for side in [-1i64, 1] {
            let mut hit = false;
            for combo in &combos {
                let mut x = vec![Q::zero(); n];
                for (slot, &i) in free.iter().enumerate() {
                    x[i] = offsets[combo[slot] as usize].clone();
                }
                x[axis] = q(side) * (&half + &sampling.eps);
                let g = locate_tile(law, &x, &unit);
                if g.iter().all(Zero::is_zero) {
                    continue;
                }
                let g = to_int_point(&g).ok_or(Error::Overflow)?;
                seen.insert((g, axis));
                hit = true;
            }
            if !hit {
                return Err(Error::DegenerateFace(axis + 1));
            }
        }
    }
    // close under inversion
    let snapshot: Vec<(Vec<i64>, usize)> = seen.iter().cloned().collect();
    for (h, axis) in snapshot {
        let inv = to_int_point(&law.invert(&crate::group::to_q_point(&h))).ok_or(Error::NonIntegralLaw)?;
        seen.insert((inv, axis));
    }
    Ok(seen.into_iter().collect())
}

/// A finite set of unit tiles `g * I_G`, `g ∈ G(Z)`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Region {
    tiles: HashSet<Vec<i64>>,
}

impl Region {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_points<I: IntoIterator<Item = Vec<i64>>>(pts: I) -> Self {
        Self { tiles: pts.into_iter().collect() }
    }

    /// All integer points of an inclusive coordinate box `lo..=hi`.
    pub fn from_box(lo: &[i64], hi: &[i64]) -> Self {
        let ranges: Vec<(i64, i64)> = lo.iter().zip(hi).map(|(a, b)| (*a, *b)).collect();
        Self::from_points(grid(&ranges))
    }

    pub fn insert(&mut self, g: Vec<i64>) -> bool {
        self.tiles.insert(g)
    }

    pub fn remove(&mut self, g: &[i64]) -> bool {
        self.tiles.remove(g)
    }

    pub fn contains(&self, g: &[i64]) -> bool {
        self.tiles.contains(g)
    }

    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Vec<i64>> {
        self.tiles.iter()
    }

    pub fn sorted(&self) -> Vec<Vec<i64>> {
        let mut v: Vec<Vec<i64>> = self.tiles.iter().cloned().collect();
        v.sort();
        v
    }

    /// Inclusive bounding box `(lo, hi)`.
    pub fn bounds(&self) -> Option<(Vec<i64>, Vec<i64>)> {
        let mut it = self.tiles.iter();
        let first = it.next()?;
        let (mut lo, mut hi) = (first.clone(), first.clone());
        for t in it {
            for i in 0..t.len() {
                lo[i] = lo[i].min(t[i]);
                hi[i] = hi[i].max(t[i]);
            }
        }
        Some((lo, hi))
    }

    pub fn union(&self, other: &Region) -> Region {
        Region { tiles: self.tiles.union(&other.tiles).cloned().collect() }
    }

    pub fn project(&self) -> Region {
        Region::from_points(self.tiles.iter().map(|t| t[..t.len() - 1].to_vec()))
    }
}

/// `sum_{g ∈ A} sum_{h ∈ N, g*h ∉ A} w(h)`.
pub fn combinatorial_perimeter(law: &IntegralLaw, region: &Region, fw: &FaceWeights) -> Result<Q> {
    let tiles: Vec<&Vec<i64>> = region.tiles.iter().collect();
    let counts: Vec<u64> = fw
        .faces
        .par_iter()
        .map(|(h, _, _)| {
            tiles.iter().try_fold(0u64, |acc, g| {
                let gh = law.mul(g, h)?;
                Ok(acc + u64::from(!region.contains(&gh)))
            })
        })
        .collect::<Result<Vec<u64>>>()?;
    Ok(counts.iter().zip(&fw.faces).fold(Q::zero(), |acc, (c, (_, w, _))| acc + w * q(*c as i64)))
}

/// [`combinatorial_perimeter`] of the cells of an integer box, one column
/// along the last axis at a time: the last coordinate of `g*h` is
/// `g_n + h_n + p_n(g_<n, h_<n)`, a shift independent of `g_n`.
pub fn combinatorial_perimeter_box(law: &IntegralLaw, ib: &IntBox, fw: &FaceWeights) -> Result<Q> {
    let n = law.dimension();
    if ib.is_empty() {
        return Ok(Q::zero());
    }
    let len = (ib.hi[n - 1] - ib.lo[n - 1] + 1) as u128;
    let base = IntBox { lo: ib.lo[..n - 1].to_vec(), hi: ib.hi[..n - 1].to_vec() };
    let columns = base.points();
    let counts: Vec<u128> = fw
        .faces
        .par_iter()
        .map(|(h, _, _)| {
            columns.iter().try_fold(0u128, |acc, c| {
                let mut g = c.clone();
                g.push(ib.lo[n - 1]);
                let gh = law.mul(&g, h)?;
                let out = if base.contains(&gh[..n - 1]) {
                    let shift = (gh[n - 1] - ib.lo[n - 1]).unsigned_abs() as u128;
                    shift.min(len)
                } else {
                    len
                };
                Ok(acc + out)
            })
        })
        .collect::<Result<Vec<u128>>>()?;
    Ok(counts.iter().zip(&fw.faces).fold(Q::zero(), |acc, (c, (_, w, _))| acc + w * Q::from_integer(BigInt::from(*c))))
}

/// Parameters of the covering-radius scan in [`separation_constants`].
#[derive(Clone, Debug)]
pub struct SeparationConfig {
    pub metric: Metric,
    /// Grid pitch of the sample points used for `C_est`.
    pub pitch: f64,
    /// Sample points stay this far inside the window (per axis).
    pub margin: f64,
}

impl Default for SeparationConfig {
    fn default() -> Self {
        Self { metric: Metric::QuasiMax, pitch: 0.5, margin: 0.0 }
    }
}

/// `(c_est, C_est)`: half the minimal pairwise distance of the points in the
/// window, and the largest distance from a grid sample point to the set.
pub fn separation_constants(
    law: &GroupLaw,
    points: &[Point],
    window: &CoordBox,
    cfg: &SeparationConfig,
) -> Result<(f64, f64)> {
    let pts: Vec<Vec<f64>> =
        points.iter().filter(|p| window.contains(p)).map(|p| p.iter().map(to_f64).collect()).collect();
    if pts.len() < 2 {
        return Err(Error::TooFewPoints);
    }
    let c = min_pairwise_distance(law, &pts, cfg.metric) / 2.0;
    let big_c = covering_radius(law, &pts, window, cfg);
    Ok((c, big_c))
}

fn first_weight(law: &GroupLaw, metric: Metric) -> i32 {
    if metric == Metric::Euclidean {
        1
    } else {
        law.weights()[0] as i32
    }
}

/// Minimal pairwise distance. A sweep over the first coordinate, valid since
/// `|y_1 - x_1| <= d(x, y)^{w_1}` for every supported metric.
pub fn min_pairwise_distance(law: &GroupLaw, pts: &[Vec<f64>], metric: Metric) -> f64 {
    let mut sorted: Vec<&Vec<f64>> = pts.iter().collect();
    sorted.sort_by(|a, b| a[0].total_cmp(&b[0]));
    let w1 = first_weight(law, metric);
    let mut best = f64::INFINITY;
    for i in 0..sorted.len() {
        for j in i + 1..sorted.len() {
            if sorted[j][0] - sorted[i][0] > best.powi(w1) {
                break;
            }
            let d = metric.distance_f64(law, sorted[i], sorted[j]);
            if d < best {
                best = d;
            }
        }
    }
    best
}

fn nearest_distance(law: &GroupLaw, sorted: &[&Vec<f64>], x: &[f64], metric: Metric) -> f64 {
    let w1 = first_weight(law, metric);
    let start = sorted.partition_point(|p| p[0] < x[0]);
    let mut best = f64::INFINITY;
    let mut lo = start as isize - 1;
    let mut hi = start;
    loop {
        let mut progressed = false;
        if hi < sorted.len() && sorted[hi][0] - x[0] <= best.powi(w1) {
            best = best.min(metric.distance_f64(law, x, sorted[hi]));
            hi += 1;
            progressed = true;
        }
        if lo >= 0 && x[0] - sorted[lo as usize][0] <= best.powi(w1) {
            best = best.min(metric.distance_f64(law, x, sorted[lo as usize]));
            lo -= 1;
            progressed = true;
        }
        if !progressed {
            return best;
        }
    }
}

fn covering_radius(law: &GroupLaw, pts: &[Vec<f64>], window: &CoordBox, cfg: &SeparationConfig) -> f64 {
    let mut sorted: Vec<&Vec<f64>> = pts.iter().collect();
    sorted.sort_by(|a, b| a[0].total_cmp(&b[0]));
    let axes: Vec<Vec<f64>> = (0..window.dimension())
        .map(|i| {
            let lo = to_f64(&window.lo[i]) + cfg.margin;
            let hi = to_f64(&window.hi[i]) - cfg.margin;
            let steps = ((hi - lo) / cfg.pitch).floor().max(0.0) as usize;
            (0..=steps).map(|k| lo + k as f64 * cfg.pitch).collect()
        })
        .collect();
    let ranges: Vec<(i64, i64)> = axes.iter().map(|a| (0, a.len() as i64 - 1)).collect();
    grid(&ranges)
        .par_iter()
        .map(|idx| {
            let x: Vec<f64> = idx.iter().enumerate().map(|(i, k)| axes[i][*k as usize]).collect();
            nearest_distance(law, &sorted, &x, cfg.metric)
        })
        .reduce(|| 0.0, f64::max)
}
