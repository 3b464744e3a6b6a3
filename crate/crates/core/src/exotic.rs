//! Exotic nets in step-2 groups with one-dimensional centre: `G(Z)` with
//! Euclidean balls `E_i` of radius `i` carved out far along the line
//! `x_q = θ x_p`, plus points pushed a distance `~1/i` off the lattice.
//!
//! The law must read `p_k = 0` for `k < n` and
//! `p_n = sum a_jk a_j b_k` with `a_jk = -a_kj`. The construction runs in the
//! plane of a pair of axes `(p, q)` with `a_pq ≠ 0`; the first such pair is
//! used unless another is given.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::criteria::{strong_bd_from_differences, StrongBdConfig, StrongBdReport};
use crate::dyadic::enumerate_dyadic;
use crate::error::{check_dim, Error, Result};
use crate::group::{to_int_point, to_q_point, GroupLaw, Metric, Point};
use crate::net::Net;
use crate::rational::{ceil, floor, fmt_q, q, to_f64, Q};
use crate::tiling::{grid, locate_tile, separation_constants, CoordBox, Lambda, SeparationConfig};

/// Growth of the `x_E` schedule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ScheduleMode {
    /// `x_E(i) = x_θ(i, i) + 2^{i²}`.
    Standard,
    /// `x_E(i) = 4^i x_θ(i, i)`; a smaller layout for pictures only, with
    /// no discrepancy guarantee.
    Compressed,
}

#[derive(Clone, Debug)]
pub struct ExoticSpec {
    pub theta: Q,
    pub i_max: u32,
    pub axes: (usize, usize),
    pub mode: ScheduleMode,
    /// `a[j][k]` for `j, k < n - 1`.
    pub a: Vec<Vec<Q>>,
    n: usize,
}

/// The skew form of a step-2 one-centre law, or `NotStepTwo`.
pub fn shear_coefficients(law: &GroupLaw) -> Result<Vec<Vec<Q>>> {
    let n = law.dimension();
    if n < 3 {
        return Err(Error::NotStepTwo(format!("dimension {n} is too small")));
    }
    let polys = law.polys();
    if polys[..n - 1].iter().any(|p| !p.is_zero()) {
        return Err(Error::NotStepTwo("only the last coordinate may be non-additive".into()));
    }
    let m = n - 1;
    let mut a = vec![vec![Q::zero(); m]; m];
    for (mono, c) in polys[n - 1].terms() {
        let vars: Vec<usize> = mono.iter().enumerate().flat_map(|(i, &e)| std::iter::repeat_n(i, e as usize)).collect();
        match vars.as_slice() {
            [j, k] if *j < m && *k >= n && *k - n < m => a[*j][*k - n] = c.clone(),
            _ => return Err(Error::NotStepTwo("last law polynomial must be bilinear in a_<n, b_<n".into())),
        }
    }
    for j in 0..m {
        for k in 0..m {
            if a[j][k] != -a[k][j].clone() {
                return Err(Error::NotStepTwo(format!("a_{}{} != -a_{}{}", j + 1, k + 1, k + 1, j + 1)));
            }
        }
    }
    if a.iter().all(|r| r.iter().all(Zero::is_zero)) {
        return Err(Error::NotStepTwo("law is abelian".into()));
    }
    Ok(a)
}

impl ExoticSpec {
    pub fn new(law: &GroupLaw, theta: Q, i_max: u32) -> Result<Self> {
        let a = shear_coefficients(law)?;
        let m = a.len();
        let axes = (0..m)
            .flat_map(|p| (p + 1..m).map(move |q| (p, q)))
            .find(|&(p, q)| !a[p][q].is_zero())
            .expect("non-abelian form has a nonzero entry");
        Self::with_axes(law, theta, i_max, axes)
    }

    pub fn with_axes(law: &GroupLaw, theta: Q, i_max: u32, axes: (usize, usize)) -> Result<Self> {
        let a = shear_coefficients(law)?;
        let (p, q) = axes;
        if p == q || p >= a.len() || q >= a.len() || a[p][q].is_zero() {
            return Err(Error::Invalid(format!("need a_pq != 0 for axes ({}, {})", p + 1, q + 1)));
        }
        if !(theta.is_positive() && theta < Q::from_integer(1.into())) {
            return Err(Error::Invalid("theta must lie in (0, 1)".into()));
        }
        if i_max == 0 {
            return Err(Error::Invalid("i_max must be at least 1".into()));
        }
        Ok(Self { theta, i_max, axes, mode: ScheduleMode::Standard, a, n: law.dimension() })
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    /// `v_k = a_pk + θ a_qk`, the slab direction.
    pub fn slab_vector(&self) -> Vec<Q> {
        let (p, q) = self.axes;
        (0..self.n - 1).map(|k| &self.a[p][k] + &self.theta * &self.a[q][k]).collect()
    }

    pub fn f(i: u32) -> i64 {
        i as i64 + (1i64 << i)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SlabStats {
    pub level: u32,
    /// `None` at level 0, where the tile is a single point.
    pub gap: Option<String>,
    pub slabs: usize,
    pub max_slab: usize,
}

/// Slab structure of the level-`ℓ` tile at the origin: the minimal nonzero
/// gap between values of `v · (x_1..x_{n-1})`, found by sorting.
pub fn slab_gap(law: &GroupLaw, spec: &ExoticSpec, level: u32) -> Result<(Option<Q>, SlabStats)> {
    let n = spec.n;
    let tile = enumerate_dyadic(law, &vec![Q::zero(); n], level)?;
    let v = spec.slab_vector();
    let mut slabs: BTreeMap<Q, usize> = BTreeMap::new();
    for t in &tile {
        let val: Q = t[..n - 1].iter().zip(&v).map(|(x, c)| x * c).sum();
        *slabs.entry(val).or_default() += 1;
    }
    let keys: Vec<&Q> = slabs.keys().collect();
    let gap = keys.windows(2).map(|w| w[1] - w[0]).min();
    let stats = SlabStats {
        level,
        gap: gap.as_ref().map(fmt_q),
        slabs: slabs.len(),
        max_slab: slabs.values().copied().max().unwrap_or(0),
    };
    if level > 0 && gap.is_none() {
        return Err(Error::DegenerateForm);
    }
    Ok((gap, stats))
}

#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub level: u32,
    pub i: u32,
    pub x_theta: i64,
    pub basepoint: Vec<i64>,
    /// Points of the sheared tile with last coordinate in `[-i, i]`.
    pub count: usize,
    pub bound: u64,
    pub ok: bool,
}

/// `x_θ(ℓ, i)` for `0 <= ℓ, i <= i_max` and `x_E(i)` for `1 <= i <= i_max`.
#[derive(Clone, Debug, Serialize)]
pub struct Schedule {
    pub x_theta: Vec<Vec<i64>>,
    pub x_e: Vec<i64>,
    pub slabs: Vec<SlabStats>,
    pub certificates: Vec<Certificate>,
}

impl Schedule {
    pub fn x_theta(&self, level: u32, i: u32) -> i64 {
        self.x_theta[level as usize][i as usize]
    }

    /// `x_E(i)`, `1 <= i <= i_max`.
    pub fn x_e(&self, i: u32) -> i64 {
        self.x_e[i as usize - 1]
    }

    pub fn certified(&self) -> bool {
        self.certificates.iter().all(|c| c.ok)
    }
}

/// Builds the schedule. Slabs of `g * D` sit `x gap` apart along the last
/// axis for `g ≈ (x, θx)`; within a slab heights spread by at most the
/// tile's own vertical extent `H` plus `2 A (n-1)² f(i) 2^ℓ` from moving
/// `g` by less than `f(i)` off the line. So `x gap > 2i + H + P` keeps an
/// interval of length `2i` inside one slab.
pub fn build_schedule(law: &GroupLaw, spec: &ExoticSpec) -> Result<Schedule> {
    let n = spec.n;
    let cap = spec.i_max;
    let amax = spec.a.iter().flatten().map(|c| c.abs()).max().unwrap_or_else(Q::zero);
    let mut raw = vec![vec![0i64; cap as usize + 1]; cap as usize + 1];
    let mut slabs = Vec::new();
    for level in 0..=cap {
        let (gap, stats) = slab_gap(law, spec, level)?;
        slabs.push(stats);
        let Some(gap) = gap else { continue };
        let tile = enumerate_dyadic(law, &vec![Q::zero(); n], level)?;
        let zs = tile.iter().map(|t| &t[n - 1]);
        let h = zs.clone().max().unwrap() - zs.min().unwrap();
        for i in 1..=cap {
            let p = q(2 * ((n - 1) * (n - 1)) as i64) * &amax * q(ExoticSpec::f(i)) * q(1 << level);
            let need = (q(2 * i as i64) + &h + p) / &gap;
            raw[level as usize][i as usize] = (floor(&need) + BigInt::from(1)).to_i64().ok_or(Error::Overflow)?;
        }
    }
    // running maxima make the table increasing in both arguments
    let mut x_theta = raw.clone();
    for l in 0..=cap as usize {
        for i in 0..=cap as usize {
            let mut best = raw[l][i];
            if l > 0 {
                best = best.max(x_theta[l - 1][i]);
            }
            if i > 0 {
                best = best.max(x_theta[l][i - 1]);
            }
            x_theta[l][i] = best;
        }
    }
    let x_e = (1..=cap)
        .map(|i| {
            let xt = x_theta[i as usize][i as usize];
            match spec.mode {
                ScheduleMode::Standard => xt.checked_add(1i64.checked_shl(i * i).ok_or(Error::Overflow)?),
                ScheduleMode::Compressed => xt.checked_mul(1i64 << (2 * i)),
            }
            .ok_or(Error::Overflow)
        })
        .collect::<Result<Vec<i64>>>()?;
    let mut sched = Schedule { x_theta, x_e, slabs, certificates: vec![] };
    sched.certificates = certify(law, spec, &sched)?;
    Ok(sched)
}

/// Counts integer points of `g * D_ℓ` with last coordinate in `[-i, i]` for
/// `g = (x_θ + 1, round(θ (x_θ + 1)), 0, ..)` in the `(p, q)` plane.
fn certify(law: &GroupLaw, spec: &ExoticSpec, sched: &Schedule) -> Result<Vec<Certificate>> {
    let n = spec.n;
    let (p, qx) = spec.axes;
    let pairs: Vec<(u32, u32)> = (0..=spec.i_max).flat_map(|l| (1..=spec.i_max).map(move |i| (l, i))).collect();
    pairs
        .par_iter()
        .map(|&(level, i)| {
            let x = sched.x_theta(level, i) + 1;
            let mut g = vec![0i64; n];
            g[p] = x;
            g[qx] = floor(&(&spec.theta * q(x) + Q::new(1.into(), 2.into()))).to_i64().ok_or(Error::Overflow)?;
            let tile = enumerate_dyadic(law, &to_q_point(&g), level)?;
            let lim = q(i as i64);
            let count = tile.iter().filter(|t| t.iter().all(|c| c.is_integer()) && t[n - 1].abs() <= lim).count();
            let bound = 1u64 << (level as usize * (n - 2));
            Ok(Certificate { level, i, x_theta: x - 1, basepoint: g, count, bound, ok: count as u64 <= bound })
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct Ball {
    pub index: u32,
    pub center: Vec<String>,
    pub radius: u32,
    #[serde(skip)]
    center_q: Point,
}

impl Ball {
    /// Open Euclidean ball.
    pub fn contains(&self, x: &[Q]) -> bool {
        let r2 = q((self.radius * self.radius) as i64);
        let d2: Q = x.iter().zip(&self.center_q).map(|(a, b)| (a - b) * (a - b)).sum();
        d2 < r2
    }

    pub fn center(&self) -> &[Q] {
        &self.center_q
    }

    /// Integer points of the closed bounding cube, lexicographic.
    fn candidates(&self) -> Vec<Vec<i64>> {
        let r = self.radius as i64;
        let ranges: Vec<(i64, i64)> =
            self.center_q.iter().map(|c| (ceil(c).to_i64().unwrap() - r, floor(c).to_i64().unwrap() + r)).collect();
        grid(&ranges)
    }
}

/// `G(Z) \ ⊔ E_i` together with the added points `(i e_p) * (-1/(2 a_pq i) e_q - 1/2 e_n)`
/// for `i >= 2` whose axis point `i e_p` survives.
pub struct ExoticNet<'a> {
    law: &'a GroupLaw,
    spec: ExoticSpec,
    schedule: Schedule,
    balls: Vec<Ball>,
}

impl<'a> ExoticNet<'a> {
    pub fn build(law: &'a GroupLaw, spec: ExoticSpec) -> Result<Self> {
        check_dim(spec.n, law.dimension())?;
        let schedule = build_schedule(law, &spec)?;
        let (p, qx) = spec.axes;
        let balls = (1..=spec.i_max)
            .map(|i| {
                let x = q(schedule.x_e(i));
                let mut c = vec![Q::zero(); spec.n];
                c[qx] = &spec.theta * &x;
                c[p] = x;
                Ball { index: i, center: c.iter().map(fmt_q).collect(), radius: i, center_q: c }
            })
            .collect();
        Ok(Self { law, spec, schedule, balls })
    }

    pub fn spec(&self) -> &ExoticSpec {
        &self.spec
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    pub fn balls(&self) -> &[Ball] {
        &self.balls
    }

    pub fn is_removed(&self, x: &[Q]) -> bool {
        self.balls.iter().any(|b| b.contains(x))
    }

    /// The added point of index `i`, if its axis point survives.
    pub fn added_point(&self, i: i64) -> Option<Point> {
        if i < 2 {
            return None;
        }
        let n = self.spec.n;
        let (p, qx) = self.spec.axes;
        let mut axis = vec![Q::zero(); n];
        axis[p] = q(i);
        if self.is_removed(&axis) {
            return None;
        }
        let mut push = vec![Q::zero(); n];
        push[qx] = -Q::new(1.into(), 2.into()) / (&self.spec.a[p][qx] * q(i));
        push[n - 1] = -Q::new(1.into(), 2.into());
        Some(self.law.multiply(&axis, &push))
    }

    /// Added points whose axis index lies in `lo..=hi`.
    pub fn added_points(&self, lo: i64, hi: i64) -> Vec<(i64, Point)> {
        (lo.max(2)..=hi).filter_map(|i| self.added_point(i).map(|pt| (i, pt))).collect()
    }

    /// Lattice points removed inside a window.
    pub fn removed_in(&self, window: &CoordBox) -> Vec<Vec<i64>> {
        let mut out: BTreeSet<Vec<i64>> = BTreeSet::new();
        for b in &self.balls {
            for c in b.candidates() {
                if window.contains_int(&c) && b.contains(&to_q_point(&c)) {
                    out.insert(c);
                }
            }
        }
        out.into_iter().collect()
    }

    fn cell_of(&self, x: &[Q]) -> Vec<i64> {
        to_int_point(&locate_tile(self.law, x, &Lambda::unit(self.spec.n))).expect("cells fit in i64")
    }

    /// Signed cell differences `#G(Z) - #Y` over the cells meeting the
    /// window, including cells of added points whose index lies in the
    /// window's range along axis `p`.
    pub fn differences(&self, window: &CoordBox) -> Vec<(Vec<i64>, i64)> {
        let mut diff: BTreeMap<Vec<i64>, i64> = BTreeMap::new();
        for c in self.removed_in(window) {
            *diff.entry(c).or_default() += 1;
        }
        let (lo, hi) = window.int_range(self.spec.axes.0, &Q::from_integer(1.into()));
        for (_, pt) in self.added_points(lo, hi) {
            let c = self.cell_of(&pt);
            if window.contains_int(&c) {
                *diff.entry(c).or_default() -= 1;
            }
        }
        diff.into_iter().filter(|(_, v)| *v != 0).collect()
    }
}

impl Net for ExoticNet<'_> {
    fn dimension(&self) -> usize {
        self.spec.n
    }

    fn cell_count(&self, cell: &[i64]) -> u64 {
        // every lattice point is the base of its own cell (`G(Z)` is a subgroup
        // for the integral laws this is used with)
        let mut count = u64::from(!self.is_removed(&to_q_point(cell)));
        if let Some(pt) = self.added_point(cell[self.spec.axes.0]) {
            if self.cell_of(&pt) == cell {
                count += 1;
            }
        }
        count
    }

    fn points_in(&self, law: &GroupLaw, window: &CoordBox) -> Result<Vec<Point>> {
        let mut pts: Vec<Point> =
            window.int_points().into_par_iter().map(|c| to_q_point(&c)).filter(|x| !self.is_removed(x)).collect();
        let (lo, hi) = window.int_range(self.spec.axes.0, &Q::from_integer(1.into()));
        pts.extend(self.added_points(lo, hi).into_iter().map(|(_, p)| p).filter(|p| window.contains(p)));
        let _ = law;
        pts.sort();
        Ok(pts)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HoleReport {
    pub index: u32,
    pub radius: u32,
    /// Euclidean distance from the centre to the nearest retained point.
    pub hole_radius: f64,
    pub removed: usize,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct GapReport {
    pub i: i64,
    /// Euclidean distance from the added point to the nearest other point.
    pub gap: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SeparationReport {
    pub window: String,
    pub c_est: f64,
    pub big_c_est: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExoticReport {
    pub holes: Vec<HoleReport>,
    pub gaps: Vec<GapReport>,
    pub gaps_decreasing: bool,
    pub separation: Vec<SeparationReport>,
    pub c_est_min: f64,
    pub strong_bd: StrongBdReport,
    pub certified: bool,
}

/// Window around ball `E_i` reaching `margin` beyond it in every direction.
pub fn ball_window(ball: &Ball, margin: i64) -> CoordBox {
    let r = q(ball.radius as i64 + margin);
    CoordBox::closed(
        ball.center().iter().map(|c| q(floor(c).to_i64().unwrap()) - &r).collect(),
        ball.center().iter().map(|c| q(ceil(c).to_i64().unwrap()) + &r).collect(),
    )
}

/// Window along axis `p` holding the added points `lo..=hi`.
pub fn axis_window(net: &ExoticNet, lo: i64, hi: i64) -> CoordBox {
    let n = net.spec.n;
    let (p, _) = net.spec.axes;
    let mut a = vec![q(-2); n];
    let mut b = vec![q(2); n];
    a[p] = q(lo - 1);
    b[p] = q(hi + 1);
    CoordBox::closed(a, b)
}

/// Smallest window containing every ball, margin 2.
pub fn covering_window(net: &ExoticNet) -> CoordBox {
    let n = net.spec.n;
    let mut lo = vec![q(-2); n];
    let mut hi = vec![q(2); n];
    for b in &net.balls {
        let w = ball_window(b, 2);
        for k in 0..n {
            lo[k] = lo[k].clone().min(w.lo[k].clone());
            hi[k] = hi[k].clone().max(w.hi[k].clone());
        }
    }
    CoordBox::closed(lo, hi)
}

/// Checks holes, shrinking gaps, group-metric separation and the strong-BD
/// slope against `G(Z)` on `window`.
pub fn verify_exotic(
    net: &ExoticNet,
    window: &CoordBox,
    gap_range: (i64, i64),
    bd: &StrongBdConfig,
) -> Result<ExoticReport> {
    let law = net.law;
    let holes = net
        .balls
        .iter()
        .map(|b| {
            let w = ball_window(b, 2);
            let pts = net.points_in(law, &w)?;
            let c: Vec<f64> = b.center().iter().map(to_f64).collect();
            let hole = pts
                .iter()
                .map(|p| p.iter().zip(&c).map(|(x, y)| (to_f64(x) - y).powi(2)).sum::<f64>().sqrt())
                .fold(f64::INFINITY, f64::min);
            Ok(HoleReport {
                index: b.index,
                radius: b.radius,
                hole_radius: hole,
                removed: net.removed_in(&w).len(),
                ok: hole >= b.radius as f64,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let gaps: Vec<GapReport> = net
        .added_points(gap_range.0, gap_range.1)
        .into_iter()
        .map(|(i, pt)| {
            let local = CoordBox::closed(
                pt.iter().map(|c| q(floor(c).to_i64().unwrap() - 1)).collect(),
                pt.iter().map(|c| q(ceil(c).to_i64().unwrap() + 1)).collect(),
            );
            let gap = net
                .points_in(law, &local)
                .unwrap_or_default()
                .iter()
                .filter(|p| **p != pt)
                .map(|p| Metric::Euclidean.distance(law, p, &pt))
                .fold(f64::INFINITY, f64::min);
            GapReport { i, gap }
        })
        .collect();
    let gaps_decreasing = gaps.windows(2).all(|w| w[1].gap < w[0].gap);

    let cfg = SeparationConfig { metric: Metric::QuasiMax, pitch: 0.5, margin: 0.0 };
    let mut windows: Vec<CoordBox> = net.balls.iter().map(|b| ball_window(b, 2)).collect();
    windows.push(axis_window(net, gap_range.0, gap_range.1));
    let separation = windows
        .iter()
        .map(|w| {
            let pts = net.points_in(law, w)?;
            let (c, big_c) = separation_constants(law, &pts, w, &cfg)?;
            Ok(SeparationReport { window: w.to_string(), c_est: c, big_c_est: big_c })
        })
        .collect::<Result<Vec<_>>>()?;
    let c_est_min = separation.iter().map(|s| s.c_est).fold(f64::INFINITY, f64::min);

    let il = law.require_integral()?;
    let strong_bd = strong_bd_from_differences(il, net.spec.n, &net.differences(window), bd)?;
    Ok(ExoticReport {
        holes,
        gaps_decreasing,
        gaps,
        separation,
        c_est_min,
        strong_bd,
        certified: net.schedule.certified(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub theta: String,
    pub axes: (usize, usize),
    pub i_max: u32,
    pub mode: ScheduleMode,
    pub schedule: Schedule,
    pub balls: Vec<Ball>,
}

pub fn manifest(net: &ExoticNet) -> Manifest {
    Manifest {
        theta: fmt_q(&net.spec.theta),
        axes: (net.spec.axes.0 + 1, net.spec.axes.1 + 1),
        i_max: net.spec.i_max,
        mode: net.spec.mode,
        schedule: net.schedule.clone(),
        balls: net.balls.clone(),
    }
}

/// Number of trailing coordinates to quotient out before the law becomes
/// step 2 with one-dimensional centre.
pub fn quotient_depth(law: &GroupLaw) -> Result<usize> {
    let mut cur = law.clone();
    let mut depth = 0;
    loop {
        if shear_coefficients(&cur).is_ok() {
            return Ok(depth);
        }
        if cur.dimension() <= 3 {
            return Err(Error::NotStepTwo("no step-2 one-centre quotient along the last coordinates".into()));
        }
        cur = cur.project()?;
        depth += 1;
    }
}

/// `π^{-1}(Y') ∩ G(Z)` for an exotic net `Y'` on the quotient by the last
/// `depth` coordinates.
pub struct PulledBack<'a> {
    base: &'a ExoticNet<'a>,
    n: usize,
}

impl<'a> PulledBack<'a> {
    pub fn new(law: &GroupLaw, base: &'a ExoticNet<'a>) -> Result<Self> {
        let depth = law.dimension() - base.spec.n;
        let mut cur = law.clone();
        for _ in 0..depth {
            cur = cur.project()?;
        }
        if cur.polys() != base.law.polys() {
            return Err(Error::ProjectionMismatch);
        }
        Ok(Self { base, n: law.dimension() })
    }
}

impl Net for PulledBack<'_> {
    fn dimension(&self) -> usize {
        self.n
    }

    fn cell_count(&self, cell: &[i64]) -> u64 {
        // added points of Y' are not integral, so only removals survive
        u64::from(!self.base.is_removed(&to_q_point(&cell[..self.base.spec.n])))
    }

    fn points_in(&self, _law: &GroupLaw, window: &CoordBox) -> Result<Vec<Point>> {
        let k = self.base.spec.n;
        Ok(window.int_points().into_iter().map(|c| to_q_point(&c)).filter(|x| !self.base.is_removed(&x[..k])).collect())
    }
}
