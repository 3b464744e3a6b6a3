//! Counting criteria for bounded displacement: discrepancy against
//! perimeter, uniform spread, the dyadic strong-BD slope test, coarse
//! perimeter estimators and metric boundaries.

use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dyadic::{enumerate_tile, peel_digit, DyadicTile};
use crate::error::{Error, Result};
use crate::group::{to_q_point, GroupLaw, IntegralLaw, Metric, Point};
use crate::net::Net;
use crate::rational::{to_f64, Q};
use crate::tiling::{
    combinatorial_perimeter, combinatorial_perimeter_box, locate_cell_f64, min_pairwise_distance, CoordBox,
    FaceWeights, Region,
};

/// Bounded test sets: dyadic tiles, unions of unit tiles, coordinate boxes.
#[derive(Clone, Debug)]
pub enum TestSet {
    Tile(DyadicTile),
    Cells(Region),
    Box(CoordBox),
}

impl TestSet {
    pub fn descriptor(&self) -> String {
        match self {
            TestSet::Tile(t) => format!("tile {t}"),
            TestSet::Cells(r) => match r.bounds() {
                Some((lo, hi)) => format!("region {} cells in {lo:?}..{hi:?}", r.len()),
                None => "region empty".into(),
            },
            TestSet::Box(b) => format!("box {b}"),
        }
    }

    fn cells(&self, law: &IntegralLaw) -> Result<Option<Vec<Vec<i64>>>> {
        Ok(match self {
            TestSet::Tile(t) => Some(enumerate_tile(law, t)?),
            TestSet::Cells(r) => Some(r.sorted()),
            TestSet::Box(_) => None,
        })
    }
}

fn check_window<N: Net + ?Sized>(net: &N, set: &TestSet, cells: Option<&[Vec<i64>]>) -> Result<()> {
    let Some(w) = net.window() else { return Ok(()) };
    let inside = match (set, cells) {
        (TestSet::Box(b), _) => w.contains_box(b),
        (_, Some(cells)) => cells.iter().all(|c| w.contains(&to_q_point(c))),
        _ => true,
    };
    if inside {
        Ok(())
    } else {
        Err(Error::WindowExceeded)
    }
}

/// `#(Y ∩ A)`; tiles and regions count by unit cell, boxes by points.
pub fn count_in<N: Net + ?Sized>(law: &GroupLaw, net: &N, set: &TestSet) -> Result<u64> {
    match set {
        TestSet::Box(b) => {
            check_window(net, set, None)?;
            net.count_in_box(law, b)
        }
        _ => {
            let il = law.require_integral()?;
            let cells = set.cells(il)?.unwrap();
            check_window(net, set, Some(&cells))?;
            Ok(cells.par_iter().map(|c| net.cell_count(c)).sum())
        }
    }
}

/// `|#(Y1 ∩ A) - #(Y2 ∩ A)|`.
pub fn discrepancy<A: Net + ?Sized, B: Net + ?Sized>(law: &GroupLaw, y1: &A, y2: &B, set: &TestSet) -> Result<u64> {
    let a = count_in(law, y1, set)?;
    let b = count_in(law, y2, set)?;
    Ok(a.abs_diff(b))
}

/// Combinatorial perimeters of test sets, caching the (left-invariant)
/// perimeter of dyadic tiles per level.
pub struct PerimeterOracle<'a> {
    law: &'a IntegralLaw,
    fw: &'a FaceWeights,
    tile_cache: Mutex<HashMap<u32, Q>>,
}

impl<'a> PerimeterOracle<'a> {
    pub fn new(law: &'a IntegralLaw, fw: &'a FaceWeights) -> Self {
        Self { law, fw, tile_cache: Mutex::new(HashMap::new()) }
    }

    pub fn tile_perimeter(&self, level: u32) -> Result<Q> {
        if let Some(p) = self.tile_cache.lock().unwrap().get(&level) {
            return Ok(p.clone());
        }
        let n = self.law.dimension();
        let t = DyadicTile { base: vec![0; n], level };
        let region = Region::from_points(enumerate_tile(self.law, &t)?);
        let p = combinatorial_perimeter(self.law, &region, self.fw)?;
        self.tile_cache.lock().unwrap().insert(level, p.clone());
        Ok(p)
    }

    pub fn perimeter(&self, set: &TestSet) -> Result<Q> {
        match set {
            TestSet::Tile(t) => self.tile_perimeter(t.level),
            TestSet::Cells(r) => combinatorial_perimeter(self.law, r, self.fw),
            TestSet::Box(b) => combinatorial_perimeter_box(self.law, &b.int_box(), self.fw),
        }
    }

    /// Volume in units of the unit tile.
    pub fn volume(&self, set: &TestSet) -> Q {
        match set {
            TestSet::Tile(t) => Q::from_integer((t.size() as i128).into()),
            TestSet::Cells(r) => Q::from_integer((r.len() as i64).into()),
            TestSet::Box(b) => b.volume(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DiscrepancyRecord {
    pub descriptor: String,
    pub count1: u64,
    pub count2: u64,
    pub perimeter: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DiscrepancyReport {
    pub records: Vec<DiscrepancyRecord>,
    pub max_ratio: f64,
    /// Largest discrepancy among dyadic tiles of each level.
    pub per_level_max: BTreeMap<u32, u64>,
}

pub fn discrepancy_report<A: Net + ?Sized, B: Net + ?Sized>(
    law: &GroupLaw,
    oracle: &PerimeterOracle,
    y1: &A,
    y2: &B,
    sets: &[TestSet],
) -> Result<DiscrepancyReport> {
    let records = sets
        .par_iter()
        .map(|s| {
            let c1 = count_in(law, y1, s)?;
            let c2 = count_in(law, y2, s)?;
            let p = to_f64(&oracle.perimeter(s)?);
            let d = c1.abs_diff(c2) as f64;
            Ok(DiscrepancyRecord {
                descriptor: s.descriptor(),
                count1: c1,
                count2: c2,
                perimeter: p,
                ratio: if p > 0.0 { d / p } else { f64::INFINITY },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut per_level_max = BTreeMap::new();
    for (s, r) in sets.iter().zip(&records) {
        if let TestSet::Tile(t) = s {
            let e = per_level_max.entry(t.level).or_insert(0u64);
            *e = (*e).max(r.count1.abs_diff(r.count2));
        }
    }
    let max_ratio = records.iter().map(|r| r.ratio).fold(0.0, f64::max);
    Ok(DiscrepancyReport { records, max_ratio, per_level_max })
}

#[derive(Clone, Debug, Serialize)]
pub struct SpreadRecord {
    pub descriptor: String,
    pub count: u64,
    pub expected: f64,
    pub perimeter: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpreadReport {
    pub covolume: f64,
    pub records: Vec<SpreadRecord>,
    pub max_ratio: f64,
    /// Whether the ratios stop growing along the (nested) family: the
    /// maximum over the second half is within 5% of the first half's.
    pub bounded: bool,
}

/// `|#(Y ∩ A) - ‖A‖ / v| / p(A)` over a family of test sets, in order.
pub fn uniformly_spread_check<N: Net + ?Sized>(
    law: &GroupLaw,
    oracle: &PerimeterOracle,
    y: &N,
    v: &Q,
    sets: &[TestSet],
) -> Result<SpreadReport> {
    if *v <= Q::zero() {
        return Err(Error::Invalid("covolume must be positive".into()));
    }
    let records = sets
        .par_iter()
        .map(|s| {
            let c = count_in(law, y, s)?;
            let expected = oracle.volume(s) / v;
            let p = to_f64(&oracle.perimeter(s)?);
            let dev = to_f64(&(Q::from_integer((c as i64).into()) - &expected)).abs();
            Ok(SpreadRecord {
                descriptor: s.descriptor(),
                count: c,
                expected: to_f64(&expected),
                perimeter: p,
                ratio: if p > 0.0 { dev / p } else { f64::INFINITY },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let ratios: Vec<f64> = records.iter().map(|r| r.ratio).collect();
    let max_ratio = ratios.iter().copied().fold(0.0, f64::max);
    Ok(SpreadReport { covolume: to_f64(v), bounded: stops_growing(&ratios, 0.05), records, max_ratio })
}

/// Max over the second half is at most `(1 + slack)` times the first half's.
pub fn stops_growing(values: &[f64], slack: f64) -> bool {
    if values.len() < 2 {
        return true;
    }
    let mid = values.len() / 2;
    let first = values[..mid].iter().copied().fold(0.0, f64::max);
    let second = values[mid..].iter().copied().fold(0.0, f64::max);
    second <= first * (1.0 + slack) + 1e-12
}

/// Least-squares slope of `ys` against `xs`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Some(sxy / sxx)
}

#[derive(Clone, Debug)]
pub struct StrongBdConfig {
    pub max_level: u32,
    pub eps: f64,
}

impl Default for StrongBdConfig {
    fn default() -> Self {
        Self { max_level: 5, eps: 0.1 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StrongBdReport {
    /// `D(k)` for `k = 0..=max_level`.
    pub d: Vec<u64>,
    /// Slope of `log2 D(k)` over the levels with `D(k) > 0`; `-inf` when the
    /// nets agree everywhere.
    pub slope: f64,
    pub threshold: f64,
    pub pass: bool,
    /// Cells of the window where the two nets differ.
    pub differing_cells: usize,
}

/// `D(k) = max_T |#(T ∩ Y1) - #(T ∩ Y2)|` over all level-`k` dyadic tiles.
///
/// The nets must agree outside `window`; then only ancestors of cells in
/// the window where the counts differ can carry a discrepancy, and `D(k)` is
/// exact over every tile of `G`.
pub fn strong_bd_check<A: Net + ?Sized, B: Net + ?Sized>(
    law: &GroupLaw,
    y1: &A,
    y2: &B,
    window: &CoordBox,
    cfg: &StrongBdConfig,
) -> Result<StrongBdReport> {
    let il = law.require_integral()?;
    let ib = window.int_box();
    let cells = ib.points();
    let diffs: Vec<(Vec<i64>, i64)> = cells
        .into_par_iter()
        .filter_map(|c| {
            let d = y1.cell_count(&c) as i64 - y2.cell_count(&c) as i64;
            (d != 0).then_some((c, d))
        })
        .collect();
    strong_bd_from_differences(il, law.dimension(), &diffs, cfg)
}

/// The strong-BD slope test from an explicit list of signed cell differences.
pub fn strong_bd_from_differences(
    il: &IntegralLaw,
    n: usize,
    diffs: &[(Vec<i64>, i64)],
    cfg: &StrongBdConfig,
) -> Result<StrongBdReport> {
    let mut cur: Vec<(Vec<i64>, i64)> = diffs.to_vec();
    let mut d = Vec::with_capacity(cfg.max_level as usize + 1);
    for k in 0..=cfg.max_level {
        if k > 0 {
            cur =
                cur.par_iter().map(|(c, v)| peel_digit(il, c, k).map(|(p, _)| (p, *v))).collect::<Result<Vec<_>>>()?;
        }
        let mut sums: HashMap<&[i64], i64> = HashMap::new();
        for (c, v) in &cur {
            *sums.entry(c.as_slice()).or_default() += v;
        }
        d.push(sums.values().map(|v| v.unsigned_abs()).max().unwrap_or(0));
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) =
        d.iter().enumerate().filter(|(_, v)| **v > 0).map(|(k, v)| (k as f64, (*v as f64).log2())).unzip();
    let slope = fit_slope(&xs, &ys).unwrap_or(f64::NEG_INFINITY);
    let threshold = n as f64 - 1.0 - cfg.eps;
    Ok(StrongBdReport { pass: slope <= threshold, d, slope, threshold, differing_cells: diffs.len() })
}

/// Shapes accepted by the non-combinatorial perimeter estimators.
#[derive(Clone, Debug)]
pub enum Shape {
    Box(CoordBox),
    Cells(Region),
}

#[derive(Clone, Debug)]
pub enum PerimeterMethod {
    Combinatorial,
    /// Monte Carlo volume of the `r`-neighborhood of the boundary.
    Neighborhood {
        samples: usize,
        seed: u64,
    },
    /// Size of a greedy maximal `r`-separated set of sampled boundary
    /// points; `pitch` is the sampling step on facets.
    BoundaryNet {
        pitch: f64,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct PerimeterEstimate {
    pub value: f64,
    pub std_err: f64,
    pub samples: usize,
}

pub fn coarse_perimeter(
    law: &GroupLaw,
    shape: &Shape,
    r: f64,
    method: &PerimeterMethod,
    metric: Metric,
    fw: Option<&FaceWeights>,
) -> Result<PerimeterEstimate> {
    if r <= 0.0 {
        return Err(Error::Invalid("r must be positive".into()));
    }
    match method {
        PerimeterMethod::Combinatorial => {
            let Shape::Cells(region) = shape else {
                return Err(Error::MethodUnsupported("combinatorial perimeter needs a tile region".into()));
            };
            let fw = fw.ok_or_else(|| Error::MethodUnsupported("face weights required".into()))?;
            let p = combinatorial_perimeter(law.require_integral()?, region, fw)?;
            Ok(PerimeterEstimate { value: to_f64(&p), std_err: 0.0, samples: 0 })
        }
        PerimeterMethod::Neighborhood { samples, seed } => neighborhood_volume(law, shape, r, metric, *samples, *seed),
        PerimeterMethod::BoundaryNet { pitch } => {
            let pts = boundary_samples(law, shape, *pitch);
            let kept = greedy_separated(law, &pts, r, metric);
            Ok(PerimeterEstimate { value: kept.len() as f64, std_err: 0.0, samples: pts.len() })
        }
    }
}

struct ShapeTest<'a> {
    law: &'a GroupLaw,
    shape: &'a Shape,
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl ShapeTest<'_> {
    fn contains(&self, x: &[f64]) -> bool {
        match self.shape {
            Shape::Box(_) => x.iter().zip(self.lo.iter().zip(&self.hi)).all(|(v, (a, b))| *a <= *v && *v <= *b),
            Shape::Cells(r) => r.contains(&locate_cell_f64(self.law, x)),
        }
    }

    /// Euclidean distance to the boundary of a box.
    fn box_boundary_distance(&self, x: &[f64]) -> f64 {
        let inside = self.contains(x);
        if inside {
            x.iter()
                .zip(self.lo.iter().zip(&self.hi))
                .map(|(v, (a, b))| (v - a).min(b - v))
                .fold(f64::INFINITY, f64::min)
        } else {
            x.iter()
                .zip(self.lo.iter().zip(&self.hi))
                .map(|(v, (a, b))| {
                    let d = (a - v).max(0.0).max(v - b);
                    d * d
                })
                .sum::<f64>()
                .sqrt()
        }
    }
}

fn shape_bounds(shape: &Shape) -> (Vec<f64>, Vec<f64>) {
    match shape {
        Shape::Box(b) => (b.lo.iter().map(to_f64).collect(), b.hi.iter().map(to_f64).collect()),
        Shape::Cells(r) => {
            let (lo, hi) = r.bounds().unwrap_or((vec![], vec![]));
            (lo.iter().map(|&v| v as f64).collect(), hi.iter().map(|&v| v as f64).collect())
        }
    }
}

/// Offsets `δ` with `|δ| <= r` on a small grid, including the axis extremes.
fn ball_stencil(law: &GroupLaw, r: f64, metric: Metric, per_axis: usize) -> Vec<Vec<f64>> {
    let w = law.weights();
    let n = law.dimension();
    let ext: Vec<f64> = (0..n).map(|i| if metric == Metric::Euclidean { r } else { r.powi(w[i] as i32) }).collect();
    let m = per_axis as i64;
    let ranges: Vec<(i64, i64)> = (0..n).map(|_| (-m, m)).collect();
    crate::tiling::grid(&ranges)
        .into_iter()
        .map(|k| k.iter().enumerate().map(|(i, v)| ext[i] * (*v as f64) / m as f64).collect::<Vec<f64>>())
        .filter(|d| {
            metric.norm_f64(d, w) <= r * (1.0 + 1e-12)
                || metric == Metric::Euclidean && d.iter().map(|x| x * x).sum::<f64>() <= r * r
        })
        .collect()
}

fn neighborhood_volume(
    law: &GroupLaw,
    shape: &Shape,
    r: f64,
    metric: Metric,
    samples: usize,
    seed: u64,
) -> Result<PerimeterEstimate> {
    let (lo, hi) = shape_bounds(shape);
    let (lo, hi) = match shape {
        Shape::Box(_) => (lo, hi),
        // cells extend half a unit around their base points (up to shear)
        Shape::Cells(_) => (lo.iter().map(|v| v - 0.5).collect(), hi.iter().map(|v| v + 0.5).collect()),
    };
    let test = ShapeTest { law, shape, lo: lo.clone(), hi: hi.clone() };
    let n = law.dimension();
    let euclid_box = metric == Metric::Euclidean && matches!(shape, Shape::Box(_));
    // sampling box: the shape's bounding box grown by the extent of a ball,
    // including the polynomial shear of the group law
    let bound_abs: Vec<f64> = (0..n).map(|i| lo[i].abs().max(hi[i].abs()) + r).collect();
    let margin: Vec<f64> = (0..n)
        .map(|i| {
            if metric == Metric::Euclidean {
                return r;
            }
            let ri = r.powi(law.weights()[i] as i32);
            let mut bounds: Vec<Q> = bound_abs.iter().map(|b| crate::rational::from_f64(*b, 6)).collect();
            bounds.extend((0..n).map(|j| crate::rational::from_f64(r.powi(law.weights()[j] as i32), 6)));
            ri + to_f64(&law.polys()[i].abs_bound(&bounds))
        })
        .collect();
    let slo: Vec<f64> = (0..n).map(|i| lo[i] - margin[i]).collect();
    let shi: Vec<f64> = (0..n).map(|i| hi[i] + margin[i]).collect();
    let vol: f64 = (0..n).map(|i| shi[i] - slo[i]).product();
    let stencil = if euclid_box { Vec::new() } else { ball_stencil(law, r, metric, 4) };
    let hits: usize = (0..samples)
        .into_par_iter()
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (s as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
            let x: Vec<f64> = (0..n).map(|i| rng.gen_range(slo[i]..shi[i])).collect();
            let near = if euclid_box {
                test.box_boundary_distance(&x) <= r
            } else {
                let mut seen_in = false;
                let mut seen_out = false;
                for d in &stencil {
                    let y = law.mul_generic(&x, d);
                    if test.contains(&y) {
                        seen_in = true;
                    } else {
                        seen_out = true;
                    }
                    if seen_in && seen_out {
                        break;
                    }
                }
                seen_in && seen_out
            };
            usize::from(near)
        })
        .sum();
    let p = hits as f64 / samples as f64;
    Ok(PerimeterEstimate { value: p * vol, std_err: vol * (p * (1.0 - p) / samples as f64).sqrt(), samples })
}

fn boundary_samples(law: &GroupLaw, shape: &Shape, pitch: f64) -> Vec<Vec<f64>> {
    let n = law.dimension();
    let mut out = Vec::new();
    match shape {
        Shape::Box(b) => {
            let lo: Vec<f64> = b.lo.iter().map(to_f64).collect();
            let hi: Vec<f64> = b.hi.iter().map(to_f64).collect();
            let axes: Vec<Vec<f64>> = (0..n)
                .map(|i| {
                    let steps = ((hi[i] - lo[i]) / pitch).round().max(1.0) as usize;
                    (0..=steps).map(|k| lo[i] + (hi[i] - lo[i]) * k as f64 / steps as f64).collect()
                })
                .collect();
            for axis in 0..n {
                for side in [lo[axis], hi[axis]] {
                    let ranges: Vec<(i64, i64)> =
                        (0..n).map(|i| if i == axis { (0, 0) } else { (0, axes[i].len() as i64 - 1) }).collect();
                    for k in crate::tiling::grid(&ranges) {
                        out.push((0..n).map(|i| if i == axis { side } else { axes[i][k[i] as usize] }).collect());
                    }
                }
            }
        }
        Shape::Cells(region) => {
            for g in region.sorted() {
                let gf: Vec<f64> = g.iter().map(|&v| v as f64).collect();
                for axis in 0..n {
                    for side in [-1.0, 1.0] {
                        let mut probe = vec![0.0; n];
                        probe[axis] = side * 0.501;
                        let across = locate_cell_f64(law, &law.mul_generic(&gf, &probe));
                        if !region.contains(&across) {
                            let mut face = vec![0.0; n];
                            face[axis] = side * 0.5;
                            out.push(law.mul_generic(&gf, &face));
                        }
                    }
                }
            }
        }
    }
    out
}

fn greedy_separated(law: &GroupLaw, pts: &[Vec<f64>], r: f64, metric: Metric) -> Vec<Vec<f64>> {
    let mut kept: Vec<Vec<f64>> = Vec::new();
    for p in pts {
        if kept.iter().all(|k| metric.distance_f64(law, k, p) >= r) {
            kept.push(p.clone());
        }
    }
    kept
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryKind {
    Outer,
    Inner,
    Collar,
}

/// Metric `r`-boundary of `A ⊂ Y`: outer `(N_r(A) ∩ Y) \ A`, inner
/// `N_r(Y \ A) ∩ A`, or their union. Distances are closed (`<= r`).
pub fn metric_boundary(
    law: &GroupLaw,
    y: &[Point],
    a: &[Point],
    r: f64,
    kind: BoundaryKind,
    metric: Metric,
) -> Result<Vec<Point>> {
    if r <= 0.0 {
        return Err(Error::Invalid("r must be positive".into()));
    }
    let in_a: std::collections::HashSet<&Point> = a.iter().collect();
    let (inside, outside): (Vec<&Point>, Vec<&Point>) = y.iter().partition(|p| in_a.contains(p));
    let near = |from: &[&Point], to: &[&Point]| -> Vec<Point> {
        let to_f: Vec<Vec<f64>> = to.iter().map(|p| p.iter().map(to_f64).collect()).collect();
        from.par_iter()
            .filter(|p| {
                let pf: Vec<f64> = p.iter().map(to_f64).collect();
                to_f.iter().any(|t| metric.distance_f64(law, &pf, t) <= r + 1e-12)
            })
            .map(|p| (*p).clone())
            .collect()
    };
    let mut out = match kind {
        BoundaryKind::Outer => near(&outside, &inside),
        BoundaryKind::Inner => near(&inside, &outside),
        BoundaryKind::Collar => {
            let mut v = near(&outside, &inside);
            v.extend(near(&inside, &outside));
            v
        }
    };
    out.sort();
    Ok(out)
}

/// Largest displacement `d(y, f(y))` of the lift `f(y) = y * (y'^{-1} f'(y'), 0)`
/// of a bijection `f'` between nets on `G' = project(G)`, over `y = (y', t)`.
pub fn lifted_displacement(law: &GroupLaw, pairs: &[(Point, Point)], heights: &[Q], metric: Metric) -> Result<f64> {
    let base = law.project()?;
    let mut worst: f64 = 0.0;
    for (yp, fp) in pairs {
        let mut step = base.left_quotient(yp, fp);
        step.push(Q::zero());
        for t in heights {
            let mut y = yp.clone();
            y.push(t.clone());
            let fy = law.multiply(&y, &step);
            worst = worst.max(metric.distance(law, &y, &fy));
        }
    }
    Ok(worst)
}

/// Minimal pairwise distance of a point list (for separation checks).
pub fn min_separation(law: &GroupLaw, pts: &[Point], metric: Metric) -> f64 {
    let f: Vec<Vec<f64>> = pts.iter().map(|p| p.iter().map(to_f64).collect()).collect();
    min_pairwise_distance(law, &f, metric)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{synthesize_law, GroupSpec};
    use crate::net::{IntegerNetMinus, LatticeNet, PointSet, Removal};
    use crate::rational::{q, qr};
    use crate::tiling::{face_neighbors, FaceSampling, Lambda};

    fn heis() -> GroupLaw {
        synthesize_law(&GroupSpec::heisenberg_integral()).unwrap()
    }

    #[test]
    fn identical_nets_have_zero_discrepancy() {
        let law = heis();
        let y = LatticeNet::integers(3);
        let t = TestSet::Tile(DyadicTile { base: vec![0, 0, 0], level: 2 });
        assert_eq!(discrepancy(&law, &y, &y, &t).unwrap(), 0);
        let rep = strong_bd_check(&law, &y, &y, &CoordBox::cube(3, q(3)), &StrongBdConfig::default()).unwrap();
        assert!(rep.d.iter().all(|&v| v == 0));
        assert_eq!(rep.slope, f64::NEG_INFINITY);
        assert!(rep.pass);
    }

    #[test]
    fn density_mismatch_grows_like_volume() {
        let law = heis();
        let y1 = LatticeNet::integers(3);
        let y2 = LatticeNet::new(&Lambda::from_ints(&[2, 1, 1]).unwrap()).unwrap();
        for k in 1..=3u32 {
            let t = TestSet::Tile(DyadicTile { base: vec![0, 0, 0], level: k });
            assert_eq!(discrepancy(&law, &y1, &y2, &t).unwrap(), 1 << (3 * k - 1));
        }
    }

    #[test]
    fn window_is_enforced() {
        let law = heis();
        let w = CoordBox::cube(3, q(1));
        let pts = LatticeNet::integers(3).points_in(&law, &w).unwrap();
        let set = PointSet::new(&law, pts, Some(w)).unwrap();
        let big = TestSet::Tile(DyadicTile { base: vec![0, 0, 0], level: 2 });
        assert!(matches!(count_in(&law, &set, &big), Err(Error::WindowExceeded)));
        let small = TestSet::Box(CoordBox::cube(3, qr(1, 2)));
        assert_eq!(count_in(&law, &set, &small).unwrap(), 1);
    }

    #[test]
    fn half_space_control_grows_like_volume() {
        let law = heis();
        let il = law.require_integral().unwrap();
        let within = CoordBox::closed(vec![q(0), q(0), q(-40)], vec![q(7), q(7), q(80)]).int_box();
        let y2 = IntegerNetMinus::new(3, vec![Removal::HalfSpace { axis: 0, min: 0, within: within.clone() }]);
        let diffs: Vec<(Vec<i64>, i64)> = within.points().into_iter().map(|c| (c, 1)).collect();
        let rep = strong_bd_from_differences(il, 3, &diffs, &StrongBdConfig { max_level: 3, eps: 0.1 }).unwrap();
        assert_eq!(rep.d, vec![1, 8, 64, 512]);
        assert!((rep.slope - 3.0).abs() < 1e-9);
        assert!(!rep.pass);
        let t = TestSet::Tile(DyadicTile { base: vec![0, 0, 0], level: 2 });
        assert_eq!(discrepancy(&law, &LatticeNet::integers(3), &y2, &t).unwrap(), 64);
    }

    #[test]
    fn spread_of_lattice_and_empty_net() {
        let law = heis();
        let il = law.require_integral().unwrap();
        let fw = face_neighbors(&law, &FaceSampling::default()).unwrap();
        let oracle = PerimeterOracle::new(il, &fw);
        let sets: Vec<TestSet> = (0..=3).map(|k| TestSet::Tile(DyadicTile { base: vec![0, 0, 0], level: k })).collect();
        let good = uniformly_spread_check(&law, &oracle, &LatticeNet::integers(3), &q(1), &sets).unwrap();
        assert_eq!(good.max_ratio, 0.0);
        let empty = IntegerNetMinus::new(3, vec![Removal::Box(CoordBox::cube(3, q(1000)).int_box())]);
        let bad = uniformly_spread_check(&law, &oracle, &empty, &q(1), &sets).unwrap();
        assert!(!bad.bounded);
        assert_eq!(bad.records[0].ratio, 1.0 / 6.0);
    }

    #[test]
    fn unit_square_perimeters() {
        let law = synthesize_law(&GroupSpec::abelian(2)).unwrap();
        let fw = face_neighbors(&law, &FaceSampling::default()).unwrap();
        let cell = Shape::Cells(Region::from_points([vec![0, 0]]));
        let comb =
            coarse_perimeter(&law, &cell, 1.0, &PerimeterMethod::Combinatorial, Metric::Euclidean, Some(&fw)).unwrap();
        assert_eq!(comb.value, 4.0);
        let sq = Shape::Box(CoordBox::closed(vec![q(0), q(0)], vec![q(1), q(1)]));
        assert!(matches!(
            coarse_perimeter(&law, &sq, 1.0, &PerimeterMethod::Combinatorial, Metric::Euclidean, Some(&fw)),
            Err(Error::MethodUnsupported(_))
        ));
        let est = coarse_perimeter(
            &law,
            &sq,
            1.0,
            &PerimeterMethod::Neighborhood { samples: 200_000, seed: 7 },
            Metric::Euclidean,
            None,
        )
        .unwrap();
        // outer band 4r + πr², plus the whole inside (every point is within 1/2 of the boundary)
        let exact = 5.0 + std::f64::consts::PI;
        assert!((est.value - exact).abs() < 4.0 * est.std_err, "{} vs {exact}", est.value);
    }

    #[test]
    fn outer_boundary_of_a_point() {
        let law = synthesize_law(&GroupSpec::abelian(3)).unwrap();
        let y = LatticeNet::integers(3).points_in(&law, &CoordBox::cube(3, q(2))).unwrap();
        let a = vec![vec![q(0), q(0), q(0)]];
        let outer = metric_boundary(&law, &y, &a, 1.1, BoundaryKind::Outer, Metric::Euclidean).unwrap();
        assert_eq!(outer.len(), 6);
        let all = metric_boundary(&law, &y, &y, 1.1, BoundaryKind::Outer, Metric::Euclidean).unwrap();
        assert!(all.is_empty());
    }

    #[test]
    fn slope_fit() {
        assert_eq!(fit_slope(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]), Some(2.0));
        assert_eq!(fit_slope(&[1.0], &[1.0]), None);
        assert!(stops_growing(&[1.0, 0.9, 0.95, 1.02], 0.05));
        assert!(!stops_growing(&[1.0, 2.0, 3.0, 4.0], 0.05));
    }
}
