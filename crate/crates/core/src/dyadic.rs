//! Discrete nilpotent dyadic tiles `g * A_l * ... * A_1` with digit sets
//! `A_i = {0, 2^{i-1}}^n`, their ancestry, and signed dyadic descriptions
//! of finite tile regions.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rayon::prelude::*;

use crate::error::{check_dim, Error, Result};
use crate::group::{GroupLaw, IntegralLaw, Point};
use crate::rational::{q, Q};
use crate::tiling::{grid, Region};

/// Default cap on tile levels; keeps coordinates far from `i64` overflow.
pub const MAX_LEVEL: u32 = 30;

/// `A_i = {0, 2^{i-1}}^n`, ordered by the binary mask (coordinate 1 is the
/// high bit).
pub fn digit_set(n: usize, level: u32) -> Vec<Vec<i64>> {
    assert!(level >= 1, "digit sets start at level 1");
    let d = 1i64 << (level - 1);
    (0..1u64 << n).map(|mask| (0..n).map(|j| if mask >> (n - 1 - j) & 1 == 1 { d } else { 0 }).collect()).collect()
}

/// A dyadic tile: base `g ∈ G(2^l Z)` and level `l`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyadicTile {
    pub base: Vec<i64>,
    pub level: u32,
}

impl DyadicTile {
    pub fn new(base: Vec<i64>, level: u32) -> Result<Self> {
        if level > 62 || base.iter().any(|&c| c.rem_euclid(1i64 << level) != 0) {
            return Err(Error::Invalid(format!("tile base {base:?} is not in G(2^{level} Z)")));
        }
        Ok(Self { base, level })
    }

    pub fn size(&self) -> u128 {
        1u128 << (self.base.len() as u32 * self.level)
    }

    /// The `2^n` tiles of level `l - 1` making up this one.
    pub fn children(&self, law: &IntegralLaw) -> Result<Vec<DyadicTile>> {
        assert!(self.level >= 1);
        digit_set(self.base.len(), self.level)
            .iter()
            .map(|a| Ok(DyadicTile { base: law.mul(&self.base, a)?, level: self.level - 1 }))
            .collect()
    }
}

impl fmt::Display for DyadicTile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let b: Vec<String> = self.base.iter().map(|c| c.to_string()).collect();
        write!(f, "{} {}", self.level, b.join(","))
    }
}

/// Points of `g * A_l * ... * A_1` over exact rationals (any law).
pub fn enumerate_dyadic(law: &GroupLaw, base: &[Q], level: u32) -> Result<Vec<Point>> {
    check_dim(law.dimension(), base.len())?;
    let n = law.dimension();
    let mut pts = vec![base.to_vec()];
    for i in (1..=level).rev() {
        let digits: Vec<Point> = digit_set(n, i).into_iter().map(|a| a.into_iter().map(q).collect()).collect();
        pts = pts.par_iter().flat_map_iter(|p| digits.iter().map(move |a| law.multiply(p, a))).collect();
    }
    Ok(pts)
}

/// Integer points of a tile under an integral law.
pub fn enumerate_tile(law: &IntegralLaw, tile: &DyadicTile) -> Result<Vec<Vec<i64>>> {
    let n = tile.base.len();
    let mut pts = vec![tile.base.clone()];
    for i in (1..=tile.level).rev() {
        let digits = digit_set(n, i);
        pts = pts
            .par_iter()
            .map(|p| digits.iter().map(|a| law.mul(p, a)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect();
    }
    Ok(pts)
}

/// Split `h ∈ G(2^{i-1} Z)` as `h' * a` with `h' ∈ G(2^i Z)`, `a ∈ A_i`.
pub fn peel_digit(law: &IntegralLaw, h: &[i64], i: u32) -> Result<(Vec<i64>, Vec<i64>)> {
    let n = h.len();
    let m = 1i64 << i;
    let half = m / 2;
    let mut parent = vec![0i64; n];
    let mut digit = vec![0i64; n];
    for k in 0..n {
        // (parent * digit)_k = parent_k + digit_k + p_k(parent_<k, digit_<k)
        let p = law.poly_eval(k, &parent, &digit)?;
        let r = i64::try_from(h[k] as i128 - p).map_err(|_| Error::Overflow)?;
        let a = r.rem_euclid(m);
        if a != 0 && a != half {
            return Err(Error::Invalid(format!("point {h:?} is not in G(2^{} Z); cannot peel level {i}", i - 1)));
        }
        digit[k] = a;
        parent[k] = r - a;
    }
    Ok((parent, digit))
}

/// `h = g * a_l * ... * a_1`; returns `g` and `[a_1, ..., a_l]`.
pub fn dyadic_ancestor(law: &IntegralLaw, h: &[i64], level: u32) -> Result<(Vec<i64>, Vec<Vec<i64>>)> {
    let mut cur = h.to_vec();
    let mut digits = Vec::with_capacity(level as usize);
    for i in 1..=level {
        let (parent, a) = peel_digit(law, &cur, i)?;
        digits.push(a);
        cur = parent;
    }
    Ok((cur, digits))
}

/// The chain of ancestors `h_0 = h, h_1, ..., h_l`.
pub fn ancestor_chain(law: &IntegralLaw, h: &[i64], level: u32) -> Result<Vec<Vec<i64>>> {
    let mut chain = Vec::with_capacity(level as usize + 1);
    chain.push(h.to_vec());
    for i in 1..=level {
        let (parent, _) = peel_digit(law, chain.last().unwrap(), i)?;
        chain.push(parent);
    }
    Ok(chain)
}

/// Signed list of tiles: `+T` adds `T`, `-T` removes a subset of what is
/// already there.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DyadicDescription {
    pub terms: Vec<(bool, DyadicTile)>,
}

impl DyadicDescription {
    /// Number of terms at each level.
    pub fn level_counts(&self) -> BTreeMap<u32, usize> {
        let mut m = BTreeMap::new();
        for (_, t) in &self.terms {
            *m.entry(t.level).or_default() += 1;
        }
        m
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Lines `+ level b1,b2,...` / `- level b1,b2,...`.
    pub fn to_text(&self) -> String {
        self.terms.iter().map(|(pos, t)| format!("{} {}\n", if *pos { '+' } else { '-' }, t)).collect()
    }

    pub fn parse_text(s: &str) -> Result<Self> {
        let mut terms = Vec::new();
        for (ln, line) in s.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |msg: &str| Error::Parse { line: ln + 1, msg: msg.into() };
            let mut parts = line.split_whitespace();
            let sign = match parts.next() {
                Some("+") => true,
                Some("-") => false,
                _ => return Err(bad("expected + or -")),
            };
            let level: u32 = parts.next().and_then(|s| s.parse().ok()).ok_or_else(|| bad("bad level"))?;
            let base = parts
                .next()
                .ok_or_else(|| bad("missing base"))?
                .split(',')
                .map(|c| c.parse::<i64>().map_err(|_| bad("bad coordinate")))
                .collect::<Result<Vec<_>>>()?;
            terms.push((sign, DyadicTile::new(base, level).map_err(|e| bad(&e.to_string()))?));
        }
        Ok(Self { terms })
    }

    /// Evaluate the signed indicator sum; fails if some point ends with a
    /// multiplicity other than 0 or 1.
    pub fn evaluate(&self, law: &IntegralLaw) -> Result<Region> {
        let mut mult: HashMap<Vec<i64>, i64> = HashMap::new();
        for (pos, t) in &self.terms {
            for p in enumerate_tile(law, t)? {
                *mult.entry(p).or_default() += if *pos { 1 } else { -1 };
            }
        }
        let mut out = Region::new();
        for (p, m) in mult {
            match m {
                0 => {}
                1 => {
                    out.insert(p);
                }
                _ => return Err(Error::Invalid(format!("description covers {p:?} with multiplicity {m}"))),
            }
        }
        Ok(out)
    }
}

/// Region cell counts per ancestor at every level up to the top.
struct AncestorCounts {
    levels: Vec<HashMap<Vec<i64>, u64>>,
}

impl AncestorCounts {
    fn build(law: &IntegralLaw, region: &Region, top: u32) -> Result<Self> {
        let mut cur: Vec<Vec<i64>> = region.iter().cloned().collect();
        let mut levels = Vec::new();
        let mut level0 = HashMap::with_capacity(cur.len());
        for p in &cur {
            level0.insert(p.clone(), 1u64);
        }
        levels.push(level0);
        let mut i = 0;
        while levels.last().unwrap().len() > 1 && i < top {
            i += 1;
            cur = cur.par_iter().map(|h| peel_digit(law, h, i).map(|(p, _)| p)).collect::<Result<Vec<_>>>()?;
            let mut m: HashMap<Vec<i64>, u64> = HashMap::new();
            for p in &cur {
                *m.entry(p.clone()).or_default() += 1;
            }
            levels.push(m);
        }
        Ok(Self { levels })
    }

    fn count(&self, t: &DyadicTile) -> u64 {
        self.levels[t.level as usize].get(&t.base).copied().unwrap_or(0)
    }
}

/// Full/empty/split decomposition of a region over the ancestry tree,
/// starting from the smallest level `L` with `2^L` at least the widest side
/// of the bounding box (or earlier, once all cells share one ancestor). A
/// tile more than half full is emitted whole and its complement described
/// with the opposite sign.
pub fn describe_region(law: &IntegralLaw, region: &Region) -> Result<DyadicDescription> {
    describe_region_capped(law, region, MAX_LEVEL)
}

pub fn describe_region_capped(law: &IntegralLaw, region: &Region, cap: u32) -> Result<DyadicDescription> {
    if region.is_empty() {
        return Ok(DyadicDescription::default());
    }
    let n = law.dimension() as u32;
    let (lo, hi) = region.bounds().unwrap();
    let width = lo.iter().zip(&hi).map(|(a, b)| (b - a + 1) as u64).max().unwrap_or(1);
    let mut top = 0;
    while (1u64 << top) < width && top < cap {
        top += 1;
    }
    // counts of size 2^{n l} must fit in u128
    let top = top.min(127 / n.max(1));
    let counts = AncestorCounts::build(law, region, top)?;
    let top = (counts.levels.len() - 1) as u32;
    let mut roots: Vec<Vec<i64>> = counts.levels[top as usize].keys().cloned().collect();
    roots.sort();
    let mut out = DyadicDescription::default();
    for base in roots {
        describe_rec(law, &counts, DyadicTile { base, level: top }, n, true, false, &mut out)?;
    }
    Ok(out)
}

fn describe_rec(
    law: &IntegralLaw,
    counts: &AncestorCounts,
    tile: DyadicTile,
    n: u32,
    positive: bool,
    complement: bool,
    out: &mut DyadicDescription,
) -> Result<()> {
    let full = 1u128 << (n * tile.level);
    let c = counts.count(&tile) as u128;
    let target = if complement { full - c } else { c };
    if target == 0 {
        return Ok(());
    }
    if target == full {
        out.terms.push((positive, tile));
        return Ok(());
    }
    let children = tile.children(law)?;
    let (sign, comp) = if 2 * target > full {
        out.terms.push((positive, tile));
        (!positive, !complement)
    } else {
        (positive, complement)
    };
    for child in children {
        describe_rec(law, counts, child, n, sign, comp, out)?;
    }
    Ok(())
}

/// Level-`l` tiles meeting a set of integer points, with the points each
/// one contains.
pub fn partition_by_tile(law: &IntegralLaw, pts: &[Vec<i64>], level: u32) -> Result<BTreeMap<Vec<i64>, Vec<Vec<i64>>>> {
    let bases = pts.par_iter().map(|p| dyadic_ancestor(law, p, level).map(|(g, _)| g)).collect::<Result<Vec<_>>>()?;
    let mut out: BTreeMap<Vec<i64>, Vec<Vec<i64>>> = BTreeMap::new();
    for (b, p) in bases.into_iter().zip(pts) {
        out.entry(b).or_default().push(p.clone());
    }
    Ok(out)
}

/// Carnot digit set `delta_{2^{i-1}}(prod_j {0, .., 2^{w_j} - 1})`.
pub fn carnot_digit_set(weights: &[u32], level: u32) -> Vec<Vec<i64>> {
    let ranges: Vec<(i64, i64)> = weights.iter().map(|w| (0, (1i64 << w) - 1)).collect();
    grid(&ranges).into_iter().map(|d| d.iter().zip(weights).map(|(x, w)| x << ((level - 1) * w)).collect()).collect()
}

/// Points of the dilation-based tile `g * D_l * ... * D_1`; `2^{Ql}` of them
/// where `Q` is the homogeneous dimension.
pub fn carnot_dyadic(law: &GroupLaw, base: &[Q], level: u32) -> Result<Vec<Point>> {
    check_dim(law.dimension(), base.len())?;
    if !law.is_graded() {
        return Err(Error::NotGraded);
    }
    let mut pts = vec![base.to_vec()];
    for i in (1..=level).rev() {
        let digits: Vec<Point> =
            carnot_digit_set(law.weights(), i).into_iter().map(|a| a.into_iter().map(q).collect()).collect();
        pts = pts.par_iter().flat_map_iter(|p| digits.iter().map(move |a| law.multiply(p, a))).collect();
    }
    Ok(pts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{synthesize_law, GroupSpec};
    use std::collections::HashSet;

    fn heis_int() -> GroupLaw {
        synthesize_law(&GroupSpec::heisenberg_integral()).unwrap()
    }

    #[test]
    fn digit_sets() {
        let a2 = digit_set(3, 2);
        assert_eq!(a2.len(), 8);
        assert!(a2.contains(&vec![2, 0, 2]));
        assert_eq!(carnot_digit_set(&[1, 1, 2], 1).len(), 16);
        assert!(carnot_digit_set(&[1, 1, 2], 2).contains(&vec![2, 2, 12]));
    }

    #[test]
    fn tile_sizes() {
        let law = heis_int();
        let il = law.require_integral().unwrap();
        for l in 0..=3 {
            let pts = enumerate_tile(il, &DyadicTile { base: vec![0; 3], level: l }).unwrap();
            let set: HashSet<_> = pts.iter().collect();
            assert_eq!(set.len(), 1 << (3 * l));
        }
    }

    #[test]
    fn ancestor_round_trip() {
        let law = heis_int();
        let il = law.require_integral().unwrap();
        let h = [3, 1, -1];
        let (g, digits) = dyadic_ancestor(il, &h, 2).unwrap();
        assert!(g.iter().all(|c| c % 4 == 0));
        let mut acc = g.clone();
        for a in digits.iter().rev() {
            acc = il.mul(&acc, a).unwrap();
        }
        assert_eq!(acc, h);
        let (g0, d0) = dyadic_ancestor(il, &[0, 0, 0], 5).unwrap();
        assert_eq!(g0, vec![0, 0, 0]);
        assert!(d0.iter().all(|a| a.iter().all(|&c| c == 0)));
    }

    #[test]
    fn abelian_digits_are_binary() {
        let law = synthesize_law(&GroupSpec::abelian(2)).unwrap();
        let il = law.require_integral().unwrap();
        let (g, digits) = dyadic_ancestor(il, &[5, -3], 3).unwrap();
        assert_eq!(g, vec![0, -8]);
        assert_eq!(digits, vec![vec![1, 1], vec![0, 0], vec![4, 4]]);
    }

    #[test]
    fn single_tile_description() {
        let law = heis_int();
        let il = law.require_integral().unwrap();
        let t = DyadicTile { base: vec![8, -8, 16], level: 3 };
        let region = Region::from_points(enumerate_tile(il, &t).unwrap());
        let d = describe_region(il, &region).unwrap();
        assert_eq!(d.terms, vec![(true, t)]);
        assert_eq!(d.evaluate(il).unwrap(), region);
    }

    #[test]
    fn square_minus_corner_is_logarithmic() {
        let law = synthesize_law(&GroupSpec::abelian(2)).unwrap();
        let il = law.require_integral().unwrap();
        let mut region = Region::from_box(&[0, 0], &[1023, 1023]);
        region.remove(&[1023, 1023]);
        let d = describe_region(il, &region).unwrap();
        assert_eq!(d.evaluate(il).unwrap(), region);
        assert!(d.len() <= 2 * 11, "{} terms", d.len());
        assert!(d.level_counts().values().all(|&c| c <= 2));
    }

    #[test]
    fn description_text_round_trip() {
        let law = heis_int();
        let il = law.require_integral().unwrap();
        let region = Region::from_box(&[-3, 0, -2], &[2, 4, 5]);
        let d = describe_region(il, &region).unwrap();
        assert_eq!(d.evaluate(il).unwrap(), region);
        let back = DyadicDescription::parse_text(&d.to_text()).unwrap();
        assert_eq!(back, d);
        assert!(DyadicDescription::parse_text("* 1 0,0,0").is_err());
        assert!(DyadicDescription::parse_text("+ 2 1,0,0").is_err());
    }

    #[test]
    fn carnot_tiles() {
        let law = heis_int();
        assert_eq!(carnot_dyadic(&law, &[q(0), q(0), q(0)], 0).unwrap().len(), 1);
        let pts = carnot_dyadic(&law, &[q(0), q(0), q(0)], 1).unwrap();
        assert_eq!(pts.len(), 16);
        let ab = synthesize_law(&GroupSpec::abelian(2)).unwrap();
        let a = carnot_dyadic(&ab, &[q(0), q(0)], 2).unwrap();
        let b = enumerate_dyadic(&ab, &[q(0), q(0)], 2).unwrap();
        let sa: HashSet<_> = a.into_iter().collect();
        let sb: HashSet<_> = b.into_iter().collect();
        assert_eq!(sa, sb);
    }
}
