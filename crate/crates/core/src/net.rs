//! Point sets in `G` seen through the unit tiling: a net is described by how
//! many of its points fall in each unit cell `g * I_G`, `g ∈ G(Z)`, and by
//! its points inside a coordinate window.

use std::collections::HashMap;

use num_traits::Zero;

use crate::error::{check_dim, Error, Result};
use crate::group::{to_int_point, to_q_point, GroupLaw, Point};
use crate::rational::{q, Q};
use crate::tiling::{lambda_net, locate_tile, CoordBox, IntBox, Lambda};

pub trait Net: Sync {
    fn dimension(&self) -> usize;

    /// Number of points of the net in the cell `cell * I_G`.
    fn cell_count(&self, cell: &[i64]) -> u64;

    /// Points of the net in the window, lexicographic.
    fn points_in(&self, law: &GroupLaw, window: &CoordBox) -> Result<Vec<Point>>;

    /// `#(Y ∩ window)`; override when counting is cheaper than listing.
    fn count_in_box(&self, law: &GroupLaw, window: &CoordBox) -> Result<u64> {
        Ok(self.points_in(law, window)?.len() as u64)
    }

    /// Region where the net is known; `None` for nets defined on all of `G`.
    fn window(&self) -> Option<&CoordBox> {
        None
    }
}

/// `G(Λ)` for an integer `Λ` under a law for which `G(Z)` is a subgroup, so
/// each cell holds exactly its base point.
#[derive(Clone, Debug)]
pub struct LatticeNet {
    lambda: Vec<i64>,
}

impl LatticeNet {
    pub fn new(lambda: &Lambda) -> Result<Self> {
        let lambda = lambda.as_ints().ok_or_else(|| Error::Invalid("cell counting needs an integer lambda".into()))?;
        Ok(Self { lambda })
    }

    pub fn integers(n: usize) -> Self {
        Self { lambda: vec![1; n] }
    }

    pub fn lambda(&self) -> Lambda {
        Lambda::from_ints(&self.lambda).unwrap()
    }
}

impl Net for LatticeNet {
    fn dimension(&self) -> usize {
        self.lambda.len()
    }

    fn cell_count(&self, cell: &[i64]) -> u64 {
        u64::from(cell.iter().zip(&self.lambda).all(|(c, l)| c.rem_euclid(*l) == 0))
    }

    fn points_in(&self, law: &GroupLaw, window: &CoordBox) -> Result<Vec<Point>> {
        lambda_net(law, &self.lambda(), window)
    }

    fn count_in_box(&self, _law: &GroupLaw, window: &CoordBox) -> Result<u64> {
        let mut total: u64 = 1;
        for (i, l) in self.lambda.iter().enumerate() {
            let (lo, hi) = window.int_range(i, &q(*l));
            total = total.saturating_mul(if hi < lo { 0 } else { (hi - lo + 1) as u64 });
        }
        Ok(total)
    }
}

/// A finite explicit point set, indexed by unit cell.
#[derive(Clone, Debug)]
pub struct PointSet {
    n: usize,
    points: Vec<Point>,
    cells: HashMap<Vec<i64>, u64>,
    window: Option<CoordBox>,
}

impl PointSet {
    /// Index `points` by cell. `window` records where the set is complete.
    pub fn new(law: &GroupLaw, mut points: Vec<Point>, window: Option<CoordBox>) -> Result<Self> {
        let n = law.dimension();
        let unit = Lambda::unit(n);
        let mut cells: HashMap<Vec<i64>, u64> = HashMap::new();
        for p in &points {
            check_dim(n, p.len())?;
            let c = to_int_point(&locate_tile(law, p, &unit)).ok_or(Error::Overflow)?;
            *cells.entry(c).or_default() += 1;
        }
        points.sort();
        points.dedup();
        Ok(Self { n, points, cells, window })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

impl Net for PointSet {
    fn dimension(&self) -> usize {
        self.n
    }

    fn cell_count(&self, cell: &[i64]) -> u64 {
        self.cells.get(cell).copied().unwrap_or(0)
    }

    fn points_in(&self, _law: &GroupLaw, window: &CoordBox) -> Result<Vec<Point>> {
        Ok(self.points.iter().filter(|p| window.contains(p)).cloned().collect())
    }

    fn window(&self) -> Option<&CoordBox> {
        self.window.as_ref()
    }
}

/// Pieces cut out of `G(Z)` by [`IntegerNetMinus`].
#[derive(Clone, Debug, PartialEq)]
pub enum Removal {
    /// `{x : x_axis >= min}`, restricted to `within`.
    HalfSpace {
        axis: usize,
        min: i64,
        within: IntBox,
    },
    Box(IntBox),
}

impl Removal {
    fn removes(&self, c: &[i64]) -> bool {
        match self {
            Removal::HalfSpace { axis, min, within } => c[*axis] >= *min && within.contains(c),
            Removal::Box(b) => b.contains(c),
        }
    }
}

/// `G(Z)` with some solid pieces removed; the control case for strong BD.
#[derive(Clone, Debug)]
pub struct IntegerNetMinus {
    n: usize,
    removals: Vec<Removal>,
}

impl IntegerNetMinus {
    pub fn new(n: usize, removals: Vec<Removal>) -> Self {
        Self { n, removals }
    }

    pub fn removals(&self) -> &[Removal] {
        &self.removals
    }
}

impl Net for IntegerNetMinus {
    fn dimension(&self) -> usize {
        self.n
    }

    fn cell_count(&self, cell: &[i64]) -> u64 {
        u64::from(!self.removals.iter().any(|r| r.removes(cell)))
    }

    fn points_in(&self, law: &GroupLaw, window: &CoordBox) -> Result<Vec<Point>> {
        Ok(lambda_net(law, &Lambda::unit(self.n), window)?
            .into_iter()
            .filter(|p| {
                let c = to_int_point(p).unwrap();
                !self.removals.iter().any(|r| r.removes(&c))
            })
            .collect())
    }
}

/// `Y' x λZ` for a net `Y'` on the projected group `G'`.
pub struct ProductNet<'a> {
    base: &'a dyn Net,
    base_law: &'a GroupLaw,
    lambda: Q,
}

/// Lift a net on `G' = project(G)` to `G` by stacking copies along the last
/// coordinate.
pub fn product_net<'a>(law: &GroupLaw, base_law: &'a GroupLaw, base: &'a dyn Net, lambda: Q) -> Result<ProductNet<'a>> {
    let projected = law.project()?;
    if projected.polys() != base_law.polys() || base.dimension() + 1 != law.dimension() {
        return Err(Error::ProjectionMismatch);
    }
    if lambda <= Q::zero() {
        return Err(Error::Invalid("lambda must be positive".into()));
    }
    Ok(ProductNet { base, base_law, lambda })
}

impl Net for ProductNet<'_> {
    fn dimension(&self) -> usize {
        self.base.dimension() + 1
    }

    /// Exact only when the base net lies in `G'(Z)` and `λ` is an integer;
    /// other products should be counted through [`PointSet`].
    fn cell_count(&self, cell: &[i64]) -> u64 {
        let n = cell.len();
        let step_ok = self.lambda.is_integer()
            && cell[n - 1].rem_euclid(i64::try_from(self.lambda.numer()).unwrap_or(i64::MAX)) == 0;
        if step_ok {
            self.base.cell_count(&cell[..n - 1])
        } else {
            0
        }
    }

    fn points_in(&self, _law: &GroupLaw, window: &CoordBox) -> Result<Vec<Point>> {
        let n = window.dimension();
        let base_window = CoordBox {
            lo: window.lo[..n - 1].to_vec(),
            hi: window.hi[..n - 1].to_vec(),
            lo_closed: window.lo_closed[..n - 1].to_vec(),
            hi_closed: window.hi_closed[..n - 1].to_vec(),
        };
        let base_pts = self.base.points_in(self.base_law, &base_window)?;
        let (lo, hi) = window.int_range(n - 1, &self.lambda);
        let mut out = Vec::new();
        for p in base_pts {
            for k in lo..=hi {
                let mut x = p.clone();
                x.push(&self.lambda * q(k));
                out.push(x);
            }
        }
        out.sort();
        Ok(out)
    }
}

/// Net points counted over the unit cells of a set of cells.
pub fn count_cells<N: Net + ?Sized>(net: &N, cells: &[Vec<i64>]) -> u64 {
    cells.iter().map(|c| net.cell_count(c)).sum()
}

pub fn int_to_points(cells: &[Vec<i64>]) -> Vec<Point> {
    cells.iter().map(|c| to_q_point(c)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{synthesize_law, GroupSpec};
    use crate::rational::qr;

    #[test]
    fn lattice_cells() {
        let net = LatticeNet::new(&Lambda::from_ints(&[2, 1, 1]).unwrap()).unwrap();
        assert_eq!(net.cell_count(&[2, 5, -1]), 1);
        assert_eq!(net.cell_count(&[1, 5, -1]), 0);
        assert!(LatticeNet::new(&Lambda::new(vec![qr(1, 2), q(1), q(1)]).unwrap()).is_err());
    }

    #[test]
    fn point_set_indexes_cells() {
        let law = synthesize_law(&GroupSpec::heisenberg_integral()).unwrap();
        let pts = vec![vec![qr(2, 1), qr(-1, 4), q(-1)], vec![q(0), q(0), q(0)]];
        let set = PointSet::new(&law, pts, None).unwrap();
        assert_eq!(set.cell_count(&[0, 0, 0]), 1);
        let total: u64 = set.cells.values().sum();
        assert_eq!(total, 2);
    }

    #[test]
    fn product_of_integer_lattice_is_integer_lattice() {
        let law = synthesize_law(&GroupSpec::heisenberg_integral()).unwrap();
        let base_law = law.project().unwrap();
        let base = LatticeNet::integers(2);
        let prod = product_net(&law, &base_law, &base, q(1)).unwrap();
        let w = CoordBox::cube(3, q(2));
        let a = prod.points_in(&law, &w).unwrap();
        let b = LatticeNet::integers(3).points_in(&law, &w).unwrap();
        assert_eq!(a, b);
        assert_eq!(prod.cell_count(&[1, 2, 3]), 1);
        let wrong = synthesize_law(&GroupSpec::abelian(3)).unwrap();
        assert!(matches!(product_net(&law, &wrong, &LatticeNet::integers(3), q(1)), Err(Error::ProjectionMismatch)));
    }

    #[test]
    fn half_space_removal() {
        let within = CoordBox::cube(3, q(4)).int_box();
        let net = IntegerNetMinus::new(3, vec![Removal::HalfSpace { axis: 0, min: 1, within }]);
        assert_eq!(net.cell_count(&[1, 0, 0]), 0);
        assert_eq!(net.cell_count(&[0, 0, 0]), 1);
        assert_eq!(net.cell_count(&[9, 0, 0]), 1);
    }
}
