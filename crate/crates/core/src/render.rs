//! SVG pictures of dyadic tiles: every unit cell `g * I_G` of the tile is
//! drawn as the planar hull of its projected corners.

use std::fmt::Write as _;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::dyadic::{carnot_dyadic, enumerate_dyadic};
use crate::error::{Error, Result};
use crate::group::GroupLaw;
use crate::rational::{qr, to_f64, Q};
use crate::tiling::grid;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Projection {
    /// Coordinates `(i, j)`, zero-based.
    Axes(usize, usize),
    /// `(x_1 + x_2/2, x_3 + x_2/4)` for three-dimensional groups.
    Oblique,
}

impl Projection {
    pub fn name(&self) -> String {
        match self {
            Projection::Axes(i, j) => format!("axes-{}-{}", i + 1, j + 1),
            Projection::Oblique => "oblique".into(),
        }
    }

    fn apply(&self, x: &[Q]) -> (Q, Q) {
        match *self {
            Projection::Axes(i, j) => (x[i].clone(), x[j].clone()),
            Projection::Oblique => (&x[0] + &x[1] * qr(1, 2), &x[2] + &x[1] * qr(1, 4)),
        }
    }

    fn check(&self, n: usize) -> Result<()> {
        match *self {
            Projection::Axes(i, j) if i < n && j < n && i != j => Ok(()),
            Projection::Axes(..) => Err(Error::Invalid(format!("projection axes out of range for dimension {n}"))),
            Projection::Oblique if n == 3 => Ok(()),
            Projection::Oblique => Err(Error::RenderDimension(n)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TileKind {
    /// Digits `{0, 2^{i-1}}^n`, rescaled by `2^{-ℓ}` in every coordinate.
    Dyadic,
    /// Graded digits, rescaled by the group dilation `δ_{2^{-ℓ}}`.
    Carnot,
}

#[derive(Clone, Debug, Serialize)]
pub struct Rendered {
    pub level: u32,
    pub projection: String,
    pub points: usize,
    pub hull_vertices: usize,
    #[serde(skip)]
    pub hull: Vec<(Q, Q)>,
    #[serde(skip)]
    pub svg: String,
}

/// Strict vertices of the convex hull, counter-clockwise (monotone chain).
pub fn convex_hull(points: &[(Q, Q)]) -> Vec<(Q, Q)> {
    let mut pts = points.to_vec();
    pts.sort();
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: &(Q, Q), a: &(Q, Q), b: &(Q, Q)| (&a.0 - &o.0) * (&b.1 - &o.1) - (&a.1 - &o.1) * (&b.0 - &o.0);
    let mut lower: Vec<(Q, Q)> = Vec::new();
    for p in &pts {
        while lower.len() >= 2 && cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p) <= Q::zero() {
            lower.pop();
        }
        lower.push(p.clone());
    }
    let mut upper: Vec<(Q, Q)> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p) <= Q::zero() {
            upper.pop();
        }
        upper.push(p.clone());
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Renders the level-`ℓ` tile at the origin.
pub fn render_tile(law: &GroupLaw, level: u32, projection: Projection, kind: TileKind) -> Result<Rendered> {
    let n = law.dimension();
    if n < 2 {
        return Err(Error::DimensionTooSmall(n));
    }
    if n > 3 && projection == Projection::Oblique {
        return Err(Error::RenderDimension(n));
    }
    projection.check(n)?;
    let origin = vec![Q::zero(); n];
    let pts = match kind {
        TileKind::Dyadic => enumerate_dyadic(law, &origin, level)?,
        TileKind::Carnot => carnot_dyadic(law, &origin, level)?,
    };
    let scale = Q::one() / Q::from_integer((1i64 << level).into());
    let rescale = |x: Vec<Q>| -> Vec<Q> {
        match kind {
            TileKind::Dyadic => x.iter().map(|c| c * &scale).collect(),
            TileKind::Carnot => law.dilate(&x, &scale),
        }
    };
    let half = qr(1, 2);
    let corners: Vec<Vec<Q>> = grid(&vec![(0, 1); n])
        .into_iter()
        .map(|c| c.iter().map(|&b| if b == 0 { -half.clone() } else { half.clone() }).collect())
        .collect();
    let cells: Vec<Vec<(Q, Q)>> = pts
        .iter()
        .map(|g| {
            let proj: Vec<(Q, Q)> = corners.iter().map(|c| projection.apply(&rescale(law.multiply(g, c)))).collect();
            convex_hull(&proj)
        })
        .collect();
    let all: Vec<(Q, Q)> = cells.iter().flatten().cloned().collect();
    let hull = convex_hull(&all);
    let svg = to_svg(&cells, &hull, level, pts.len(), &projection);
    Ok(Rendered { level, projection: projection.name(), points: pts.len(), hull_vertices: hull.len(), hull, svg })
}

fn to_svg(cells: &[Vec<(Q, Q)>], hull: &[(Q, Q)], level: u32, points: usize, projection: &Projection) -> String {
    let f = |p: &(Q, Q)| (to_f64(&p.0), -to_f64(&p.1));
    let fl: Vec<(f64, f64)> = hull.iter().map(f).collect();
    let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
    for (x, y) in &fl {
        x0 = x0.min(*x);
        y0 = y0.min(*y);
        x1 = x1.max(*x);
        y1 = y1.max(*y);
    }
    let pad = 0.05 * (x1 - x0).max(y1 - y0).max(1e-9);
    let (w, h) = (x1 - x0 + 2.0 * pad, y1 - y0 + 2.0 * pad);
    let stroke = 0.004 * w.max(h);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}" width="480" height="{}" data-level="{level}" data-points="{points}" data-hull-vertices="{}" data-projection="{}">"#,
        x0 - pad,
        y0 - pad,
        w,
        h,
        (480.0 * h / w).round(),
        hull.len(),
        projection.name()
    );
    let _ = writeln!(
        out,
        r#"<metadata>{{"level":{level},"points":{points},"hull_vertices":{},"projection":"{}"}}</metadata>"#,
        hull.len(),
        projection.name()
    );
    let poly = |pts: &[(Q, Q)]| pts.iter().map(f).map(|(x, y)| format!("{x:.5},{y:.5}")).collect::<Vec<_>>().join(" ");
    for c in cells {
        let _ = writeln!(
            out,
            r##"<polygon points="{}" fill="#4a7ab5" fill-opacity="0.18" stroke="#1d3557" stroke-width="{stroke:.5}"/>"##,
            poly(c)
        );
    }
    let _ = writeln!(
        out,
        r##"<polygon points="{}" fill="none" stroke="#c1121f" stroke-width="{:.5}" stroke-dasharray="{:.5}"/>"##,
        poly(hull),
        stroke * 1.5,
        stroke * 4.0
    );
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{synthesize_law, GroupSpec};
    use crate::rational::q;

    #[test]
    fn hull_of_square_with_interior_and_collinear_points() {
        let pts = vec![(q(0), q(0)), (q(2), q(0)), (q(1), q(0)), (q(2), q(2)), (q(0), q(2)), (q(1), q(1))];
        assert_eq!(convex_hull(&pts).len(), 4);
    }

    #[test]
    fn abelian_tiles_are_squares() {
        let law = synthesize_law(&GroupSpec::abelian(2)).unwrap();
        for level in 0..3 {
            let r = render_tile(&law, level, Projection::Axes(0, 1), TileKind::Dyadic).unwrap();
            assert_eq!(r.points, 1 << (2 * level));
            assert_eq!(r.hull_vertices, 4);
        }
    }

    #[test]
    fn heisenberg_counts_and_shear() {
        let law = synthesize_law(&GroupSpec::heisenberg()).unwrap();
        let r = render_tile(&law, 2, Projection::Axes(0, 2), TileKind::Dyadic).unwrap();
        assert_eq!(r.points, 64);
        assert!(r.svg.contains(r#"data-points="64""#));
        assert!(r.hull_vertices > 4);
        let carnot = render_tile(&law, 1, Projection::Oblique, TileKind::Carnot).unwrap();
        assert_eq!(carnot.points, 16);
        let fil = synthesize_law(&GroupSpec::filiform()).unwrap();
        assert!(matches!(render_tile(&fil, 1, Projection::Oblique, TileKind::Dyadic), Err(Error::RenderDimension(4))));
    }
}
