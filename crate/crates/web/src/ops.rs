use nilnet::quasicrystal::{qc_density, qc_generate, InternalWindow, QCSpec};
use nilnet::rational::{fmt_q, parse_q, q, qr, to_f64};
use nilnet::render::{self, Projection, TileKind};
use nilnet::tiling::{locate_with_residual, CoordBox, Lambda};
use nilnet::{synthesize_law, Error, GroupLaw, GroupSpec, Result};
use serde_json::{json, Value};

/// Largest level drawn in the browser (`8^5` cells).
pub const MAX_LEVEL: u32 = 5;

fn law(group: &str) -> Result<GroupLaw> {
    let spec = GroupSpec::preset(group).ok_or_else(|| Error::Invalid(format!("unknown group {group:?}")))?;
    synthesize_law(&spec)
}

fn projection(s: &str) -> Result<Projection> {
    match s {
        "oblique" => Ok(Projection::Oblique),
        _ => {
            let ax: Vec<usize> = s
                .split(',')
                .map(|t| t.trim().parse::<usize>().ok().filter(|&v| v >= 1).map(|v| v - 1))
                .collect::<Option<_>>()
                .ok_or_else(|| Error::Invalid(format!("projection {s:?}: use `oblique` or two axes like `1,3`")))?;
            match ax.as_slice() {
                [i, j] => Ok(Projection::Axes(*i, *j)),
                _ => Err(Error::Invalid("projection needs two axes".into())),
            }
        }
    }
}

pub fn render_tile(group: &str, level: u32, proj: &str, carnot: bool) -> Result<Value> {
    if level > MAX_LEVEL {
        return Err(Error::Invalid(format!("level is capped at {MAX_LEVEL} in the browser")));
    }
    let law = law(group)?;
    let kind = if carnot { TileKind::Carnot } else { TileKind::Dyadic };
    let r = render::render_tile(&law, level, projection(proj)?, kind)?;
    Ok(json!({"svg": r.svg, "points": r.points, "hull_vertices": r.hull_vertices}))
}

pub fn quasicrystal(theta1: &str, theta2: &str, s: &str, radius: i32) -> Result<Value> {
    if !(1..=60).contains(&radius) {
        return Err(Error::Invalid("radius must lie in 1..=60".into()));
    }
    let law = law("heisenberg-integral")?;
    let s = parse_q(s)?;
    let spec = QCSpec::new(
        &law,
        None,
        vec![vec![parse_q(theta1)?, parse_q(theta2)?]],
        InternalWindow::Box(CoordBox::half_open(vec![q(0)], vec![s])),
    )?;
    let r = q(radius as i64);
    let plane = CoordBox::closed(vec![-r.clone(), -r.clone(), q(0)], vec![r.clone(), r, q(0)]);
    let pts: Vec<[i64; 2]> = qc_generate(&law, &spec, &plane)?
        .points
        .iter()
        .map(|p| [p[0].to_integer().try_into().unwrap_or(0), p[1].to_integer().try_into().unwrap_or(0)])
        .collect();
    let windows: Vec<CoordBox> =
        [8i64, 16, 32].iter().map(|&w| CoordBox::half_open(vec![qr(-w, 2); 3], vec![qr(w, 2); 3])).collect();
    let density = qc_density(&law, &spec, &windows)?;
    Ok(json!({
        "points": pts,
        "expected_covolume": to_f64(&spec.covolume(3)?),
        "density": density,
    }))
}

pub fn locate(group: &str, point: &str, lambda: &str) -> Result<Value> {
    let law = law(group)?;
    let x = point.split(',').map(|t| parse_q(t.trim())).collect::<Result<Vec<_>>>()?;
    let lambda = Lambda::parse(lambda)?;
    if x.len() != law.dimension() || lambda.dimension() != law.dimension() {
        return Err(Error::DimensionMismatch { expected: law.dimension(), got: x.len().min(lambda.dimension()) });
    }
    let (base, residual) = locate_with_residual(&law, &x, &lambda);
    let s = |v: &[nilnet::Q]| v.iter().map(fmt_q).collect::<Vec<_>>();
    Ok(json!({
        "base": s(&base),
        "residual": s(&residual),
        "law": law.describe(),
    }))
}
