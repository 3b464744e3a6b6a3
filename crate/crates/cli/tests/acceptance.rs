//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::collections::{BTreeSet, HashSet};
use std::panic;
use std::path::PathBuf;
use std::process::{Command, ExitCode};
use std::time::Instant;

use nilnet::criteria::{strong_bd_check, strong_bd_from_differences, PerimeterOracle, StrongBdConfig};
use nilnet::dyadic::{
    describe_region, digit_set, dyadic_ancestor, enumerate_dyadic, enumerate_tile, partition_by_tile, DyadicTile,
};
use nilnet::exotic::{ball_window, covering_window, verify_exotic, ExoticNet, ExoticSpec};
use nilnet::group::variable_names;
use nilnet::net::{IntegerNetMinus, LatticeNet, Net, Removal};
use nilnet::poly::Poly;
use nilnet::quasicrystal::{golden_theta, liouville_theta, qc_contrast, qc_generate, InternalWindow, QCSpec};
use nilnet::rational::{floor, q, qr, random_q, to_f64};
use nilnet::tiling::{combinatorial_perimeter, face_neighbors, locate_tile, CoordBox, FaceSampling, Lambda, Region};
use nilnet::{synthesize_law, GroupLaw, GroupSpec, Point, Q};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn heisenberg() -> GroupLaw {
    synthesize_law(&GroupSpec::heisenberg()).unwrap()
}

fn integral_heisenberg() -> GroupLaw {
    synthesize_law(&GroupSpec::heisenberg_integral()).unwrap()
}

fn c1_group_law() -> Outcome {
    let start = Instant::now();
    let law = heisenberg();
    let names = variable_names(3);
    let closed_form = [Poly::zero(), Poly::zero(), Poly::parse("-1/2*a1*b2 + 1/2*a2*b1", &names).unwrap()];
    if law.polys() != closed_form {
        return Err(format!("synthesized law differs: {}", law.describe().replace('\n', "; ")));
    }
    for (label, spec) in [
        ("heisenberg", GroupSpec::heisenberg()),
        ("filiform", GroupSpec::filiform()),
        ("abelian3", GroupSpec::abelian(3)),
    ] {
        let law = synthesize_law(&spec).map_err(|e| format!("{label}: {e}"))?;
        law.validate_samples(1000, 7).map_err(|e| format!("{label}: {e}"))?;
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 10.0, format!("closed form matches; 3 groups x 1000 exact triples in {secs:.2}s"))
}

fn c2_lambda_tiling() -> Outcome {
    let law = integral_heisenberg();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut checked = 0;
    for entries in [[1i64, 1, 1], [2, 1, 1]] {
        let lambda = Lambda::from_ints(&entries).unwrap();
        for _ in 0..10_000 {
            let x: Point = (0..3).map(|_| random_q(&mut rng, 8, 12)).collect();
            let g = locate_tile(&law, &x, &lambda);
            for (gi, l) in g.iter().zip(&entries) {
                if !(gi / q(*l)).is_integer() {
                    return Err(format!("base {g:?} not in G(Lambda)"));
                }
            }
            let r = law.left_quotient(&g, &x);
            let in_box = r.iter().zip(&entries).all(|(ri, l)| *ri >= qr(-l, 2) && *ri < qr(*l, 2));
            if !in_box {
                return Err(format!("residual {r:?} of {x:?} leaves the box for {entries:?}"));
            }
            let h: Point = entries.iter().map(|l| q(l * rng.gen_range(-6..=6))).collect();
            let moved = locate_tile(&law, &law.multiply(&h, &x), &lambda);
            if moved != law.multiply(&h, &g) {
                return Err(format!("equivariance fails at x={x:?}, h={h:?}"));
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} random points: residual in box and equivariant, exact"))
}

fn c3_dyadic() -> Outcome {
    let start = Instant::now();
    let il_law = integral_heisenberg();
    let il = il_law.require_integral().unwrap();
    let fig = heisenberg();
    let n = 3;
    for level in 0..=4u32 {
        let expected = 1usize << (n as u32 * level);
        let pts = enumerate_dyadic(&fig, &[q(0), q(0), q(0)], level).unwrap();
        let distinct: BTreeSet<Point> = pts.into_iter().collect();
        if distinct.len() != expected {
            return Err(format!("level {level}: {} points, expected {expected}", distinct.len()));
        }
        let s = 1i64 << level;
        for base in [vec![0, 0, 0], vec![3 * s, -s, 5 * s]] {
            let tile = DyadicTile::new(base.clone(), level).unwrap();
            let pts = enumerate_tile(il, &tile).unwrap();
            let distinct: HashSet<&Vec<i64>> = pts.iter().collect();
            if distinct.len() != expected {
                return Err(format!("integral tile {tile}: {} points", distinct.len()));
            }
            for p in &pts {
                let (g, digits) = dyadic_ancestor(il, p, level).map_err(|e| e.to_string())?;
                let mut back = g.clone();
                for (i, a) in digits.iter().enumerate().rev() {
                    if !digit_set(n, i as u32 + 1).contains(a) {
                        return Err(format!("digit {a:?} outside A_{}", i + 1));
                    }
                    back = il.mul(&back, a).unwrap();
                }
                if g != base || back != *p {
                    return Err(format!("ancestry round trip fails at {p:?}"));
                }
            }
        }
    }
    let window = CoordBox::closed(vec![q(-5), q(-5), q(-20)], vec![q(12), q(12), q(20)]);
    let cells = window.int_points();
    let all: HashSet<&Vec<i64>> = cells.iter().collect();
    for level in 0..=4u32 {
        let parts = partition_by_tile(il, &cells, level).unwrap();
        let mut covered = 0usize;
        for (base, group) in &parts {
            let inside: HashSet<Vec<i64>> = enumerate_tile(il, &DyadicTile::new(base.clone(), level).unwrap())
                .unwrap()
                .into_iter()
                .filter(|p| all.contains(p))
                .collect();
            let group: HashSet<Vec<i64>> = group.iter().cloned().collect();
            if inside != group {
                return Err(format!("level {level}: tile at {base:?} disagrees with its ancestor group"));
            }
            covered += inside.len();
        }
        if covered != cells.len() {
            return Err(format!("level {level}: tiles cover {covered} of {} window points", cells.len()));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 60.0, format!("sizes 2^(3l) through 4096; round trip and partition exact; {secs:.1}s"))
}

fn c4_efficient_counting() -> Outcome {
    let law = integral_heisenberg();
    let il = law.require_integral().unwrap();
    let fw = face_neighbors(&law, &FaceSampling::default()).unwrap();
    let mut regions: Vec<(String, Region)> = Vec::new();
    for s in [4i64, 6, 8, 12, 16, 24, 32, 48, 64] {
        regions.push((format!("box {s}"), Region::from_box(&[0, 0, 0], &[s - 1, s - 1, s - 1])));
        let mut r = Region::from_box(&[0, 0, 0], &[s - 1, s - 1, s - 1]);
        let c = s / 2;
        for p in Region::from_box(&[c, c, c], &[s - 1, s - 1, s - 1]).sorted() {
            r.remove(&p);
        }
        regions.push((format!("box {s} minus corner"), r));
    }
    for s in [8i64, 16, 32] {
        regions.push((format!("slab {s}x{s}x{}", 2 * s), Region::from_box(&[-s, 0, 3], &[-1, s - 1, 2 * s + 2])));
        regions.push((format!("slab {s}x{}x{s}", 2 * s), Region::from_box(&[5, -s, -s], &[s + 4, s - 1, -1])));
    }
    let n = 3u32;
    // (size, region, max over k of count(k) 2^{k(n-1)} / p(A))
    let mut rows: Vec<(usize, String, f64)> = Vec::new();
    for (label, r) in &regions {
        let desc = describe_region(il, r).map_err(|e| e.to_string())?;
        let back = desc.evaluate(il).map_err(|e| e.to_string())?;
        if back.sorted() != r.sorted() {
            return Err(format!("{label}: description does not evaluate back to the region"));
        }
        let p = to_f64(&combinatorial_perimeter(il, r, &fw).unwrap());
        let worst = desc
            .level_counts()
            .iter()
            .map(|(k, c)| *c as f64 * 2f64.powi((k * (n - 1)) as i32) / p)
            .fold(0.0, f64::max);
        rows.push((r.len(), label.clone(), worst));
    }
    rows.sort_by_key(|r| r.0);
    // envelope fit over the whole family
    let c_fit = rows.iter().map(|r| r.2).fold(0.0, f64::max);
    let violation = rows.iter().map(|r| r.2 / c_fit).fold(0.0, f64::max);
    // diagnostic only: the same envelope taken over the smaller half
    let half = rows.len() / 2;
    let c_small = rows[..half].iter().map(|r| r.2).fold(0.0, f64::max);
    let (size, label, _) = rows.iter().max_by(|a, b| a.2.total_cmp(&b.2)).unwrap();
    ensure(
        rows.len() >= 20 && c_fit.is_finite() && violation <= 1.0,
        format!(
            "{} regions; fitted C = {c_fit:.4} (attained by {label}, {size} cells); max violation ratio {violation:.4}; \
             C over the {half} smallest = {c_small:.4}",
            rows.len()
        ),
    )
}

fn c5_density() -> Outcome {
    let law = integral_heisenberg();
    let il = law.require_integral().unwrap();
    let fw = face_neighbors(&law, &FaceSampling::default()).unwrap();
    let oracle = PerimeterOracle::new(il, &fw);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut lines = Vec::new();
    let mut ok = true;
    for entries in [[1i64, 1, 1], [2, 1, 1], [1, 2, 3]] {
        let lambda = Lambda::from_ints(&entries).unwrap();
        let net = LatticeNet::new(&lambda).unwrap();
        let v = lambda.covolume();
        let mut per_level = Vec::new();
        for level in 0..=4u32 {
            let s = 1i64 << level;
            let mut bases: Vec<Vec<i64>> = Vec::new();
            for a in 0..6 {
                for b in 0..6 {
                    for c in 0..6 {
                        bases.push(vec![a * s, b * s, c * s]);
                    }
                }
            }
            for _ in 0..40 {
                bases.push((0..3).map(|_| rng.gen_range(-400..=400) * s).collect());
            }
            let p = to_f64(&oracle.tile_perimeter(level).unwrap());
            let mut worst: f64 = 0.0;
            for base in bases {
                let tile = DyadicTile::new(base, level).unwrap();
                let count: u64 = enumerate_tile(il, &tile).unwrap().iter().map(|c| net.cell_count(c)).sum();
                let expected = Q::from_integer((tile.size() as i64).into()) / &v;
                let dev = to_f64(&(q(count as i64) - expected)).abs();
                worst = worst.max(dev / p);
            }
            per_level.push(worst);
        }
        let cum = |k: usize| per_level[..=k].iter().copied().fold(0.0, f64::max);
        let holds = cum(4) <= 1.05 * cum(3) + 1e-12;
        ok &= holds;
        let shown: Vec<String> = per_level.iter().map(|x| format!("{x:.4}")).collect();
        lines.push(format!("{entries:?}: per-level max [{}]", shown.join(", ")));
    }
    ensure(ok, lines.join("; "))
}

fn exotic_net(law: &GroupLaw) -> ExoticNet<'_> {
    ExoticNet::build(law, ExoticSpec::new(law, golden_theta(12), 2).unwrap()).unwrap()
}

fn c6_strong_bd() -> Outcome {
    let law = integral_heisenberg();
    let il = law.require_integral().unwrap();
    let net = exotic_net(&law);
    let window = covering_window(&net);
    for b in net.balls() {
        if !ball_window(b, 0).lo.iter().zip(&window.lo).all(|(a, w)| a >= w) {
            return Err(format!("window misses E{}", b.index));
        }
    }
    let cfg = StrongBdConfig { max_level: 5, eps: 0.1 };
    let ex = strong_bd_from_differences(il, 3, &net.differences(&window), &cfg).unwrap();

    let tile = enumerate_tile(il, &DyadicTile::new(vec![0, 0, 0], 5).unwrap()).unwrap();
    let lo: Vec<Q> = (0..3).map(|k| q(tile.iter().map(|p| p[k]).min().unwrap())).collect();
    let hi: Vec<Q> = (0..3).map(|k| q(tile.iter().map(|p| p[k]).max().unwrap())).collect();
    let ctl_window = CoordBox::closed(lo, hi);
    let ib = ctl_window.int_box();
    let mid = ib.lo[0] + (ib.hi[0] - ib.lo[0]) / 2;
    let minus = IntegerNetMinus::new(3, vec![Removal::HalfSpace { axis: 0, min: mid, within: ib }]);
    let ctl = strong_bd_check(&law, &LatticeNet::integers(3), &minus, &ctl_window, &cfg).unwrap();
    ensure(
        ex.slope <= 1.0 + 0.15 && ctl.slope >= 2.7,
        format!(
            "exotic D(k) {:?} slope {:.3} (<= 1.15); half-space D(k) {:?} slope {:.3} (>= 2.7)",
            ex.d, ex.slope, ctl.d, ctl.slope
        ),
    )
}

fn c7_exotic_degeneracy() -> Outcome {
    let law = integral_heisenberg();
    let net = exotic_net(&law);
    let window = covering_window(&net);
    let rep = verify_exotic(&net, &window, (1, 8), &StrongBdConfig::default()).unwrap();
    let e2 = rep.holes.iter().find(|h| h.index == 2).ok_or("no ball E2")?;
    let sep = rep.separation.get(1).ok_or("no E2 separation window")?;
    let e2_window = ball_window(&net.balls()[1], 2).to_string();
    if sep.window != e2_window {
        return Err(format!("separation window {} is not the E2 window {e2_window}", sep.window));
    }
    let gaps: Vec<String> = rep.gaps.iter().map(|g| format!("{}:{:.4}", g.i, g.gap)).collect();
    ensure(
        e2.hole_radius >= 2.0 && sep.c_est >= 0.4 && rep.gaps_decreasing && rep.gaps.len() >= 3,
        format!(
            "E2 hole radius {:.4}; c_est {:.3} on {}; gaps [{}] decreasing {}",
            e2.hole_radius,
            sep.c_est,
            sep.window,
            gaps.join(" "),
            rep.gaps_decreasing
        ),
    )
}

/// `π`-preimage by brute force: integer `(g, k)` with `k - L'(g) - offset`
/// in the internal box.
fn preimage(spec: &QCSpec, window: &CoordBox, d: usize) -> Vec<Point> {
    let InternalWindow::Box(s) = &spec.window else { unreachable!() };
    let mut out: Vec<Point> = window
        .int_points()
        .into_iter()
        .map(|g| g.into_iter().map(q).collect::<Point>())
        .filter(|g| {
            let l: Vec<Q> = spec
                .l_prime
                .iter()
                .zip(&spec.offset)
                .map(|(row, o)| row.iter().zip(&g[..d]).map(|(a, x)| a * x).sum::<Q>() + o)
                .collect();
            let ranges: Vec<(i64, i64)> = l
                .iter()
                .zip(&s.lo)
                .zip(&s.hi)
                .map(|((l, a), b)| {
                    let lo: BigInt = floor(&(l + a)) - 1;
                    let hi: BigInt = floor(&(l + b)) + 1;
                    (lo.to_i64().unwrap(), hi.to_i64().unwrap())
                })
                .collect();
            nilnet::tiling::grid(&ranges).iter().any(|k| {
                let internal: Vec<Q> = k.iter().zip(&l).map(|(k, l)| q(*k) - l).collect();
                s.contains(&internal)
            })
        })
        .collect();
    out.sort();
    out
}

fn c8_qc_reduction() -> Outcome {
    let law = heisenberg();
    let window = CoordBox::closed(vec![q(-12), q(-9), q(-4)], vec![q(15), q(11), q(4)]);
    let golden = QCSpec::slope(&law, golden_theta(12), qr(1, 2)).unwrap();
    let tilted = QCSpec::new(
        &law,
        None,
        vec![vec![qr(7, 19), qr(-3, 11)]],
        InternalWindow::Box(CoordBox::closed(vec![qr(-1, 5)], vec![qr(2, 5)])),
    )
    .unwrap()
    .with_offset(vec![qr(1, 7)])
    .unwrap();
    let mut sizes = Vec::new();
    for (label, spec) in [("golden", &golden), ("tilted", &tilted)] {
        let got = qc_generate(&law, spec, &window).unwrap().points;
        let want = preimage(spec, &window, 2);
        if got != want {
            return Err(format!("{label}: {} generated vs {} in the preimage", got.len(), want.len()));
        }
        sizes.push(format!("{label} {}", got.len()));
    }
    Ok(format!("point-for-point equal on {window} ({})", sizes.join(", ")))
}

fn c9_qc_contrast() -> Outcome {
    let law = integral_heisenberg();
    let thetas = vec![("golden".to_string(), golden_theta(12)), ("liouville".to_string(), liouville_theta(4))];
    let rows = qc_contrast(&law, &thetas, &[16, 32, 64, 128]).unwrap();
    let show = |r: &nilnet::quasicrystal::ContrastRow| {
        r.ratios.iter().map(|x| format!("{x:.5}")).collect::<Vec<_>>().join(", ")
    };
    ensure(
        rows[0].non_increasing && rows[1].strictly_increasing,
        format!(
            "golden [{}] non-increasing {}; liouville [{}] strictly increasing {}",
            show(&rows[0]),
            rows[0].non_increasing,
            show(&rows[1]),
            rows[1].strictly_increasing
        ),
    )
}

fn svg_attr(svg: &str, name: &str) -> Option<usize> {
    let key = format!("{name}=\"");
    let start = svg.find(&key)? + key.len();
    svg[start..].split('"').next()?.parse().ok()
}

/// Vertices of the dashed hull polygon in an SVG written by `render`.
fn svg_hull(svg: &str) -> Vec<String> {
    svg.lines()
        .find(|l| l.contains("stroke-dasharray"))
        .and_then(|l| l.split("points=\"").nth(1))
        .and_then(|s| s.split('"').next())
        .map(|s| s.split_whitespace().map(String::from).collect())
        .unwrap_or_default()
}

fn c10_render() -> Outcome {
    let out: PathBuf = std::env::temp_dir().join(format!("nilnet-accept-{}", std::process::id()));
    let status = Command::new(env!("CARGO_BIN_EXE_nilnet"))
        .args(["render", "--group", "heisenberg", "--axes", "1,3", "--levels", "2", "--out"])
        .arg(&out)
        .output()
        .map_err(|e| e.to_string())?;
    if !status.status.success() {
        return Err(format!("render failed: {}", String::from_utf8_lossy(&status.stderr)));
    }
    let mut files: Vec<PathBuf> = std::fs::read_dir(&out).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    let svgs: Vec<String> = files.iter().map(|f| std::fs::read_to_string(f).unwrap()).collect();
    let _ = std::fs::remove_dir_all(&out);
    if svgs.len() != 3 {
        return Err(format!("expected 3 SVGs, got {}", svgs.len()));
    }
    let counts: Vec<Option<usize>> = svgs.iter().map(|s| svg_attr(s, "data-points")).collect();
    let vertices: Vec<Option<usize>> = svgs.iter().map(|s| svg_attr(s, "data-hull-vertices")).collect();
    let hulls: Vec<Vec<String>> = svgs.iter().map(|s| svg_hull(s)).collect();
    let counts_ok = counts == [Some(1), Some(8), Some(64)];
    // level 0 is the unit square; every later hull must differ from it and from each other
    let distinct = hulls[1] != hulls[0] && hulls[2] != hulls[0] && hulls[2] != hulls[1];
    let v2 = vertices[2].unwrap_or(0);
    ensure(
        counts_ok && distinct && v2 > 8,
        format!(
            "point counts {counts:?}; hull vertices {vertices:?}; hulls distinct {distinct}; level-2 hull vertex count {v2} (> 8 required)"
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("group law correctness", c1_group_law),
        ("lambda-net tiling", c2_lambda_tiling),
        ("dyadic structure", c3_dyadic),
        ("efficient counting", c4_efficient_counting),
        ("density", c5_density),
        ("strong BD bound for the exotic net", c6_strong_bd),
        ("exotic degeneracy", c7_exotic_degeneracy),
        ("quasicrystal reduction", c8_qc_reduction),
        ("quasicrystal contrast", c9_qc_contrast),
        ("tile rendering", c10_render),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(f).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or(e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default())
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(d) => println!("criterion {:>2} PASS {name}: {d} [{secs:.1}s]", i + 1),
            Err(d) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name}: {d} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
