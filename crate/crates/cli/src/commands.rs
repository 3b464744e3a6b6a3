use std::error::Error as StdError;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use nilnet::criteria::{
    coarse_perimeter, discrepancy_report, strong_bd_check, strong_bd_from_differences, uniformly_spread_check,
    PerimeterMethod, PerimeterOracle, Shape, StrongBdConfig, StrongBdReport, TestSet,
};
use nilnet::dyadic::{carnot_dyadic, describe_region, enumerate_dyadic, enumerate_tile, partition_by_tile, DyadicTile};
use nilnet::exotic::{covering_window, manifest, verify_exotic, ExoticNet, ExoticReport, ExoticSpec, ScheduleMode};
use nilnet::group::IntegralLaw;
use nilnet::io::{json_lines, parse_group_file, points_csv};
use nilnet::net::{IntegerNetMinus, LatticeNet, Net, Removal};
use nilnet::quasicrystal::{
    golden_theta, liouville_theta, parse_qc_spec, qc_contrast, qc_density, qc_generate, QCSpec,
};
use nilnet::rational::{fmt_q, parse_q, q, qr, to_f64};
use nilnet::render::{render_tile, Projection, TileKind};
use nilnet::tiling::{combinatorial_perimeter_box, face_neighbors, lambda_net, CoordBox, FaceSampling, Lambda, Region};
use nilnet::{synthesize_law, Error, GroupLaw, GroupSpec, Metric, Point, Q};
use serde_json::json;

use crate::output::Sink;
use crate::{Against, Cli, Cmd, Common, ExoticArgs, Experiment, Format, PerimeterKind};

type Res<T> = std::result::Result<T, Box<dyn StdError>>;

/// Runs one command; `Ok(false)` is a failed verdict.
pub fn run(cli: &Cli) -> Res<bool> {
    let c = &cli.common;
    let spec = load_spec(&c.group)?;
    if let Cmd::Check { samples } = &cli.cmd {
        return check(&spec, *samples, c.seed);
    }
    let law = synthesize_law(&spec)?;
    let n = law.dimension();
    let out_dir = match (&cli.cmd, &c.out) {
        (Cmd::Render { .. }, None) => Some(PathBuf::from(".")),
        (_, d) => d.clone(),
    };
    let sink = Sink::new(out_dir)?;
    match &cli.cmd {
        Cmd::Check { .. } => unreachable!(),
        Cmd::Net { lambda } => {
            let lambda = lambda_arg(lambda.as_deref(), n)?;
            let w = window(c, n, CoordBox::cube(n, q(2)))?;
            let pts = lambda_net(&law, &lambda, &w)?;
            emit_points(&sink, c.format, "net", &law, &pts)?;
            Ok(true)
        }
        Cmd::Dyadic { level, base, carnot, describe } => {
            if *describe {
                let il = law.require_integral()?;
                let w = window(c, n, CoordBox::cube(n, q(2)))?;
                let region = Region::from_points(w.int_points());
                let desc = describe_region(il, &region)?;
                eprintln!("{} cells as {} signed tiles; per level {:?}", region.len(), desc.len(), desc.level_counts());
                sink.emit("description.txt", &desc.to_text())?;
                return Ok(true);
            }
            let base: Point = match base {
                Some(s) => s.split(',').map(|x| parse_q(x.trim())).collect::<nilnet::Result<_>>()?,
                None => vec![Q::from_integer(0.into()); n],
            };
            let pts =
                if *carnot { carnot_dyadic(&law, &base, *level)? } else { enumerate_dyadic(&law, &base, *level)? };
            emit_points(&sink, c.format, "tile", &law, &pts)?;
            Ok(true)
        }
        Cmd::Perimeter { method, r, samples, pitch, metric } => {
            let w = window(c, n, CoordBox::closed(vec![q(0); n], vec![q(3); n]))?;
            let metric = Metric::parse(metric)?;
            let record = match method {
                PerimeterKind::Combinatorial => {
                    let il = law.require_integral()?;
                    let fw = face_neighbors(&law, &FaceSampling::default())?;
                    let p = combinatorial_perimeter_box(il, &w.int_box(), &fw)?;
                    json!({"window": w.to_string(), "method": "combinatorial", "exact": fmt_q(&p), "value": to_f64(&p)})
                }
                PerimeterKind::Neighborhood | PerimeterKind::BoundaryNet => {
                    let m = if *method == PerimeterKind::Neighborhood {
                        PerimeterMethod::Neighborhood { samples: *samples, seed: c.seed }
                    } else {
                        PerimeterMethod::BoundaryNet { pitch: *pitch }
                    };
                    let est = coarse_perimeter(&law, &Shape::Box(w.clone()), *r, &m, metric, None)?;
                    json!({"window": w.to_string(), "method": format!("{method:?}").to_lowercase(), "r": r,
                           "value": est.value, "std_err": est.std_err, "samples": est.samples})
                }
            };
            sink.emit("perimeter.json", &format!("{record}\n"))?;
            Ok(true)
        }
        Cmd::Discrepancy { lambda1, lambda2, max_level } => {
            let il = law.require_integral()?;
            let y1 = LatticeNet::new(&lambda_arg(lambda1.as_deref(), n)?)?;
            let y2 = LatticeNet::new(&lambda_arg(Some(lambda2), n)?)?;
            let w = window(c, n, CoordBox::closed(vec![q(0); n], vec![q(7); n]))?;
            let cells = w.int_points();
            let mut sets = Vec::new();
            for level in 0..=*max_level {
                for base in partition_by_tile(il, &cells, level)?.into_keys() {
                    sets.push(TestSet::Tile(DyadicTile::new(base, level)?));
                }
            }
            let fw = face_neighbors(&law, &FaceSampling::default())?;
            let oracle = PerimeterOracle::new(il, &fw);
            let rep = discrepancy_report(&law, &oracle, &y1, &y2, &sets)?;
            sink.emit("discrepancy.jsonl", &json_lines(&rep.records))?;
            eprintln!("{} tiles; max ratio {:.4}; per-level max {:?}", sets.len(), rep.max_ratio, rep.per_level_max);
            Ok(true)
        }
        Cmd::Spread { lambda, max_level } => {
            let lambda = lambda_arg(lambda.as_deref(), n)?;
            let (bounded, records) = spread(&law, &lambda, *max_level)?;
            sink.emit("spread.jsonl", &records)?;
            eprintln!("{}", if bounded { "ratios stop growing" } else { "ratios keep growing" });
            Ok(bounded)
        }
        Cmd::Strongbd { against, exotic, max_level, eps } => {
            let cfg = StrongBdConfig { max_level: *max_level, eps: *eps };
            let rep = match against {
                Against::Exotic => {
                    let net = build_exotic(&law, exotic, false)?;
                    let w = window(c, n, covering_window(&net))?;
                    strong_bd_from_differences(law.require_integral()?, n, &net.differences(&w), &cfg)?
                }
                Against::Halfspace => halfspace_control(&law, c, &cfg)?,
            };
            sink.emit("strongbd.json", &(serde_json::to_string_pretty(&rep)? + "\n"))?;
            eprintln!("slope {:.3} vs threshold {:.3}: {}", rep.slope, rep.threshold, verdict(rep.pass));
            Ok(rep.pass)
        }
        Cmd::Qc { theta, s, spec, density } => {
            let qspec = match spec {
                Some(p) => parse_qc_spec(&law, &read(p)?)?,
                None => QCSpec::slope(&law, theta_arg(theta.as_deref())?, parse_q(s)?)?,
            };
            let w = window(c, n, CoordBox::cube(n, q(4)))?;
            let set = qc_generate(&law, &qspec, &w)?;
            emit_points(&sink, c.format, "qc", &law, &set.points)?;
            if let Some(d) = density {
                let windows: Vec<CoordBox> = int_list(d)?
                    .into_iter()
                    .map(|s| CoordBox::half_open(vec![qr(-s, 2); n], vec![qr(s, 2); n]))
                    .collect();
                let rep = qc_density(&law, &qspec, &windows)?;
                sink.emit("qc-density.jsonl", &json_lines(&rep.entries))?;
                eprintln!("covolume estimates {:?}", rep.trend);
            }
            Ok(true)
        }
        Cmd::Exotic { exotic, verify, compressed } => {
            let net = build_exotic(&law, exotic, *compressed)?;
            sink.emit("manifest.json", &(serde_json::to_string_pretty(&manifest(&net))? + "\n"))?;
            if c.window.is_some() {
                let w = window(c, n, covering_window(&net))?;
                emit_points(&sink, c.format, "exotic", &law, &net.points_in(&law, &w)?)?;
            }
            if *verify {
                let w = window(c, n, covering_window(&net))?;
                let rep = verify_exotic(&net, &w, (1, 8), &StrongBdConfig::default())?;
                sink.emit("verification.json", &(serde_json::to_string_pretty(&rep)? + "\n"))?;
                let ok = exotic_ok(&rep);
                eprintln!("verification: {}", verdict(ok));
                return Ok(ok);
            }
            Ok(true)
        }
        Cmd::Render { levels, axes, oblique, carnot } => {
            let projections = match axes {
                Some(a) => match int_list(a)?.as_slice() {
                    [i, j] if *i >= 1 && *j >= 1 => vec![Projection::Axes(*i as usize - 1, *j as usize - 1)],
                    _ => return Err("--axes needs two 1-based indices, e.g. 1,3".into()),
                },
                None if *oblique => vec![Projection::Oblique],
                None => {
                    let mut v = vec![Projection::Axes(0, 1)];
                    if n > 2 {
                        v.push(Projection::Axes(0, n - 1));
                    }
                    if n == 3 {
                        v.push(Projection::Oblique);
                    }
                    v
                }
            };
            let (kind, kname) = if *carnot { (TileKind::Carnot, "carnot") } else { (TileKind::Dyadic, "dyadic") };
            let mut rendered = Vec::new();
            for p in &projections {
                for level in 0..=*levels {
                    let r = render_tile(&law, level, *p, kind)?;
                    let file = format!("tile-{kname}-{}-level{level}.svg", r.projection);
                    sink.emit(&file, &r.svg)?;
                    println!(
                        "level {level} {} points {} hull_vertices {} {file}",
                        r.projection, r.points, r.hull_vertices
                    );
                    rendered.push(r);
                }
            }
            if c.format == Some(Format::Records) {
                sink.emit("render.jsonl", &json_lines(&rendered))?;
            }
            Ok(true)
        }
        Cmd::Experiment { name, exotic, lambdas, sides } => experiment(&law, c, &sink, *name, exotic, lambdas, sides),
    }
}

fn check(spec: &GroupSpec, samples: usize, seed: u64) -> Res<bool> {
    let law = match synthesize_law(spec) {
        Ok(l) => l,
        Err(e) => {
            println!("FAIL {e}");
            return Ok(false);
        }
    };
    if let Err(e) = law.validate_samples(samples, seed) {
        println!("FAIL {e}");
        return Ok(false);
    }
    let r = law.check_rationality();
    println!("dimension = {}", law.dimension());
    println!("step = {}", law.step());
    println!("labels = {}", law.labels().join(", "));
    println!("weights = {:?}", law.weights());
    print!("{}", law.describe());
    println!("graded = {}", law.is_graded());
    println!("integral = {}", law.integral().is_some());
    println!("rational basis = {} ({})", r.has_rational_basis, r.note);
    println!("PASS identity, associativity and inverses on {samples} random samples");
    Ok(true)
}

fn load_spec(s: &str) -> Res<GroupSpec> {
    let path = Path::new(s);
    if path.is_file() {
        return parse_group_file(&read(path)?).map_err(|e| format!("{}: {e}", path.display()).into());
    }
    GroupSpec::preset(s).ok_or_else(|| format!("no group file or preset named {s:?}").into())
}

fn read(p: &Path) -> Res<String> {
    fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()).into())
}

fn window(c: &Common, n: usize, default: CoordBox) -> Res<CoordBox> {
    let w = match &c.window {
        Some(s) => CoordBox::parse(s)?,
        None => default,
    };
    if w.dimension() != n {
        return Err(Error::DimensionMismatch { expected: n, got: w.dimension() }.into());
    }
    Ok(w)
}

fn int_list(s: &str) -> Res<Vec<i64>> {
    s.split(',')
        .map(|x| x.trim().parse::<i64>().map_err(|_| format!("expected an integer list, got {s:?}").into()))
        .collect()
}

fn lambda_arg(s: Option<&str>, n: usize) -> Res<Lambda> {
    let l = match s {
        Some(s) => Lambda::parse(s)?,
        None => Lambda::unit(n),
    };
    if l.dimension() != n {
        return Err(Error::DimensionMismatch { expected: n, got: l.dimension() }.into());
    }
    Ok(l)
}

fn theta_arg(s: Option<&str>) -> Res<Q> {
    Ok(match s {
        Some(s) => parse_q(s)?,
        None => golden_theta(12),
    })
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn emit_points(sink: &Sink, format: Option<Format>, stem: &str, law: &GroupLaw, pts: &[Point]) -> Res<()> {
    match format.unwrap_or(Format::Csv) {
        Format::Records => {
            let recs: Vec<serde_json::Value> =
                pts.iter().map(|p| json!({"point": p.iter().map(fmt_q).collect::<Vec<_>>()})).collect();
            sink.emit(&format!("{stem}.jsonl"), &json_lines(&recs))?;
        }
        Format::Csv => sink.emit(&format!("{stem}.csv"), &points_csv(law.labels(), pts))?,
        Format::Svg => return Err("svg output is only available from `render`".into()),
    }
    if !sink.has_dir() {
        eprintln!("{} points", pts.len());
    }
    Ok(())
}

fn build_exotic<'a>(law: &'a GroupLaw, args: &ExoticArgs, compressed: bool) -> Res<ExoticNet<'a>> {
    let mut spec = ExoticSpec::new(law, theta_arg(args.theta.as_deref())?, args.i_max)?;
    if compressed {
        spec.mode = ScheduleMode::Compressed;
    }
    Ok(ExoticNet::build(law, spec)?)
}

fn exotic_ok(rep: &ExoticReport) -> bool {
    rep.holes.iter().all(|h| h.ok) && rep.gaps_decreasing && rep.strong_bd.pass && rep.certified
}

/// Bounding box of the level-`k` tile at the origin.
fn tile_bbox(il: &IntegralLaw, n: usize, level: u32) -> Res<CoordBox> {
    let pts = enumerate_tile(il, &DyadicTile::new(vec![0; n], level)?)?;
    let lo = (0..n).map(|k| q(pts.iter().map(|p| p[k]).min().unwrap_or(0))).collect();
    let hi = (0..n).map(|k| q(pts.iter().map(|p| p[k]).max().unwrap_or(0))).collect();
    Ok(CoordBox::closed(lo, hi))
}

/// `G(Z)` minus a half-space cut from a box: a net that is not strongly
/// BD-equivalent to `G(Z)`.
fn halfspace_control(law: &GroupLaw, c: &Common, cfg: &StrongBdConfig) -> Res<StrongBdReport> {
    let il = law.require_integral()?;
    let n = law.dimension();
    let w = window(c, n, tile_bbox(il, n, cfg.max_level)?)?;
    let ib = w.int_box();
    let mid = ib.lo[0] + (ib.hi[0] - ib.lo[0]) / 2;
    let minus = IntegerNetMinus::new(n, vec![Removal::HalfSpace { axis: 0, min: mid, within: ib }]);
    Ok(strong_bd_check(law, &LatticeNet::integers(n), &minus, &w, cfg)?)
}

/// Spread ratios on the nested origin tiles; returns the verdict and records.
fn spread(law: &GroupLaw, lambda: &Lambda, max_level: u32) -> Res<(bool, String)> {
    let il = law.require_integral()?;
    let n = law.dimension();
    let net = LatticeNet::new(lambda)?;
    let fw = face_neighbors(law, &FaceSampling::default())?;
    let oracle = PerimeterOracle::new(il, &fw);
    let sets = (0..=max_level)
        .map(|l| Ok(TestSet::Tile(DyadicTile::new(vec![0; n], l)?)))
        .collect::<nilnet::Result<Vec<_>>>()?;
    let rep = uniformly_spread_check(law, &oracle, &net, &lambda.covolume(), &sets)?;
    Ok((rep.bounded, json_lines(&rep.records)))
}

fn experiment(
    law: &GroupLaw,
    c: &Common,
    sink: &Sink,
    name: Experiment,
    exotic: &ExoticArgs,
    lambdas: &str,
    sides: &str,
) -> Res<bool> {
    let n = law.dimension();
    let mut records: Vec<serde_json::Value> = Vec::new();
    let mut table = String::new();
    let (stem, ok) = match name {
        Experiment::LambdaDensity => {
            let il = law.require_integral()?;
            let fw = face_neighbors(law, &FaceSampling::default())?;
            let oracle = PerimeterOracle::new(il, &fw);
            let _ = writeln!(table, "{:<12} {:>9} {:>10} {:>8}", "lambda", "covolume", "max_ratio", "bounded");
            let mut all = true;
            for l in lambdas.split(';') {
                let lambda = lambda_arg(Some(l), n)?;
                let net = LatticeNet::new(&lambda)?;
                let sets = (0..=4)
                    .map(|k| Ok(TestSet::Tile(DyadicTile::new(vec![0; n], k)?)))
                    .collect::<nilnet::Result<Vec<_>>>()?;
                let rep = uniformly_spread_check(law, &oracle, &net, &lambda.covolume(), &sets)?;
                all &= rep.bounded;
                let ratios: Vec<f64> = rep.records.iter().map(|r| r.ratio).collect();
                let _ = writeln!(
                    table,
                    "{:<12} {:>9} {:>10.4} {:>8}",
                    lambda.to_string(),
                    fmt_q(&lambda.covolume()),
                    rep.max_ratio,
                    rep.bounded
                );
                records.push(json!({"lambda": lambda.to_string(), "covolume": fmt_q(&lambda.covolume()),
                                    "ratios": ratios, "max_ratio": rep.max_ratio, "bounded": rep.bounded}));
            }
            ("lambda-density", all)
        }
        Experiment::StrongBd => {
            let cfg = StrongBdConfig::default();
            let net = build_exotic(law, exotic, false)?;
            let ex =
                strong_bd_from_differences(law.require_integral()?, n, &net.differences(&covering_window(&net)), &cfg)?;
            let ctl = halfspace_control(law, &Common { window: None, ..c.clone() }, &cfg)?;
            let _ = writeln!(table, "{:<10} {:>8} {:>9} {:>6}  D(k)", "net", "slope", "threshold", "pass");
            for (label, r) in [("exotic", &ex), ("halfspace", &ctl)] {
                let _ = writeln!(table, "{label:<10} {:>8.3} {:>9.3} {:>6}  {:?}", r.slope, r.threshold, r.pass, r.d);
                records.push(json!({"net": label, "report": r}));
            }
            ("strong-bd", ex.pass && !ctl.pass)
        }
        Experiment::QuasicrystalContrast => {
            let sides = int_list(sides)?;
            let thetas = vec![("golden".to_string(), golden_theta(12)), ("liouville".to_string(), liouville_theta(4))];
            let rows = qc_contrast(law, &thetas, &sides)?;
            let _ = writeln!(
                table,
                "{:<10} {:>40} {:>15} {:>19}",
                "theta", "ratios", "non_increasing", "strictly_increasing"
            );
            for r in &rows {
                let ratios: Vec<String> = r.ratios.iter().map(|x| format!("{x:.4}")).collect();
                let _ = writeln!(
                    table,
                    "{:<10} {:>40} {:>15} {:>19}",
                    r.label,
                    ratios.join(" "),
                    r.non_increasing,
                    r.strictly_increasing
                );
                records.push(serde_json::to_value(r)?);
            }
            ("quasicrystal-contrast", rows[0].non_increasing && rows[1].strictly_increasing)
        }
        Experiment::ExoticVerify => {
            let net = build_exotic(law, exotic, false)?;
            let w = window(c, n, covering_window(&net))?;
            let rep = verify_exotic(&net, &w, (1, 8), &StrongBdConfig::default())?;
            for h in &rep.holes {
                let _ = writeln!(
                    table,
                    "ball E{} radius {} hole {:.4} removed {} ok {}",
                    h.index, h.radius, h.hole_radius, h.removed, h.ok
                );
            }
            let gaps: Vec<String> = rep.gaps.iter().map(|g| format!("{}:{:.4}", g.i, g.gap)).collect();
            let _ = writeln!(table, "gaps {} decreasing {}", gaps.join(" "), rep.gaps_decreasing);
            for s in &rep.separation {
                let _ = writeln!(table, "window {} c_est {:.4} C_est {:.4}", s.window, s.c_est, s.big_c_est);
            }
            let _ = writeln!(
                table,
                "strong BD D(k) {:?} slope {:.3} pass {}",
                rep.strong_bd.d, rep.strong_bd.slope, rep.strong_bd.pass
            );
            let _ = writeln!(table, "schedule certified {}", rep.certified);
            records.push(serde_json::to_value(&rep)?);
            ("exotic-verify", exotic_ok(&rep))
        }
    };
    let _ = writeln!(table, "verdict {}", verdict(ok));
    print!("{table}");
    if sink.has_dir() {
        sink.emit(&format!("{stem}.jsonl"), &json_lines(&records))?;
        sink.emit(&format!("{stem}.txt"), &table)?;
    }
    Ok(ok)
}
