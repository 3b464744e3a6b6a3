//! Text formats: `key = value` group files, point CSV and JSON-lines records.
//!
//! A group file either lists brackets of basis vectors,
//!
//! ```text
//! # Heisenberg, [e1, e2] = -e3
//! dimension = 3
//! step = 2
//! labels = x, y, z
//! bracket = 1 2 3 -1
//! ```
//!
//! or spells out the law polynomials in `a1..an, b1..bn`:
//!
//! ```text
//! dimension = 3
//! step = 2
//! p3 = a1*b2 - a2*b1
//! coordinates = first
//! ```
//!
//! Unlisted `p_i` are zero. `weights = 1, 1, 2` overrides derived weights.
//! The one-line forms `structure_constants = (1, 2, 3, -1), ...` and
//! `law = 0; 0; a1*b2 - a2*b1` are accepted too.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{variable_names, Coordinates, GroupSpec, LawSource, Point, StructureConstants};
use crate::poly::Poly;
use crate::rational::{fmt_q, parse_q, to_f64, Q};

/// One `key = value` line; `line` is 1-based.
#[derive(Clone, Debug)]
pub struct KvLine {
    pub line: usize,
    pub key: String,
    pub value: String,
}

/// Non-blank, non-comment lines of the form `key = value`.
pub fn kv_lines(text: &str) -> Result<Vec<KvLine>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) =
            line.split_once('=').ok_or_else(|| Error::Parse { line: i + 1, msg: "expected key = value".into() })?;
        out.push(KvLine { line: i + 1, key: k.trim().to_ascii_lowercase(), value: v.trim().to_string() });
    }
    Ok(out)
}

pub fn parse_list<T>(kv: &KvLine, f: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    kv.value.split(',').map(|s| f(s.trim()).map_err(|e| Error::Parse { line: kv.line, msg: e.to_string() })).collect()
}

fn parse_usize(kv: &KvLine) -> Result<usize> {
    kv.value.parse().map_err(|_| Error::Parse { line: kv.line, msg: format!("{} must be a count", kv.key) })
}

pub fn parse_group_file(text: &str) -> Result<GroupSpec> {
    let lines = kv_lines(text)?;
    let mut dimension = None;
    let mut step = None;
    let mut labels = None;
    let mut weights = None;
    let mut coordinates = Coordinates::First;
    let mut brackets: Vec<(usize, usize, usize, Q)> = Vec::new();
    let mut laws: Vec<(usize, KvLine)> = Vec::new();
    for kv in &lines {
        let perr = |msg: String| Error::Parse { line: kv.line, msg };
        match kv.key.as_str() {
            "dimension" => dimension = Some(parse_usize(kv)?),
            "step" => step = Some(parse_usize(kv)?),
            "labels" => labels = Some(parse_list(kv, |s| Ok(s.to_string()))?),
            "weights" => {
                weights =
                    Some(parse_list(kv, |s| s.parse::<u32>().map_err(|_| Error::Invalid(format!("bad weight {s:?}"))))?)
            }
            "coordinates" => {
                coordinates = match kv.value.as_str() {
                    "first" => Coordinates::First,
                    "second" => Coordinates::Second,
                    other => return Err(perr(format!("coordinates must be first or second, got {other:?}"))),
                }
            }
            "bracket" => {
                let parts: Vec<&str> = kv.value.split_whitespace().collect();
                if parts.len() != 4 {
                    return Err(perr("bracket needs `i j k coefficient`".into()));
                }
                brackets.push(parse_bracket(&parts, &perr)?);
            }
            "structure_constants" => {
                // (i, j, k, c), (i, j, k, c), ...
                for t in kv.value.split(')').map(|t| t.trim().trim_start_matches(',').trim()).filter(|t| !t.is_empty())
                {
                    let inner = t.strip_prefix('(').ok_or_else(|| perr(format!("expected (i, j, k, c), got {t:?}")))?;
                    let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
                    if parts.len() != 4 {
                        return Err(perr(format!("expected (i, j, k, c), got {t:?})")));
                    }
                    brackets.push(parse_bracket(&parts, &perr)?);
                }
            }
            "law" => {
                // p1; p2; ...; pn
                for (i, p) in kv.value.split(';').enumerate() {
                    let mut single = kv.clone();
                    single.value = p.trim().to_string();
                    laws.push((i, single));
                }
            }
            key if key.starts_with('p') && key[1..].parse::<usize>().is_ok() => {
                let i: usize = key[1..].parse().unwrap();
                if i == 0 {
                    return Err(perr("law indices start at 1".into()));
                }
                laws.push((i - 1, kv.clone()));
            }
            other => return Err(perr(format!("unknown key {other:?}"))),
        }
    }
    let n = dimension.ok_or(Error::Parse { line: 0, msg: "missing dimension".into() })?;
    if !brackets.is_empty() && !laws.is_empty() {
        return Err(Error::Parse {
            line: laws[0].1.line,
            msg: "give either brackets or law polynomials, not both".into(),
        });
    }
    let mut spec = if laws.is_empty() {
        for (i, j, k, _) in &brackets {
            if *i >= n || *j >= n || *k >= n {
                return Err(Error::Invalid(format!("bracket index out of range for dimension {n}")));
            }
        }
        let sc = StructureConstants::from_entries(n, &brackets)?;
        let s = step.unwrap_or_else(|| sc.nilpotency_step().max(1));
        let mut spec = GroupSpec::from_constants(n, s, &brackets)?;
        spec.source = LawSource::StructureConstants(sc);
        spec
    } else {
        let names = variable_names(n);
        let mut polys = vec![Poly::zero(); n];
        for (i, kv) in &laws {
            if *i >= n {
                return Err(Error::Parse { line: kv.line, msg: format!("p{} exceeds dimension {n}", i + 1) });
            }
            polys[*i] =
                Poly::parse(&kv.value, &names).map_err(|e| Error::Parse { line: kv.line, msg: e.to_string() })?;
        }
        GroupSpec::from_law(polys, step.unwrap_or(n), coordinates)
    };
    if let Some(l) = labels {
        if l.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: l.len() });
        }
        spec.labels = l;
    }
    if let Some(w) = weights {
        if w.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: w.len() });
        }
        spec.weights = Some(w);
    }
    spec.coordinates = coordinates;
    Ok(spec)
}

/// `[i, j, k, c]` with 1-based indices.
fn parse_bracket(parts: &[&str], perr: &dyn Fn(String) -> Error) -> Result<(usize, usize, usize, Q)> {
    let idx = |s: &str| -> Result<usize> {
        match s.parse::<usize>() {
            Ok(v) if v >= 1 => Ok(v - 1),
            _ => Err(perr(format!("bad basis index {s:?}"))),
        }
    };
    let c = parse_q(parts[3]).map_err(|e| perr(e.to_string()))?;
    Ok((idx(parts[0])?, idx(parts[1])?, idx(parts[2])?, c))
}

/// Inverse of [`parse_group_file`].
pub fn write_group_file(spec: &GroupSpec) -> String {
    let mut out =
        format!("dimension = {}\nstep = {}\nlabels = {}\n", spec.dimension, spec.step, spec.labels.join(", "));
    if let Some(w) = &spec.weights {
        let w: Vec<String> = w.iter().map(u32::to_string).collect();
        out += &format!("weights = {}\n", w.join(", "));
    }
    match &spec.source {
        LawSource::StructureConstants(sc) => {
            for (i, j, k, c) in sc.entries() {
                out += &format!("bracket = {} {} {} {}\n", i + 1, j + 1, k + 1, fmt_q(c));
            }
        }
        LawSource::Explicit(polys) => {
            let names = variable_names(spec.dimension);
            for (i, p) in polys.iter().enumerate() {
                if !p.is_zero() {
                    out += &format!("p{} = {}\n", i + 1, p.display_with(&names));
                }
            }
        }
    }
    if spec.coordinates == Coordinates::Second {
        out += "coordinates = second\n";
    }
    out
}

/// CSV with exact `p/q` columns followed by float columns.
pub fn points_csv(labels: &[String], points: &[Point]) -> String {
    let mut out = labels.join(",");
    for l in labels {
        out += &format!(",{l}_f64");
    }
    out.push('\n');
    for p in points {
        let exact: Vec<String> = p.iter().map(fmt_q).collect();
        let float: Vec<String> = p.iter().map(|x| format!("{}", to_f64(x))).collect();
        out += &exact.join(",");
        out.push(',');
        out += &float.join(",");
        out.push('\n');
    }
    out
}

/// Reads the exact columns of [`points_csv`] output (or any CSV of rationals
/// with a header row); float columns are ignored.
pub fn parse_points_csv(text: &str) -> Result<Vec<Point>> {
    let mut lines = text.lines().enumerate();
    let header = lines.next().ok_or(Error::Parse { line: 1, msg: "empty file".into() })?.1;
    let n = header.split(',').filter(|h| !h.trim().ends_with("_f64")).count();
    let mut out = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let p = line
            .split(',')
            .take(n)
            .map(|s| parse_q(s.trim()))
            .collect::<Result<Vec<Q>>>()
            .map_err(|e| Error::Parse { line: i + 1, msg: e.to_string() })?;
        if p.len() != n {
            return Err(Error::Parse { line: i + 1, msg: format!("expected {n} columns") });
        }
        out.push(p);
    }
    Ok(out)
}

/// One JSON object per line.
pub fn json_lines<T: Serialize>(records: &[T]) -> String {
    records.iter().map(|r| serde_json::to_string(r).expect("records serialize") + "\n").collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::synthesize_law;
    use crate::rational::{q, qr};

    #[test]
    fn bracket_file_matches_preset() {
        let text = "# Heisenberg\ndimension = 3\nstep = 2\nlabels = x, y, z\nbracket = 1 2 3 -1\n";
        let spec = parse_group_file(text).unwrap();
        assert_eq!(spec, GroupSpec::heisenberg());
        assert_eq!(parse_group_file(&write_group_file(&spec)).unwrap(), spec);
    }

    #[test]
    fn law_file_round_trip() {
        let text = "dimension = 3\nstep = 2\np3 = a1*b2 - a2*b1\n";
        let spec = parse_group_file(text).unwrap();
        let law = synthesize_law(&spec).unwrap();
        assert_eq!(law.multiply(&[q(1), q(0), q(0)], &[q(0), q(1), q(0)]), vec![q(1), q(1), q(1)]);
        assert_eq!(parse_group_file(&write_group_file(&spec)).unwrap(), spec);
    }

    #[test]
    fn one_line_forms() {
        let a = parse_group_file("dimension = 3\nstructure_constants = (1, 2, 3, -1)\nlabels = x, y, z\n").unwrap();
        assert_eq!(a, GroupSpec::heisenberg());
        let b = parse_group_file("dimension = 3\nstep = 2\nlaw = 0; 0; a1*b2 - a2*b1\n").unwrap();
        let c = parse_group_file("dimension = 3\nstep = 2\np3 = a1*b2 - a2*b1\n").unwrap();
        assert_eq!(b, c);
        assert!(parse_group_file("dimension = 3\nstructure_constants = (1, 2, 3)\n").is_err());
    }

    #[test]
    fn parse_errors_carry_lines() {
        let err = parse_group_file("dimension = 3\nbogus = 1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        assert!(matches!(parse_group_file("dimension = 3\nbracket = 1 2\n"), Err(Error::Parse { line: 2, .. })));
        assert!(parse_group_file("step = 2\n").is_err());
    }

    #[test]
    fn csv_round_trip() {
        let labels = vec!["x".to_string(), "y".to_string()];
        let pts = vec![vec![qr(1, 3), q(-2)], vec![q(0), qr(7, 2)]];
        let text = points_csv(&labels, &pts);
        assert!(text.starts_with("x,y,x_f64,y_f64\n1/3,-2,"));
        assert_eq!(parse_points_csv(&text).unwrap(), pts);
    }
}
