//! Text formats: curve specifications, sampled tables and front diagrams.

use std::fmt;
use std::str::FromStr;

use nalgebra::{Vector3, Vector4};
use serde::{Deserialize, Serialize};

use crate::curves::{
    area_twist, figure_eight, torus_knot, unknot_front, unknot_horizontal_geiges, Curve3, Curve4, CurveFamily, Frame,
    Tolerances,
};
use crate::degree::{builtin_map, sampled_s2, stereographic_torus_knot, SphereMap};
use crate::error::{Error, Result};
use crate::invariants::{Crossing, Cusp, CuspKind, FrontDiagram};
use crate::lifts::{lift_horizontal, stabilized};
use crate::numeric::{gcd, PeriodicSpline};

pub const MIN_RESOLUTION: usize = 64;
pub const DEFAULT_RESOLUTION: usize = 4096;

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

/// Equispaced samples of a closed curve in 3 or 4 coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub frame: Frame,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn dim(&self) -> usize {
        self.rows.first().map_or(0, |r| r.len())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    UnknotFront,
    TorusKnot { p: u32, q: u32 },
    StereographicTorus { p: i64, q: i64 },
    FigureEight,
    UnknotHorizontal,
    AreaTwist { theta_samples: usize },
    Stabilized { base: Box<Family>, signs: Vec<i8> },
    Table(Table),
}

/// A curve by builtin family or table, with its sampling resolution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSpec {
    pub family: Family,
    pub resolution: usize,
}

/// A resolved curve specification.
#[derive(Clone)]
pub enum Resolved {
    Curve(Curve3),
    Horizontal(Curve4),
    Loop(CurveFamily<Curve3>),
}

impl fmt::Debug for Resolved {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Resolved::Curve(c) => write!(f, "Curve({c:?})"),
            Resolved::Horizontal(c) => write!(f, "Horizontal({c:?})"),
            Resolved::Loop(l) => write!(f, "Loop({} slices)", l.theta_samples),
        }
    }
}

/// Splits on commas that are not inside parentheses.
fn split_top(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(cur.trim().to_string());
                cur.clear();
                continue;
            }
            _ => {}
        }
        cur.push(ch);
    }
    if !cur.trim().is_empty() {
        out.push(cur.trim().to_string());
    }
    out
}

fn parse_sign(s: &str, line: usize) -> Result<i8> {
    match s {
        "+" | "+1" | "1" => Ok(1),
        "-" | "−" | "-1" => Ok(-1),
        _ => Err(parse_err(line, format!("stabilization sign must be + or -, got {s:?}"))),
    }
}

fn parse_int<T: FromStr>(s: &str, line: usize) -> Result<T> {
    s.trim().parse().map_err(|_| parse_err(line, format!("integer expected, got {s:?}")))
}

impl Family {
    /// Parses `name` or `name(args)`, e.g. `torus_knot(2,3)` or `stabilized(unknot_front, +, -)`.
    pub fn parse_inline(s: &str, line: usize) -> Result<Family> {
        let s = s.trim();
        let (name, args) = match s.find('(') {
            Some(i) if s.ends_with(')') => (s[..i].trim(), split_top(&s[i + 1..s.len() - 1])),
            Some(_) => return Err(parse_err(line, format!("unbalanced parentheses in {s:?}"))),
            None => (s, Vec::new()),
        };
        Family::from_parts(name, &args, line)
    }

    fn from_parts(name: &str, args: &[String], line: usize) -> Result<Family> {
        let want = |n: usize| -> Result<()> {
            if args.len() == n {
                Ok(())
            } else {
                Err(parse_err(line, format!("{name} takes {n} parameter(s), got {}", args.len())))
            }
        };
        let fam = match name {
            "unknot_front" => {
                want(0)?;
                Family::UnknotFront
            }
            "figure_eight" => {
                want(0)?;
                Family::FigureEight
            }
            "unknot_horizontal" => {
                want(0)?;
                Family::UnknotHorizontal
            }
            "torus_knot" => {
                want(2)?;
                Family::TorusKnot { p: parse_int(&args[0], line)?, q: parse_int(&args[1], line)? }
            }
            "stereographic_torus" => {
                want(2)?;
                Family::StereographicTorus { p: parse_int(&args[0], line)?, q: parse_int(&args[1], line)? }
            }
            "area_twist" => {
                if args.len() > 1 {
                    return Err(parse_err(line, "area_twist takes at most one parameter"));
                }
                let theta_samples = match args.first() {
                    Some(a) => parse_int(a, line)?,
                    None => 48,
                };
                Family::AreaTwist { theta_samples }
            }
            "stabilized" => {
                let Some(base) = args.first() else {
                    return Err(parse_err(line, "stabilized needs a base curve"));
                };
                let base = Family::parse_inline(base, line)?;
                let signs = args[1..].iter().map(|a| parse_sign(a, line)).collect::<Result<_>>()?;
                Family::Stabilized { base: Box::new(base), signs }
            }
            "table" => return Err(parse_err(line, "table curves are read from files")),
            _ => return Err(parse_err(line, format!("unknown family {name:?}"))),
        };
        fam.validate(line)?;
        Ok(fam)
    }

    fn validate(&self, line: usize) -> Result<()> {
        match self {
            Family::TorusKnot { p, q } => {
                if *p < 2 || *q < 2 || gcd(*p as i64, *q as i64) != 1 {
                    return Err(parse_err(line, format!("torus_knot needs coprime p, q ≥ 2, got ({p}, {q})")));
                }
            }
            Family::StereographicTorus { p, q } => {
                if gcd(*p, *q) != 1 {
                    return Err(parse_err(line, format!("gcd({p}, {q}) ≠ 1")));
                }
            }
            Family::AreaTwist { theta_samples } if *theta_samples < 3 => {
                return Err(parse_err(line, "area_twist needs at least 3 θ-samples"));
            }
            Family::Stabilized { base, .. } => base.validate(line)?,
            _ => {}
        }
        Ok(())
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::UnknotFront => f.write_str("unknot_front"),
            Family::TorusKnot { p, q } => write!(f, "torus_knot({p},{q})"),
            Family::StereographicTorus { p, q } => write!(f, "stereographic_torus({p},{q})"),
            Family::FigureEight => f.write_str("figure_eight"),
            Family::UnknotHorizontal => f.write_str("unknot_horizontal"),
            Family::AreaTwist { theta_samples } => write!(f, "area_twist({theta_samples})"),
            Family::Stabilized { base, signs } => {
                write!(f, "stabilized({base}")?;
                for s in signs {
                    f.write_str(if *s > 0 { ",+" } else { ",-" })?;
                }
                f.write_str(")")
            }
            Family::Table(_) => f.write_str("table"),
        }
    }
}

fn frame_from_str(s: &str, line: usize) -> Result<Frame> {
    match s.trim() {
        "contact-xyz" => Ok(Frame::ContactXyz),
        "geiges-xzw" => Ok(Frame::GeigesXzw),
        "engel-xyzw" => Ok(Frame::EngelXyzw),
        other => Err(parse_err(line, format!("unknown frame {other:?}"))),
    }
}

impl CurveSpec {
    pub fn new(family: Family, resolution: usize) -> Result<CurveSpec> {
        if resolution < MIN_RESOLUTION {
            return Err(Error::BadParameters(format!("resolution {resolution} is below {MIN_RESOLUTION}")));
        }
        Ok(CurveSpec { family, resolution })
    }

    /// Inline form used on the command line.
    pub fn parse_inline(s: &str, resolution: usize) -> Result<CurveSpec> {
        CurveSpec::new(Family::parse_inline(s, 1)?, resolution)
    }

    pub fn resolve(&self, tol: &Tolerances) -> Result<Resolved> {
        resolve_family(&self.family, self.resolution, tol)
    }
}

fn resolve_family(f: &Family, n: usize, tol: &Tolerances) -> Result<Resolved> {
    Ok(match f {
        Family::UnknotFront => Resolved::Curve(unknot_front(n)),
        Family::TorusKnot { p, q } => Resolved::Curve(torus_knot(*p, *q, n)),
        Family::StereographicTorus { p, q } => Resolved::Curve(stereographic_torus_knot(*p, *q).with_samples(n)),
        Family::FigureEight => Resolved::Curve(figure_eight(n)),
        Family::UnknotHorizontal => Resolved::Horizontal(lift_horizontal(&unknot_horizontal_geiges(n), 0.0, tol)?.curve),
        Family::AreaTwist { theta_samples } => Resolved::Loop(area_twist(*theta_samples, n)),
        Family::Stabilized { base, signs } => match resolve_family(base, n, tol)? {
            Resolved::Curve(c) => Resolved::Curve(stabilized(&c, signs)?),
            _ => return Err(Error::BadParameters("only Legendrian curves can be stabilized".into())),
        },
        Family::Table(t) => table_curve(t, n)?,
    })
}

fn spline_columns(rows: &[Vec<f64>]) -> Vec<PeriodicSpline> {
    (0..rows[0].len()).map(|k| PeriodicSpline::new(rows.iter().map(|r| r[k]).collect())).collect()
}

fn table_curve(t: &Table, n: usize) -> Result<Resolved> {
    if t.rows.len() < 4 {
        return Err(Error::BadParameters("a table needs at least 4 rows".into()));
    }
    match (t.dim(), t.frame) {
        (3, Frame::ContactXyz | Frame::GeigesXzw) => {
            let rows: Vec<Vector3<f64>> = t.rows.iter().map(|r| Vector3::new(r[0], r[1], r[2])).collect();
            Ok(Resolved::Curve(Curve3::from_table(&rows, t.frame, n)))
        }
        (4, Frame::EngelXyzw) => {
            let s = std::sync::Arc::new(spline_columns(&t.rows));
            let s2 = s.clone();
            Ok(Resolved::Horizontal(Curve4::new(
                move |x| Vector4::from_fn(|k, _| s[k].eval(x).0),
                move |x| Vector4::from_fn(|k, _| s2[k].eval(x).1),
                n,
            )))
        }
        (d, fr) => Err(Error::BadParameters(format!("{d} coordinates do not fit frame {fr}"))),
    }
}

impl FromStr for CurveSpec {
    type Err = Error;

    /// File form: `key = value` lines (`family`, `params`, `resolution`, `frame`), then for
    /// tables a `rows` line followed by `t c1 c2 c3 [c4]` rows at equispaced t.
    fn from_str(s: &str) -> Result<CurveSpec> {
        let mut family: Option<(String, usize)> = None;
        let mut params: Vec<String> = Vec::new();
        let mut resolution = DEFAULT_RESOLUTION;
        let mut frame = Frame::ContactXyz;
        let mut rows: Vec<(usize, Vec<f64>)> = Vec::new();
        let mut in_rows = false;
        for (i, raw) in s.lines().enumerate() {
            let ln = i + 1;
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            if in_rows {
                let vals = line
                    .split_whitespace()
                    .map(|v| v.parse::<f64>().map_err(|_| parse_err(ln, format!("number expected, got {v:?}"))))
                    .collect::<Result<Vec<f64>>>()?;
                rows.push((ln, vals));
                continue;
            }
            if line == "rows" {
                in_rows = true;
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(parse_err(ln, format!("expected `key = value`, got {line:?}")));
            };
            match k.trim() {
                "family" => family = Some((v.trim().to_string(), ln)),
                "params" => params = split_top(v),
                "resolution" => resolution = parse_int(v, ln)?,
                "frame" => frame = frame_from_str(v, ln)?,
                other => return Err(parse_err(ln, format!("unknown key {other:?}"))),
            }
        }
        let Some((name, ln)) = family else {
            return Err(parse_err(1, "missing `family`"));
        };
        let family = if name == "table" {
            if rows.len() < 4 {
                return Err(parse_err(ln, "a table needs at least 4 rows"));
            }
            let width = rows[0].1.len();
            let n = rows.len();
            let mut out = Vec::with_capacity(n);
            for (k, (rl, r)) in rows.into_iter().enumerate() {
                if r.len() != width || !(4..=5).contains(&width) {
                    return Err(parse_err(rl, "rows need t and 3 or 4 coordinates, all the same width"));
                }
                if (r[0] - k as f64 / n as f64).abs() > 1e-9 {
                    return Err(parse_err(rl, format!("t must be {} (equispaced on [0,1))", k as f64 / n as f64)));
                }
                out.push(r[1..].to_vec());
            }
            if width == 5 {
                frame = Frame::EngelXyzw;
            }
            Family::Table(Table { frame, rows: out })
        } else {
            if !rows.is_empty() {
                return Err(parse_err(ln, "only table curves take rows"));
            }
            Family::from_parts(&name, &params, ln)?
        };
        CurveSpec::new(family, resolution)
    }
}

impl fmt::Display for CurveSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.family {
            Family::Table(t) => {
                writeln!(f, "family = table")?;
                writeln!(f, "frame = {}", t.frame)?;
                writeln!(f, "resolution = {}", self.resolution)?;
                writeln!(f, "rows")?;
                let n = t.rows.len();
                for (k, r) in t.rows.iter().enumerate() {
                    write!(f, "{:.12}", k as f64 / n as f64)?;
                    for v in r {
                        write!(f, " {v:.17e}")?;
                    }
                    writeln!(f)?;
                }
                Ok(())
            }
            fam => {
                let s = fam.to_string();
                let (name, params) = match s.find('(') {
                    Some(i) => (&s[..i], &s[i + 1..s.len() - 1]),
                    None => (s.as_str(), ""),
                };
                writeln!(f, "family = {name}")?;
                if !params.is_empty() {
                    writeln!(f, "params = {params}")?;
                }
                writeln!(f, "resolution = {}", self.resolution)
            }
        }
    }
}

/// Table spec sampling a curve at `rows` equispaced parameters.
pub fn table_of_curve(c: &Curve3, rows: usize) -> CurveSpec {
    let rows_v = (0..rows)
        .map(|k| {
            let p = c.point(k as f64 / rows as f64);
            vec![p[0], p[1], p[2]]
        })
        .collect();
    CurveSpec { family: Family::Table(Table { frame: c.frame, rows: rows_v }), resolution: c.samples.max(MIN_RESOLUTION) }
}

pub fn table_of_curve4(c: &Curve4, rows: usize) -> CurveSpec {
    let rows_v = (0..rows)
        .map(|k| {
            let p = c.point(k as f64 / rows as f64);
            vec![p[0], p[1], p[2], p[3]]
        })
        .collect();
    CurveSpec {
        family: Family::Table(Table { frame: Frame::EngelXyzw, rows: rows_v }),
        resolution: c.samples.max(MIN_RESOLUTION),
    }
}

impl fmt::Display for FrontDiagram {
    /// `frame F`, then `cusp t left|right` and `crossing t_over t_under ± x z` lines.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "frame {}", self.frame)?;
        for c in &self.cusps {
            let k = match c.kind {
                CuspKind::Left => "left",
                CuspKind::Right => "right",
            };
            writeln!(f, "cusp {:.17e} {k}", c.t)?;
        }
        for c in &self.crossings {
            let s = if c.sign > 0 { '+' } else { '-' };
            writeln!(f, "crossing {:.17e} {:.17e} {s} {:.17e} {:.17e}", c.t_over, c.t_under, c.point[0], c.point[1])?;
        }
        Ok(())
    }
}

impl FromStr for FrontDiagram {
    type Err = Error;

    fn from_str(s: &str) -> Result<FrontDiagram> {
        let mut frame = None;
        let mut cusps = Vec::new();
        let mut crossings = Vec::new();
        for (i, raw) in s.lines().enumerate() {
            let ln = i + 1;
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            let num = |k: usize| -> Result<f64> {
                toks.get(k)
                    .ok_or_else(|| parse_err(ln, "missing field"))?
                    .parse()
                    .map_err(|_| parse_err(ln, format!("number expected at field {k}")))
            };
            match toks[0] {
                "frame" if toks.len() == 2 => frame = Some(frame_from_str(toks[1], ln)?),
                "cusp" if toks.len() == 3 => {
                    let kind = match toks[2] {
                        "left" => CuspKind::Left,
                        "right" => CuspKind::Right,
                        k => return Err(parse_err(ln, format!("cusp kind must be left or right, got {k:?}"))),
                    };
                    cusps.push(Cusp { t: num(1)?, kind });
                }
                "crossing" if toks.len() == 6 => {
                    let sign = parse_sign(toks[3], ln)?;
                    crossings.push(Crossing { t_over: num(1)?, t_under: num(2)?, sign, point: [num(4)?, num(5)?] });
                }
                _ => return Err(parse_err(ln, format!("unrecognized line {line:?}"))),
            }
        }
        let frame = frame.ok_or_else(|| parse_err(1, "missing `frame` line"))?;
        Ok(FrontDiagram { crossings, cusps, frame })
    }
}

/// Map file: either `builtin <name>`, or `nodes <n_phi> <n_theta>` followed by one `x y z`
/// row per node (φ-major, see [`sampled_s2`]). An optional `grid <n>` line sets the quadrature grid.
pub fn parse_map(text: &str) -> Result<SphereMap> {
    let mut map: Option<SphereMap> = None;
    let mut nodes: Option<(usize, usize)> = None;
    let mut grid: Option<usize> = None;
    let mut values: Vec<Vector3<f64>> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks[0] {
            "builtin" if toks.len() == 2 => map = Some(builtin_map(toks[1]).map_err(|e| parse_err(ln, e.to_string()))?),
            "nodes" if toks.len() == 3 => nodes = Some((parse_int(toks[1], ln)?, parse_int(toks[2], ln)?)),
            "grid" if toks.len() == 2 => grid = Some(parse_int(toks[1], ln)?),
            _ if toks.len() == 3 && nodes.is_some() => {
                let v: Vec<f64> = toks
                    .iter()
                    .map(|t| t.parse().map_err(|_| parse_err(ln, format!("number expected, got {t:?}"))))
                    .collect::<Result<_>>()?;
                values.push(Vector3::new(v[0], v[1], v[2]));
            }
            _ => return Err(parse_err(ln, format!("unrecognized line {line:?}"))),
        }
    }
    let m = match (map, nodes) {
        (Some(m), None) if values.is_empty() => m,
        (None, Some((a, b))) => sampled_s2(a, b, values)?,
        _ => return Err(parse_err(0, "a map file needs either a builtin line or a nodes block")),
    };
    Ok(match grid {
        Some(n) => m.with_grid(n),
        None => m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inline_families_round_trip() {
        for s in [
            "unknot_front",
            "torus_knot(2,3)",
            "stereographic_torus(5,2)",
            "figure_eight",
            "unknot_horizontal",
            "area_twist(24)",
            "stabilized(unknot_front,+,-,+)",
            "stabilized(torus_knot(2,3),-)",
        ] {
            let f = Family::parse_inline(s, 1).unwrap();
            assert_eq!(f.to_string(), s);
            let spec = CurveSpec::new(f, 1024).unwrap();
            assert_eq!(spec.to_string().parse::<CurveSpec>().unwrap(), spec);
        }
    }

    #[test]
    fn bad_specs_are_rejected() {
        assert!(Family::parse_inline("torus_knot(2,4)", 1).is_err());
        assert!(Family::parse_inline("torus_knot(2)", 1).is_err());
        assert!(Family::parse_inline("stabilized(unknot_front, x)", 1).is_err());
        assert!(Family::parse_inline("mystery", 1).is_err());
        assert!(CurveSpec::parse_inline("unknot_front", 32).is_err());
        assert!("family = unknot_front\nbogus = 1\n".parse::<CurveSpec>().is_err());
    }

    #[test]
    fn tables_round_trip_and_reproduce_the_curve() {
        let c = unknot_front(512);
        let spec = table_of_curve(&c, 256);
        let text = spec.to_string();
        let back: CurveSpec = text.parse().unwrap();
        assert_eq!(back, spec);
        let Resolved::Curve(d) = back.resolve(&Tolerances::default()).unwrap() else { panic!() };
        for k in 0..100 {
            let t = (k as f64 + 0.5) / 100.0;
            assert!((d.point(t) - c.point(t)).norm() < 1e-5);
        }
    }

    #[test]
    fn uneven_table_rows_are_rejected() {
        let text = "family = table\nrows\n0 1 0 0\n0.3 0 1 0\n0.5 -1 0 0\n0.75 0 -1 0\n";
        assert!(matches!(text.parse::<CurveSpec>(), Err(Error::Parse { line: 4, .. })));
    }

    #[test]
    fn map_files() {
        let m = parse_map("# antipodal\nbuiltin antipodal_s2\ngrid 64\n").unwrap();
        assert_eq!(m.grid, 64);
        let mut text = String::from("nodes 9 12\n");
        for i in 0..9 {
            for j in 0..12 {
                let p = crate::degree::Domain::Sphere2.embed(&[i as f64 * std::f64::consts::PI / 8.0, j as f64 / 12.0]);
                text.push_str(&format!("{} {} {}\n", p[0], p[1], p[2]));
            }
        }
        let m = parse_map(&text).unwrap();
        assert_eq!(crate::degree::degree_s2(&m).unwrap(), 1);
        assert!(parse_map("nodes 3 3\n1 0 0\n").is_err());
        assert!(matches!(parse_map("builtin nope\n"), Err(Error::Parse { line: 1, .. })));
    }
}
