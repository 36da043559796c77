use std::f64::consts::PI;
use std::fmt::Write;

use legendre_core::diskcalc::{CurveKind, DiskDiagram, Sign};
use legendre_core::invariants::front_diagram;
use legendre_core::{Curve3, Result, Tolerances};

const WIDTH: f64 = 800.0;
const MARGIN: f64 = 24.0;

/// Front of a Legendrian curve in (x, height). Cusps are circled and the under-strand is
/// broken at every crossing.
pub fn front_svg(c: &Curve3, tol: &Tolerances) -> Result<String> {
    let diagram = front_diagram(c, tol)?;
    let n = c.samples.clamp(1024, 8192);
    let front = |t: f64| (c.front_x(t), c.height(t));
    let pts: Vec<(f64, f64)> = (0..n).map(|k| front(k as f64 / n as f64)).collect();
    let (mut x0, mut x1, mut z0, mut z1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, z) in &pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        z0 = z0.min(z);
        z1 = z1.max(z);
    }
    let span = (x1 - x0).max(z1 - z0).max(1e-12);
    let scale = (WIDTH - 2.0 * MARGIN) / span;
    let height = (z1 - z0) * scale + 2.0 * MARGIN;
    let map = |(x, z): (f64, f64)| (MARGIN + (x - x0) * scale, height - MARGIN - (z - z0) * scale);

    let gap_len = 0.012 * span;
    let gaps: Vec<(f64, f64)> = diagram
        .crossings
        .iter()
        .map(|cr| {
            let d = c.tangent(cr.t_under);
            let speed = d[0].hypot(d[c.frame.height_index()]).max(1e-12);
            (cr.t_under, gap_len / speed)
        })
        .collect();
    let in_gap = |t: f64| {
        gaps.iter().any(|&(g, w)| {
            let d = (t - g).rem_euclid(1.0);
            d.min(1.0 - d) < w
        })
    };

    let mut svg = String::new();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH:.0}" height="{height:.0}" viewBox="0 0 {WIDTH:.0} {height:.0}" data-cusps="{}" data-crossings="{}">"#,
        diagram.cusps.len(),
        diagram.crossings.len()
    )
    .unwrap();
    let start = gaps.first().map_or(0.0, |g| g.0);
    let mut path = String::new();
    let mut last = (f64::NAN, f64::NAN);
    for k in 0..=n {
        let t = start + k as f64 / n as f64;
        if in_gap(t) {
            if !path.is_empty() {
                strand(&mut svg, &path);
                path.clear();
            }
            continue;
        }
        let (x, y) = map(front(t.rem_euclid(1.0)));
        if !path.is_empty() && (x - last.0).hypot(y - last.1) < 0.5 && k != n {
            continue;
        }
        last = (x, y);
        write!(path, "{}{x:.2},{y:.2} ", if path.is_empty() { "M" } else { "L" }).unwrap();
    }
    if !path.is_empty() {
        strand(&mut svg, &path);
    }
    for cusp in &diagram.cusps {
        let (x, y) = map(front(cusp.t));
        writeln!(svg, r#"<circle class="cusp" cx="{x:.2}" cy="{y:.2}" r="4" fill="none" stroke="blue"/>"#).unwrap();
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn strand(svg: &mut String, path: &str) {
    writeln!(svg, r#"<path class="strand" d="{}" fill="none" stroke="black" stroke-width="1.5"/>"#, path.trim_end()).unwrap();
}

/// Disk diagram: boundary circle, red strata with cusp ticks, signed boundary dots.
pub fn disk_svg(d: &DiskDiagram) -> String {
    let (size, r) = (400.0, 150.0);
    let centre = (size / 2.0, size / 2.0);
    let order = d.boundary_order();
    let m = order.len().max(1);
    let at = |k: usize, rad: f64| {
        let a = -PI / 2.0 + 2.0 * PI * k as f64 / m as f64;
        (centre.0 + rad * a.cos(), centre.1 + rad * a.sin())
    };
    let slot = |pos: usize| order.iter().position(|(p, _)| p.position == pos).unwrap_or(0);

    let mut svg = String::new();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size:.0}" height="{size:.0}" viewBox="0 0 {size:.0} {size:.0}">"#
    )
    .unwrap();
    writeln!(svg, r#"<circle class="boundary" cx="{:.2}" cy="{:.2}" r="{r:.2}" fill="none" stroke="black"/>"#, centre.0, centre.1)
        .unwrap();
    let closed: Vec<usize> = (0..d.curves.len()).filter(|&i| d.curves[i].kind == CurveKind::Closed).collect();
    for (i, c) in d.curves.iter().enumerate() {
        let marks: Vec<((f64, f64), (f64, f64))> = match (c.kind, c.endpoints) {
            (CurveKind::Arc, Some([a, b])) => {
                let p = at(slot(a.position), r);
                let q = at(slot(b.position), r);
                let ctl = (centre.0 + 0.3 * (0.5 * (p.0 + q.0) - centre.0), centre.1 + 0.3 * (0.5 * (p.1 + q.1) - centre.1));
                writeln!(
                    svg,
                    r#"<path class="stratum" d="M{:.2},{:.2} Q{:.2},{:.2} {:.2},{:.2}" fill="none" stroke="red" stroke-width="2"/>"#,
                    p.0, p.1, ctl.0, ctl.1, q.0, q.1
                )
                .unwrap();
                let bez = |s: f64| {
                    let u = 1.0 - s;
                    let pt = (u * u * p.0 + 2.0 * u * s * ctl.0 + s * s * q.0, u * u * p.1 + 2.0 * u * s * ctl.1 + s * s * q.1);
                    let dv = (2.0 * u * (ctl.0 - p.0) + 2.0 * s * (q.0 - ctl.0), 2.0 * u * (ctl.1 - p.1) + 2.0 * s * (q.1 - ctl.1));
                    (pt, dv)
                };
                (1..=c.cusps).map(|j| bez(j as f64 / (c.cusps + 1) as f64)).collect()
            }
            _ => {
                let k = closed.iter().position(|&j| j == i).unwrap_or(0);
                let ring = if closed.len() == 1 { 0.0 } else { 0.5 * r };
                let a = 2.0 * PI * k as f64 / closed.len().max(1) as f64;
                let o = (centre.0 + ring * a.cos(), centre.1 + ring * a.sin());
                let rc = 0.18 * r;
                writeln!(
                    svg,
                    r#"<circle class="stratum" cx="{:.2}" cy="{:.2}" r="{rc:.2}" fill="none" stroke="red" stroke-width="2"/>"#,
                    o.0, o.1
                )
                .unwrap();
                (0..c.cusps)
                    .map(|j| {
                        let b = 2.0 * PI * j as f64 / c.cusps as f64;
                        ((o.0 + rc * b.cos(), o.1 + rc * b.sin()), (-b.sin(), b.cos()))
                    })
                    .collect()
            }
        };
        for ((x, y), (dx, dy)) in marks {
            let l = dx.hypot(dy).max(1e-12);
            let (nx, ny) = (-dy / l * 6.0, dx / l * 6.0);
            writeln!(
                svg,
                r#"<line class="cusp" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="red" stroke-width="2"/>"#,
                x - nx,
                y - ny,
                x + nx,
                y + ny
            )
            .unwrap();
        }
    }
    for (k, (p, _)) in order.iter().enumerate() {
        let (x, y) = at(k, r);
        let (lx, ly) = at(k, r + 16.0);
        let label = if p.sign == Sign::Plus { "+" } else { "\u{2212}" };
        writeln!(svg, r#"<circle class="dot" cx="{x:.2}" cy="{y:.2}" r="4" fill="black"/>"#).unwrap();
        writeln!(
            svg,
            r#"<text x="{lx:.2}" y="{ly:.2}" font-size="16" text-anchor="middle" dominant-baseline="middle">{label}</text>"#
        )
        .unwrap();
    }
    svg.push_str("</svg>\n");
    svg
}
