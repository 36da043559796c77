//! Rotation numbers, front diagrams and the Thurston–Bennequin invariant.

use std::collections::{HashMap, HashSet};
use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{Matrix2, Vector2, Vector3};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curves::{
    find_self_intersections, geiges_project, min_nonadjacent_distance, Curve3, Curve4, CurveFamily, Frame, Tolerances,
};
use crate::error::{Error, Result};
use crate::numeric::winding;

/// Components of a plane-field vector in the frame {∂_slope, ∂_x + slope ∂_height}.
fn frame_components(frame: Frame, v: &Vector3<f64>) -> (f64, f64) {
    (v[frame.slope_index()], v[0])
}

/// Rotation number of a Legendrian curve: winding of its derivative in the plane-field frame.
pub fn rotation_number(c: &Curve3, tol: &Tolerances) -> Result<i64> {
    winding(|t| frame_components(c.frame, &c.tangent(t)), c.samples, tol.deriv)
        .map_err(|t| Error::DerivTooSmall { t })
}

/// Rotation number of a loop of Legendrian curves: winding of θ ↦ (γ^θ)'(0).
pub fn loop_rotation_number(f: &CurveFamily<Curve3>, tol: &Tolerances) -> Result<i64> {
    let frame = f.at(0.0).frame;
    winding(|th| frame_components(frame, &f.at(th).tangent(0.0)), f.theta_samples, tol.deriv)
        .map_err(|t| Error::DerivTooSmall { t })
}

/// Rotation number of a loop of formal Legendrians: winding of θ ↦ F_1^θ(0).
pub fn loop_rotation_number_formal<F>(f1_at_base: F, frame: Frame, theta_samples: usize, tol: &Tolerances) -> Result<i64>
where
    F: Fn(f64) -> Vector3<f64>,
{
    winding(|th| frame_components(frame, &f1_at_base(th)), theta_samples, tol.deriv)
        .map_err(|t| Error::DerivTooSmall { t })
}

/// Rotation number of a horizontal curve, read off its Geiges projection.
pub fn horizontal_rotation_number(c: &Curve4, tol: &Tolerances) -> Result<i64> {
    rotation_number(&geiges_project(c, tol)?, tol)
}

pub type Framing = Arc<dyn Fn(f64, f64) -> Vector3<f64> + Send + Sync>;

/// A curve with a homotopy of nonvanishing vector fields from its derivative into the plane field.
#[derive(Clone)]
pub struct FormalLegendrian {
    pub curve: Curve3,
    pub framing: Framing,
}

impl FormalLegendrian {
    pub fn new<F>(curve: Curve3, framing: F) -> Self
    where
        F: Fn(f64, f64) -> Vector3<f64> + Send + Sync + 'static,
    {
        FormalLegendrian { curve, framing: Arc::new(framing) }
    }

    /// The tautological formal structure of a Legendrian curve, F_s = γ'.
    pub fn tautological(curve: Curve3) -> Self {
        let c = curve.clone();
        FormalLegendrian::new(curve, move |_, t| c.tangent(t))
    }

    pub fn validate(&self, tol: &Tolerances) -> Result<()> {
        let c = &self.curve;
        let (hi, si) = (c.frame.height_index(), c.frame.slope_index());
        for t in c.grid() {
            let d = ((self.framing)(0.0, t) - c.tangent(t)).norm();
            if d > tol.leg {
                return Err(Error::BadParameters(format!("F_0 differs from the derivative by {d:.3e} at t={t}")));
            }
            let f1 = (self.framing)(1.0, t);
            let r = (f1[hi] - c.point(t)[si] * f1[0]).abs();
            if r > tol.leg {
                return Err(Error::LegendrianViolation { residual: r, tol: tol.leg });
            }
            for k in 0..=16 {
                if (self.framing)(k as f64 / 16.0, t).norm() <= tol.deriv {
                    return Err(Error::DerivTooSmall { t });
                }
            }
        }
        Ok(())
    }

    /// Winding of F_1 in the plane-field frame.
    pub fn rotation_number(&self, tol: &Tolerances) -> Result<i64> {
        let frame = self.curve.frame;
        winding(|t| frame_components(frame, &(self.framing)(1.0, t)), self.curve.samples, tol.deriv)
            .map_err(|t| Error::DerivTooSmall { t })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CuspKind {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cusp {
    pub t: f64,
    pub kind: CuspKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub t_over: f64,
    pub t_under: f64,
    pub sign: i8,
    pub point: [f64; 2],
}

/// Crossings and cusps of a front projection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontDiagram {
    pub crossings: Vec<Crossing>,
    pub cusps: Vec<Cusp>,
    pub frame: Frame,
}

impl FrontDiagram {
    pub fn writhe(&self) -> i64 {
        self.crossings.iter().map(|c| c.sign as i64).sum()
    }
}

pub(crate) fn seg_intersection(p0: Vector2<f64>, p1: Vector2<f64>, q0: Vector2<f64>, q1: Vector2<f64>) -> Option<(f64, f64)> {
    let r = p1 - p0;
    let s = q1 - q0;
    let den = r.perp(&s);
    if den == 0.0 {
        return None;
    }
    let qp = q0 - p0;
    let a = qp.perp(&s) / den;
    let b = qp.perp(&r) / den;
    if (0.0..=1.0).contains(&a) && (0.0..=1.0).contains(&b) {
        Some((a, b))
    } else {
        None
    }
}

/// Candidate pairs of non-adjacent polyline segments whose bounding boxes share a grid cell.
pub(crate) fn segment_pairs(pts: &[Vector2<f64>], min_gap: usize) -> Vec<(usize, usize)> {
    let n = pts.len();
    let cell = (0..n).map(|i| (pts[(i + 1) % n] - pts[i]).norm()).fold(0.0, f64::max).max(1e-300);
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for i in 0..n {
        let (a, b) = (pts[i], pts[(i + 1) % n]);
        let (x0, x1) = ((a.x.min(b.x) / cell).floor() as i64, (a.x.max(b.x) / cell).floor() as i64);
        let (y0, y1) = ((a.y.min(b.y) / cell).floor() as i64, (a.y.max(b.y) / cell).floor() as i64);
        for gx in x0..=x1 {
            for gy in y0..=y1 {
                grid.entry((gx, gy)).or_default().push(i);
            }
        }
    }
    let mut seen = HashSet::new();
    let mut keys: Vec<_> = grid.keys().copied().collect();
    keys.sort_unstable();
    for key in keys {
        let v = &grid[&key];
        for (a, &i) in v.iter().enumerate() {
            for &j in &v[a + 1..] {
                let (i, j) = (i.min(j), i.max(j));
                let gap = (j - i).min(n - (j - i));
                if gap >= min_gap {
                    seen.insert((i, j));
                }
            }
        }
    }
    let mut out: Vec<_> = seen.into_iter().collect();
    out.sort_unstable();
    out
}

/// Newton refinement of a planar crossing P(t0) = P(t1) of the front.
fn refine_crossing(c: &Curve3, mut t0: f64, mut t1: f64) -> Option<(f64, f64)> {
    let hi = c.frame.height_index();
    let pp = |t: f64| {
        let p = c.point(t);
        Vector2::new(p[0], p[hi])
    };
    let dp = |t: f64| {
        let d = c.tangent(t);
        Vector2::new(d[0], d[hi])
    };
    for _ in 0..50 {
        let f = pp(t0) - pp(t1);
        let (a, b) = (dp(t0), -dp(t1));
        let m = Matrix2::new(a.x, b.x, a.y, b.y);
        let step = m.try_inverse()? * (-f);
        let s = step.norm();
        let scale = if s > 0.005 { 0.005 / s } else { 1.0 };
        t0 += scale * step[0];
        t1 += scale * step[1];
        if s < 1e-15 {
            break;
        }
    }
    Some((t0.rem_euclid(1.0), t1.rem_euclid(1.0)))
}

fn cyclic_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

/// Front diagram of a Legendrian curve. The larger-slope strand passes under; the sign is the
/// orientation of (over tangent, under tangent) in the (x, height) plane.
pub fn front_diagram(c: &Curve3, tol: &Tolerances) -> Result<FrontDiagram> {
    let n = c.samples;
    let (hi, si) = (c.frame.height_index(), c.frame.slope_index());
    let scale = c.diameter().max(1e-300);
    if let Some(s) = find_self_intersections(c, tol)?.first() {
        return Err(Error::NonGeneric(format!("front self-tangency at t = {:.6}, {:.6}", s.t0, s.t1)));
    }
    let pts: Vec<Vector2<f64>> = c.sample_points().iter().map(|p| Vector2::new(p[0], p[hi])).collect();
    let mut crossings: Vec<Crossing> = Vec::new();
    let mut found: Vec<(f64, f64)> = Vec::new();
    for (i, j) in segment_pairs(&pts, 2) {
        let Some((a, b)) = seg_intersection(pts[i], pts[(i + 1) % n], pts[j], pts[(j + 1) % n]) else {
            continue;
        };
        let s0 = (i as f64 + a) / n as f64;
        let s1 = (j as f64 + b) / n as f64;
        let Some((t0, t1)) = refine_crossing(c, s0, s1) else {
            return Err(Error::NonGeneric(format!("crossing near t={s0:.6} does not refine")));
        };
        let (p0, p1) = (c.point(t0), c.point(t1));
        let gap2 = ((p0[0] - p1[0]).powi(2) + (p0[hi] - p1[hi]).powi(2)).sqrt();
        if gap2 > tol.pos_rel * scale * 10.0 || cyclic_gap(t0, t1) < tol.sep_min {
            return Err(Error::NonGeneric(format!("crossing near t={s0:.6} is not transverse in the front")));
        }
        let key = (t0.min(t1), t0.max(t1));
        if found.iter().any(|&(u, v)| cyclic_gap(u, key.0) < tol.sep_min && cyclic_gap(v, key.1) < tol.sep_min) {
            continue;
        }
        let (d0, d1) = (c.tangent(t0), c.tangent(t1));
        for (t, d) in [(t0, d0), (t1, d1)] {
            if d[0].abs() < 1e-4 * d.norm() {
                return Err(Error::NonGeneric(format!("crossing at a cusp near t={t:.6}")));
            }
        }
        let (m0, m1) = (p0[si], p1[si]);
        if (m0 - m1).abs() < 1e-6 * (1.0 + m0.abs().max(m1.abs())) {
            return Err(Error::NonGeneric(format!("front tangency at t={:.6}, {:.6}", key.0, key.1)));
        }
        for q in &crossings {
            let dq = ((q.point[0] - p0[0]).powi(2) + (q.point[1] - p0[hi]).powi(2)).sqrt();
            if dq < tol.pos_rel * scale * 100.0 {
                return Err(Error::NonGeneric(format!("triple point near ({:.6}, {:.6})", p0[0], p0[hi])));
            }
        }
        found.push(key);
        let (t_over, t_under, dover, dunder) = if m0 < m1 { (t0, t1, d0, d1) } else { (t1, t0, d1, d0) };
        let cross = dover[0] * dunder[hi] - dover[hi] * dunder[0];
        crossings.push(Crossing {
            t_over,
            t_under,
            sign: if cross > 0.0 { 1 } else { -1 },
            point: [p0[0], p0[hi]],
        });
    }
    crossings.sort_by(|a, b| a.t_over.min(a.t_under).total_cmp(&b.t_over.min(b.t_under)));
    let cusps: Vec<Cusp> = c
        .cusp_parameters()
        .into_iter()
        .map(|t| {
            let h = 0.25 / n as f64;
            let after = c.tangent(t + h)[0];
            Cusp { t, kind: if after > 0.0 { CuspKind::Left } else { CuspKind::Right } }
        })
        .collect();
    if cusps.len() % 2 != 0 {
        return Err(Error::NonGeneric(format!("odd cusp count {}", cusps.len())));
    }
    Ok(FrontDiagram { crossings, cusps, frame: c.frame })
}

/// Thurston–Bennequin invariant writhe − cusps/2.
pub fn thurston_bennequin(d: &FrontDiagram) -> i64 {
    d.writhe() - d.cusps.len() as i64 / 2
}

/// Signed solid-angle contribution of segment pair (a0a1, b0b1) to the Gauss linking integral.
fn segment_linking(a0: &Vector3<f64>, a1: &Vector3<f64>, b0: &Vector3<f64>, b1: &Vector3<f64>) -> f64 {
    let r13 = b0 - a0;
    let r14 = b1 - a0;
    let r23 = b0 - a1;
    let r24 = b1 - a1;
    let unit = |v: Vector3<f64>| {
        let n = v.norm();
        if n > 0.0 {
            v / n
        } else {
            v
        }
    };
    let n1 = unit(r13.cross(&r14));
    let n2 = unit(r14.cross(&r24));
    let n3 = unit(r24.cross(&r23));
    let n4 = unit(r23.cross(&r13));
    let asin = |x: f64| x.clamp(-1.0, 1.0).asin();
    let omega = asin(n1.dot(&n2)) + asin(n2.dot(&n3)) + asin(n3.dot(&n4)) + asin(n4.dot(&n1));
    let r34 = b1 - b0;
    let r12 = a1 - a0;
    let s = r34.cross(&r12).dot(&r13);
    omega * s.signum() / (4.0 * PI)
}

/// Exact linking number of two closed polygons.
pub fn polygon_linking(a: &[Vector3<f64>], b: &[Vector3<f64>]) -> f64 {
    let (na, nb) = (a.len(), b.len());
    (0..na)
        .into_par_iter()
        .map(|i| {
            let (a0, a1) = (&a[i], &a[(i + 1) % na]);
            (0..nb).map(|j| segment_linking(a0, a1, &b[j], &b[(j + 1) % nb])).sum::<f64>()
        })
        .collect::<Vec<f64>>()
        .iter()
        .sum()
}

/// Linking number of two closed polygons as the signed count of crossings where `a` passes over
/// `b` in a generic projection. Agrees with [`polygon_linking`] and runs in near linear time.
pub fn projected_linking(a: &[Vector3<f64>], b: &[Vector3<f64>]) -> i64 {
    let d = Vector3::new(0.2113, 0.0837, 0.9738).normalize();
    let e1 = Vector3::new(1.0, 0.0, 0.0).cross(&d).normalize();
    let e2 = d.cross(&e1);
    let flat = |v: &[Vector3<f64>]| -> Vec<(Vector2<f64>, f64)> {
        v.iter().map(|p| (Vector2::new(p.dot(&e1), p.dot(&e2)), p.dot(&d))).collect()
    };
    let (fa, fb) = (flat(a), flat(b));
    let (na, nb) = (fa.len(), fb.len());
    let seg = |f: &[(Vector2<f64>, f64)], i: usize| (f[i], f[(i + 1) % f.len()]);
    let (mut lo, mut hi) = (Vector2::repeat(f64::INFINITY), Vector2::repeat(f64::NEG_INFINITY));
    let mut total_len = 0.0;
    for j in 0..nb {
        let ((p, _), (q, _)) = seg(&fb, j);
        lo = lo.inf(&p);
        hi = hi.sup(&p);
        total_len += (q - p).norm();
    }
    let extent = (hi - lo).max().max(1e-12);
    let cell = (2.0 * total_len / nb as f64).max(extent / 4096.0);
    let key = |v: f64| (v / cell).floor() as i64;
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for j in 0..nb {
        let ((p, _), (q, _)) = seg(&fb, j);
        for x in key(p.x.min(q.x))..=key(p.x.max(q.x)) {
            for y in key(p.y.min(q.y))..=key(p.y.max(q.y)) {
                grid.entry((x, y)).or_default().push(j);
            }
        }
    }
    (0..na)
        .into_par_iter()
        .map(|i| {
            let ((p, hp), (p1, hp1)) = seg(&fa, i);
            let r = p1 - p;
            let mut seen = HashSet::new();
            let mut sum = 0i64;
            for x in key(p.x.min(p1.x))..=key(p.x.max(p1.x)) {
                for y in key(p.y.min(p1.y))..=key(p.y.max(p1.y)) {
                    for &j in grid.get(&(x, y)).into_iter().flatten() {
                        if !seen.insert(j) {
                            continue;
                        }
                        let ((q, hq), (q1, hq1)) = seg(&fb, j);
                        let w = q1 - q;
                        let den = r.perp(&w);
                        if den.abs() < 1e-300 {
                            continue;
                        }
                        let s = (q - p).perp(&w) / den;
                        let u = (q - p).perp(&r) / den;
                        if !(0.0..1.0).contains(&s) || !(0.0..1.0).contains(&u) {
                            continue;
                        }
                        let over = hp + s * (hp1 - hp) > hq + u * (hq1 - hq);
                        if over {
                            sum += if den > 0.0 { 1 } else { -1 };
                        }
                    }
                }
            }
            sum
        })
        .sum()
}

/// tb as the linking number of the curve with its Reeb push-off.
pub fn tb_linking_oracle(c: &Curve3) -> Result<i64> {
    let c = c.to_contact();
    let pts = c.sample_points();
    let d = min_nonadjacent_distance(&pts, 3);
    let step = (0..pts.len()).map(|i| (pts[(i + 1) % pts.len()] - pts[i]).norm()).fold(0.0, f64::max);
    let eps = 0.5 * d;
    if !(eps > 1e-12) || eps < 0.01 * step {
        return Err(Error::PushoffCollision);
    }
    let push: Vec<Vector3<f64>> = pts.iter().map(|p| p + Vector3::new(0.0, 0.0, eps)).collect();
    Ok(projected_linking(&pts, &push))
}

/// tb + rot is odd.
pub fn parity_check(c: &Curve3, tol: &Tolerances) -> Result<bool> {
    let tb = thurston_bennequin(&front_diagram(c, tol)?);
    let rot = rotation_number(c, tol)?;
    Ok((tb + rot).rem_euclid(2) == 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::{figure_eight, torus_knot, unknot_front};

    #[test]
    fn projected_linking_matches_gauss_sum() {
        let circle = |c: Vector3<f64>, u: Vector3<f64>, v: Vector3<f64>, n: usize| -> Vec<Vector3<f64>> {
            (0..n).map(|k| {
                let a = 2.0 * PI * k as f64 / n as f64;
                c + u * a.cos() + v * a.sin()
            })
            .collect()
        };
        let (x, y, z) = (Vector3::x(), Vector3::y(), Vector3::z());
        let a = circle(Vector3::zeros(), x, y, 200);
        let hopf = circle(x, x, z, 180);
        let hopf_rev = circle(x, z, x, 180);
        let far = circle(3.0 * x, x, z, 150);
        for (p, q) in [(&a, &hopf), (&a, &hopf_rev), (&a, &far), (&hopf, &a)] {
            assert_eq!(projected_linking(p, q) as f64, polygon_linking(p, q).round());
        }
        for c in [torus_knot(2, 3, 1024).to_contact(), unknot_front(512).to_contact()] {
            let pts = c.sample_points();
            let push: Vec<_> = pts.iter().map(|p| p + Vector3::new(0.0, 0.0, 1e-3)).collect();
            assert_eq!(projected_linking(&pts, &push) as f64, polygon_linking(&pts, &push).round());
        }
    }

    fn synthetic(k: f64) -> Curve3 {
        Curve3::new(
            move |t| Vector3::new((2.0 * PI * t).cos(), 0.0, (2.0 * PI * t).sin()),
            move |t| Vector3::new((2.0 * PI * k * t).sin(), (2.0 * PI * k * t).cos(), 0.0),
            Frame::ContactXyz,
            256,
        )
    }

    #[test]
    fn synthetic_rotation() {
        let tol = Tolerances::default();
        for k in -3..=3 {
            assert_eq!(rotation_number(&synthetic(k as f64), &tol).unwrap(), k);
        }
    }

    #[test]
    fn unknot_invariants() {
        let tol = Tolerances::default();
        let c = unknot_front(2048);
        let d = front_diagram(&c, &tol).unwrap();
        assert_eq!(d.cusps.len(), 2);
        assert!(d.crossings.is_empty());
        assert_eq!(thurston_bennequin(&d), -1);
        assert_eq!(tb_linking_oracle(&c).unwrap(), -1);
        assert_eq!(rotation_number(&c, &tol).unwrap(), 0);
        assert!(parity_check(&c, &tol).unwrap());
    }

    #[test]
    fn mirrored_unknot_keeps_tb() {
        let c = unknot_front(2048).map_linear(nalgebra::Matrix3::new(1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, -1.0));
        assert_eq!(tb_linking_oracle(&c).unwrap(), -1);
        assert_eq!(thurston_bennequin(&front_diagram(&c, &Tolerances::default()).unwrap()), -1);
    }

    #[test]
    fn trefoil_front() {
        let tol = Tolerances::default();
        let c = torus_knot(2, 3, 4096);
        let d = front_diagram(&c, &tol).unwrap();
        let tb = thurston_bennequin(&d);
        assert_eq!(tb, tb_linking_oracle(&c).unwrap());
        assert_eq!(tb, 1);
        assert!(parity_check(&c, &tol).unwrap());
    }

    #[test]
    fn figure_eight_front_is_not_generic() {
        let err = front_diagram(&figure_eight(2048), &Tolerances::default());
        assert!(matches!(err, Err(Error::NonGeneric(_))));
    }
}
