//! Horizontal lifts, the area function at self-tangencies and local front modifications.

use std::sync::Arc;

use nalgebra::{Matrix2, Vector2, Vector3, Vector4};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curves::{
    find_self_intersections, geiges_project, segment_area, total_area, Curve3, Curve4, SelfIntersection,
    Tolerances,
};
use crate::error::{Error, Result};
use crate::invariants::{seg_intersection, segment_pairs};
use crate::numeric::{cutoff, gauss8, Cumulative};

/// Area function data at a double point of a Legendrian curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TangencyReport {
    pub intersection: SelfIntersection,
    pub epsilon_a: f64,
    /// (lower-branch time, upper-branch time)
    pub branch_order: (f64, f64),
    /// Orientation of (T_lower, T_upper) as a framing of the plane field.
    pub framing_sign: i8,
}

/// Parameter on the branch through `t` where the front x-coordinate equals `x`.
fn branch_at_x(c: &Curve3, t: f64, x: f64) -> Option<f64> {
    let mut tau = t + (x - c.front_x(t)) / c.tangent(t)[0];
    for _ in 0..30 {
        let f = c.front_x(tau) - x;
        let d = c.tangent(tau)[0];
        if d == 0.0 {
            return None;
        }
        let step = f / d;
        tau -= step;
        if step.abs() < 1e-15 {
            break;
        }
    }
    ((c.front_x(tau) - x).abs() < 1e-12 * (1.0 + x.abs())).then_some(tau)
}

/// ε_A at a double point: integral of z dx from the lower branch, following the orientation.
pub fn area_at_tangency(c: &Curve3, s: &SelfIntersection, tol: &Tolerances) -> Result<TangencyReport> {
    let (hi, si) = (c.frame.height_index(), c.frame.slope_index());
    let (t0, t1) = (s.t0, s.t1);
    let (d0, d1) = (c.tangent(t0), c.tangent(t1));
    if d0[0].abs() < 1e-6 * d0.norm() || d1[0].abs() < 1e-6 * d1.norm() {
        return Err(Error::DegenerateTangency { t0, t1 });
    }
    let h = 2.0 * d0[0].abs().min(d1[0].abs()) / c.samples as f64;
    let x = c.front_x(t0);
    let mean_height = |t: f64| -> Option<f64> {
        let a = branch_at_x(c, t, x + h)?;
        let b = branch_at_x(c, t, x - h)?;
        Some(0.5 * (c.point(a)[hi] + c.point(b)[hi]))
    };
    let (Some(z0), Some(z1)) = (mean_height(t0), mean_height(t1)) else {
        return Err(Error::DegenerateTangency { t0, t1 });
    };
    let scale = c.diameter();
    if (z0 - z1).abs() < 1e-13 * scale.max(1.0) {
        return Err(Error::DegenerateTangency { t0, t1 });
    }
    let (lo, up) = if z0 < z1 { (t0, t1) } else { (t1, t0) };
    let end = if up > lo { up } else { up + 1.0 };
    let epsilon_a = segment_area(c, lo, end);
    let (tl, tu) = (c.tangent(lo), c.tangent(up));
    let det = tl[0] * tu[si] - tl[si] * tu[0];
    let _ = tol;
    Ok(TangencyReport { intersection: *s, epsilon_a, branch_order: (lo, up), framing_sign: if det > 0.0 { 1 } else { -1 } })
}

/// Double points of a Legendrian curve with their area function values.
pub fn tangency_reports(c: &Curve3, tol: &Tolerances) -> Result<Vec<TangencyReport>> {
    find_self_intersections(c, tol)?.iter().map(|s| area_at_tangency(c, s, tol)).collect()
}

/// Horizontal lift with its embedding certificate.
#[derive(Debug, Clone)]
pub struct HorizontalLift {
    pub curve: Curve4,
    pub embedded: bool,
    pub tangencies: Vec<TangencyReport>,
}

fn cumulative_area(c: &Curve3, a: f64, b: f64, cells: usize) -> Cumulative {
    let hi = c.frame.height_index();
    Cumulative::new(|t| c.point(t)[hi] * c.tangent(t)[0], a, b, cells)
}

/// The unique horizontal curve over a zero-area Legendrian curve with y(0) = y0.
pub fn lift_horizontal(c: &Curve3, y0: f64, tol: &Tolerances) -> Result<HorizontalLift> {
    let area = total_area(c);
    if area.abs() >= tol.area {
        return Err(Error::AreaObstruction { area, tol: tol.area });
    }
    let tangencies = tangency_reports(c, tol)?;
    let embedded = tangencies.iter().all(|r| r.epsilon_a.abs() > tol.area);
    let curve = lift_unchecked(c, y0);
    Ok(HorizontalLift { curve, embedded, tangencies })
}

fn lift_unchecked(c: &Curve3, y0: f64) -> Curve4 {
    let (hi, si) = (c.frame.height_index(), c.frame.slope_index());
    let y = Arc::new(cumulative_area(c, 0.0, 1.0, c.samples.max(256)));
    let (e, d) = (c.eval_map(), c.deriv_map());
    let (e2, y2) = (c.eval_map(), y.clone());
    let mut out = Curve4::new(
        move |t| {
            let p = e(t);
            Vector4::new(p[0], y0 + y2.eval(t), p[hi], p[si])
        },
        move |t| {
            let p = e2(t);
            let v = d(t);
            Vector4::new(v[0], p[hi] * v[0], v[hi], v[si])
        },
        c.samples,
    );
    out.horizontal = true;
    out
}

/// Embedding certificate of the lift: every double point of `c` has nonzero area.
pub fn embedding_certificate(c: &Curve3, tol: &Tolerances) -> Result<bool> {
    Ok(tangency_reports(c, tol)?.iter().all(|r| r.epsilon_a.abs() > tol.area))
}

/// Double points of a curve in R^4 by an exhaustive pairwise scan followed by Gauss–Newton.
pub fn brute_force_double_points(c: &Curve4, tol: &Tolerances) -> Vec<(f64, f64, f64)> {
    let n = c.samples;
    let pts = c.sample_points();
    let step = (0..n).map(|i| (pts[(i + 1) % n] - pts[i]).norm()).fold(0.0, f64::max);
    let diam = {
        let mut lo = pts[0];
        let mut hi = pts[0];
        for p in &pts {
            lo = lo.inf(p);
            hi = hi.sup(p);
        }
        (hi - lo).norm()
    };
    let tol_pos = tol.pos_rel * diam;
    let min_gap = ((tol.sep_min * n as f64).ceil() as usize).max(3);
    let cands: Vec<(usize, usize, f64)> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let pts = &pts;
            (i + min_gap..n).filter_map(move |j| {
                if n - (j - i) < min_gap {
                    return None;
                }
                let d = (pts[i] - pts[j]).norm();
                (d < 2.0 * step).then_some((i, j, d))
            })
        })
        .collect();
    let mut out: Vec<(f64, f64, f64)> = Vec::new();
    for (i, j, _) in cands {
        let (mut t0, mut t1) = (i as f64 / n as f64, j as f64 / n as f64);
        for _ in 0..40 {
            let r = c.point(t0) - c.point(t1);
            let a = c.tangent(t0);
            let b = -c.tangent(t1);
            let g = Matrix2::new(a.dot(&a), a.dot(&b), a.dot(&b), b.dot(&b));
            let Some(inv) = g.try_inverse() else { break };
            let st = inv * -Vector2::new(a.dot(&r), b.dot(&r));
            let sc = if st.norm() > 0.01 { 0.01 / st.norm() } else { 1.0 };
            t0 += sc * st[0];
            t1 += sc * st[1];
            if st.norm() < 1e-15 {
                break;
            }
        }
        let res = (c.point(t0) - c.point(t1)).norm();
        let (t0, t1) = (t0.rem_euclid(1.0), t1.rem_euclid(1.0));
        let gap = (t0 - t1).rem_euclid(1.0).min((t1 - t0).rem_euclid(1.0));
        if res < tol_pos && gap > tol.sep_min {
            let key = (t0.min(t1), t0.max(t1));
            if !out.iter().any(|&(a, b, _)| (a - key.0).abs() < tol.sep_min && (b - key.1).abs() < tol.sep_min) {
                out.push((key.0, key.1, res));
            }
        }
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

/// Parameters of front crossings of the sampled polyline, both strands.
fn crossing_parameters(c: &Curve3) -> Vec<f64> {
    let n = c.samples;
    let hi = c.frame.height_index();
    let pts: Vec<Vector2<f64>> = c.sample_points().iter().map(|p| Vector2::new(p[0], p[hi])).collect();
    let mut out = Vec::new();
    for (i, j) in segment_pairs(&pts, 2) {
        if let Some((a, b)) = seg_intersection(pts[i], pts[(i + 1) % n], pts[j], pts[(j + 1) % n]) {
            out.push((i as f64 + a) / n as f64);
            out.push((j as f64 + b) / n as f64);
        }
    }
    out
}

/// Largest window [p-Δ, p+Δ] ⊂ (0,1), Δ ≤ max_half, on which the front is a graph over x
/// without crossings and with |x'| ≥ |x'(p)|/4.
pub fn regular_window(c: &Curve3, p: f64, max_half: f64) -> Result<(f64, f64)> {
    let xp = c.tangent(p)[0];
    if xp.abs() < 1e-6 * c.tangent(p).norm() {
        return Err(Error::NotRegular(format!("x' vanishes at t={p}")));
    }
    let crossings = crossing_parameters(c);
    let mut half = max_half.min(p * 0.999).min((1.0 - p) * 0.999);
    let n = c.samples;
    loop {
        if half * n as f64 * 2.0 < 16.0 {
            return Err(Error::NotRegular(format!("no regular window around t={p}")));
        }
        let a = p - half;
        let b = p + half;
        let probe = (2.0 * half * n as f64 * 4.0).ceil() as usize;
        let monotone = (0..=probe).all(|k| {
            let t = a + (b - a) * k as f64 / probe as f64;
            let d = c.tangent(t)[0];
            d * xp > 0.0 && d.abs() >= 0.25 * xp.abs()
        });
        let margin = 2.0 / n as f64;
        let clear = crossings.iter().all(|&t| t < a - margin || t > b + margin);
        if monotone && clear {
            return Ok((a, b));
        }
        half *= 0.8;
    }
}

const MODEL_CELLS: usize = 4096;
const BACKTRACK: f64 = 2.0;
const LOBE_BACKTRACK: f64 = 0.2;

/// x-profile of the models: backtracks on |v| < 0.55 so the front gains two cusps.
fn model_m(v: f64) -> (f64, f64) {
    let (chi, dchi) = cutoff(v, 0.25, 0.55);
    (v * (1.0 - BACKTRACK * chi), 1.0 - BACKTRACK * (chi + v * dchi))
}

fn bump(v: f64, c: f64, w: f64) -> (f64, f64) {
    cutoff(v - c, 0.3 * w, w)
}

type Profile = Arc<dyn Fn(f64) -> (f64, f64) + Send + Sync>;

/// A local front model in normalized flat coordinates: x = m(v), slope σ(v), height Z(v).
#[derive(Clone)]
pub(crate) struct Model {
    m: Profile,
    sigma: Profile,
    z: Arc<Cumulative>,
    /// ∫ Z dm over the model.
    area: f64,
}

fn integrate_model(f: &dyn Fn(f64) -> f64, cells: usize) -> f64 {
    (0..cells)
        .map(|k| {
            let a = -1.0 + 2.0 * k as f64 / cells as f64;
            gauss8(f, a, a + 2.0 / cells as f64)
        })
        .sum()
}

impl Model {
    /// Builds the model from a raw slope profile; a correction bump on 0.62 < v < 0.82 closes Z.
    fn new(raw: Profile) -> Model {
        Model::with_m(raw, Arc::new(model_m), MODEL_CELLS)
    }

    fn with_m(raw: Profile, m: Profile, cells: usize) -> Model {
        let raw2 = raw.clone();
        let corr = |v: f64| bump(v, 0.72, 0.1);
        let qcells = cells;
        let base = integrate_model(&|v| raw(v).0 * m(v).1, qcells);
        let c1 = integrate_model(&|v| corr(v).0 * m(v).1, qcells);
        let lam = -base / c1;
        let sigma: Profile = Arc::new(move |v| {
            let (s, ds) = raw2(v);
            let (b, db) = corr(v);
            (s + lam * b, ds + lam * db)
        });
        let (s2, m2) = (sigma.clone(), m.clone());
        let z = Arc::new(Cumulative::new(move |v| s2(v).0 * m2(v).1, -1.0, 1.0, cells));
        let (z2, m3) = (z.clone(), m.clone());
        let area = integrate_model(&|v| z2.eval(v) * m3(v).1, qcells);
        Model { m, sigma, z, area }
    }

    /// Largest |Z| on the model.
    fn z_max(&self) -> f64 {
        (0..=2048).map(|k| self.z.eval(-1.0 + k as f64 / 1024.0).abs()).fold(0.0, f64::max)
    }

    /// `n` Reidemeister-I lobes of equal area centred in |v| ≤ 1/2. Each lobe backtracks over a
    /// fixed x-width, so consecutive lobes overlap in x once n is large.
    fn lobes(n: usize) -> Model {
        let r = 0.5 / n as f64;
        let d = 1.0 + 4.0 * LOBE_BACKTRACK / r;
        let nearest = move |v: f64| -> (f64, f64) {
            let j = ((v + 0.5) / (2.0 * r) - 0.5).round().clamp(0.0, n as f64 - 1.0);
            let c = -0.5 + (2.0 * j + 1.0) * r;
            (c, (v - c) / r)
        };
        let m: Profile = Arc::new(move |v| {
            let (c, u) = nearest(v);
            let (chi, dchi) = cutoff(u, 0.25, 0.55);
            (v - d * (v - c) * chi, 1.0 - d * (chi + u * dchi))
        });
        let raw: Profile = Arc::new(move |v| {
            let (c, u) = nearest(v);
            let (chi, dchi) = cutoff(u, 0.6, 0.85);
            let amp = d - 1.0;
            (amp * (v - c) * chi, amp * (chi + u * dchi))
        });
        Model::with_m(raw, m, MODEL_CELLS.max(512 * n))
    }

    /// Zigzag: two cusps, no crossing.
    fn zigzag(orient: f64) -> Model {
        let m0 = {
            let num: f64 = (0..512)
                .map(|k| {
                    let a = -1.0 + k as f64 / 256.0;
                    gauss8(|v| v * v * cutoff(v, 0.6, 0.85).0 * model_m(v).1, a, a + 1.0 / 256.0)
                })
                .sum();
            let den: f64 = (0..512)
                .map(|k| {
                    let a = -1.0 + k as f64 / 256.0;
                    gauss8(|v| cutoff(v, 0.6, 0.85).0 * model_m(v).1, a, a + 1.0 / 256.0)
                })
                .sum();
            num / den
        };
        Model::new(Arc::new(move |v| {
            let (c, dc) = cutoff(v, 0.6, 0.85);
            (orient * (v * v - m0) * c, orient * (2.0 * v * c + (v * v - m0) * dc))
        }))
    }

    /// Mushroom family: g = 0 is a lobe with its slopes reversed; decreasing g pushes the
    /// returning strand through the incoming one once, then a crossing slides off a cusp.
    fn mushroom(g: f64) -> Model {
        Model::new(Arc::new(move |v| {
            let (c, dc) = cutoff(v, 0.6, 0.85);
            let (b, db) = bump(v, -0.15, 0.1);
            let s = -v + g * b;
            (s * c, (-1.0 + g * db) * c + s * dc)
        }))
    }
}

/// Final and tangency-instant parameters of the mushroom family.
const MUSHROOM_FINAL: f64 = -2.0;

/// Solves for the self-tangency of the mushroom family: (v_a, v_b, g) with equal x, Z, σ.
fn mushroom_tangency() -> (f64, f64, f64) {
    let resid = |va: f64, vb: f64, g: f64| -> Vector3<f64> {
        let m = Model::mushroom(g);
        Vector3::new(
            (m.m)(va).0 - (m.m)(vb).0,
            m.z.eval(va) - m.z.eval(vb),
            (m.sigma)(va).0 - (m.sigma)(vb).0,
        )
    };
    let mut u = Vector3::new(-0.217, 0.436, -1.4205);
    for _ in 0..40 {
        let r = resid(u[0], u[1], u[2]);
        let h = 1e-6;
        let mut j = nalgebra::Matrix3::zeros();
        for k in 0..3 {
            let mut e = u;
            e[k] += h;
            let mut f = u;
            f[k] -= h;
            let col = (resid(e[0], e[1], e[2]) - resid(f[0], f[1], f[2])) / (2.0 * h);
            j.set_column(k, &col);
        }
        let Some(inv) = j.try_inverse() else { break };
        let step = inv * r;
        u -= step;
        if step.norm() < 1e-13 {
            break;
        }
    }
    (u[0], u[1], u[2])
}

/// Inserts `model` scaled by `k` into the window (a, b) of `c`. Inside |v| ≤ 0.85 the new strand
/// is (x_p + L m(v), z + kL Z(v), s + k σ(v)) over the original strand; it is reparametrized back
/// to the original on 0.85 < |v| < 0.97.
fn insert(c: &Curve3, window: (f64, f64), model: &Model, k: f64) -> Curve3 {
    let (a, b) = window;
    let p = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let (xa, xb) = (c.front_x(a), c.front_x(b));
    let xp = 0.5 * (xa + xb);
    let l = 0.5 * (xb - xa);
    let (hi, si) = (c.frame.height_index(), c.frame.slope_index());
    let base = c.clone();
    let model = model.clone();
    let inv = {
        let base = base.clone();
        move |x: f64| -> f64 {
            let mut lo = a;
            let mut up = b;
            let mut t = p + (x - xp) / l * half;
            t = t.clamp(a, b);
            for _ in 0..60 {
                let f = base.front_x(t) - x;
                if (f > 0.0) == (l > 0.0) {
                    up = t;
                } else {
                    lo = t;
                }
                let d = base.tangent(t)[0];
                let mut nt = t - f / d;
                if !(nt > lo && nt < up) {
                    nt = 0.5 * (lo + up);
                }
                if (nt - t).abs() < 1e-16 {
                    t = nt;
                    break;
                }
                t = nt;
            }
            t
        }
    };
    let inv = Arc::new(inv);
    let jet = {
        let base = base.clone();
        move |t: f64| -> (Vector3<f64>, Vector3<f64>) {
            let t = t.rem_euclid(1.0);
            let v = (t - p) / half;
            if v.abs() >= 1.0 {
                return (base.point(t), base.tangent(t));
            }
            let (beta, dbeta) = cutoff(v, 0.85, 0.97);
            let (mm, dm) = (model.m)(v);
            let tx = if beta > 0.0 { inv(xp + l * mm) } else { p + half * v };
            let tau = (1.0 - beta) * (p + half * v) + beta * tx;
            let mut dtau = -dbeta * (p + half * v) + (1.0 - beta) * half + dbeta * tx;
            if beta > 0.0 {
                dtau += beta * l * dm / base.tangent(tx)[0];
            }
            let mut pt = base.point(tau);
            let mut d = base.tangent(tau) * (dtau / half);
            if v.abs() < 0.86 {
                let (s, ds) = (model.sigma)(v);
                pt[hi] += k * l * model.z.eval(v);
                pt[si] += k * s;
                d[si] += k * ds / half;
                d[hi] = pt[si] * d[0];
            }
            (pt, d)
        }
    };
    let jet = Arc::new(jet);
    let j2 = jet.clone();
    let mut out = Curve3::new(move |t| jet(t).0, move |t| j2(t).1, c.frame, c.samples);
    out.legendrian = c.legendrian;
    out
}

/// Smallest power of two giving at least `per_window` samples on a window of length `len`.
fn resolution_for(len: f64, per_window: usize, current: usize) -> usize {
    let need = (per_window as f64 / len).ceil() as usize;
    need.max(current).next_power_of_two()
}

const WINDOW_HALF: f64 = 0.15;

/// Inserts `n` Reidemeister-I lobes of front area a/n each near t = p. Returns the curve and
/// the window that was modified.
pub fn add_area_lobe_in_window(c: &Curve3, p: f64, a: f64, n: usize) -> Result<(Curve3, (f64, f64))> {
    if n == 0 {
        return Err(Error::BadParameters("lobe count must be positive".into()));
    }
    let window = regular_window(c, p, WINDOW_HALF)?;
    if a == 0.0 {
        return Ok((c.clone(), window));
    }
    let model = Model::lobes(n);
    let l = 0.5 * (c.front_x(window.1) - c.front_x(window.0));
    let k = a / (l * l * model.area);
    let samples = resolution_for((window.1 - window.0) / n as f64, 1024, c.samples);
    let out = insert(&c.clone().with_samples(samples), window, &model, k);
    Ok((out, window))
}

/// Adds front area `a` near t = p through `n` Reidemeister-I lobes of area a/n.
pub fn add_area_lobe(c: &Curve3, p: f64, a: f64, n: usize) -> Result<Curve3> {
    Ok(add_area_lobe_in_window(c, p, a, n)?.0)
}

/// Horizontal version: y past the modified window shifts by `a`.
pub fn add_area_lobe_horizontal(c: &Curve4, p: f64, a: f64, n: usize, tol: &Tolerances) -> Result<Curve4> {
    let g = geiges_project(c, tol)?;
    let (modified, window) = add_area_lobe_in_window(&g, p, a, n)?;
    Ok(relift(c, &modified, window))
}

/// Lifts a modified Geiges projection, keeping y of `orig` before the window and shifting it by
/// the added area after.
fn relift(orig: &Curve4, modified: &Curve3, window: (f64, f64)) -> Curve4 {
    let (a, b) = window;
    let cells = ((b - a) * modified.samples as f64).ceil().max(64.0) as usize;
    let cum = Arc::new(cumulative_area(modified, a, b, cells));
    let shift = cum.total() - segment_area(&geiges_project_raw(orig), a, b);
    let (o, m, cm) = (orig.clone(), modified.clone(), cum.clone());
    let (m2, o2) = (modified.clone(), orig.clone());
    let mut out = Curve4::new(
        move |t| {
            let t = t.rem_euclid(1.0);
            let g = m.point(t);
            let y = if t < a {
                o.point(t)[1]
            } else if t <= b {
                o.point(a)[1] + cm.eval(t)
            } else {
                o.point(t)[1] + shift
            };
            Vector4::new(g[0], y, g[1], g[2])
        },
        move |t| {
            let g = m2.point(t);
            let d = m2.tangent(t);
            let _ = &o2;
            Vector4::new(d[0], g[1] * d[0], d[1], d[2])
        },
        modified.samples,
    );
    out.horizontal = true;
    out
}

fn geiges_project_raw(c: &Curve4) -> Curve3 {
    crate::curves::geiges_project_unchecked(c)
}

/// Adds area `a` near p and `-a` near n.
pub fn add_area_pair(c: &Curve3, p: f64, n_pt: f64, a: f64, lobes: usize) -> Result<Curve3> {
    let wp = regular_window(c, p, WINDOW_HALF)?;
    let wn = regular_window(c, n_pt, WINDOW_HALF)?;
    if wp.0 < wn.1 && wn.0 < wp.1 {
        return Err(Error::WindowOverlap { p, n: n_pt });
    }
    let first = add_area_lobe(c, p, a, lobes)?;
    add_area_lobe(&first, n_pt, -a, lobes)
}

/// Horizontal version of [`add_area_pair`]; the result is closed again.
pub fn add_area_pair_horizontal(c: &Curve4, p: f64, n_pt: f64, a: f64, lobes: usize, tol: &Tolerances) -> Result<Curve4> {
    let g = geiges_project(c, tol)?;
    let wp = regular_window(&g, p, WINDOW_HALF)?;
    let wn = regular_window(&g, n_pt, WINDOW_HALF)?;
    if wp.0 < wn.1 && wn.0 < wp.1 {
        return Err(Error::WindowOverlap { p, n: n_pt });
    }
    let first = add_area_lobe_horizontal(c, p, a, lobes, tol)?;
    let first_g = geiges_project_raw(&first);
    let (modified, window) = add_area_lobe_in_window(&first_g, n_pt, -a, lobes)?;
    Ok(relift(&first, &modified, window))
}

/// max over the window of the vertical distance |(z, w)_new - (z, w)_orig| at equal x.
pub fn vertical_deviation(orig: &Curve3, modified: &Curve3, window: (f64, f64)) -> f64 {
    let (a, b) = window;
    let (hi, si) = (orig.frame.height_index(), orig.frame.slope_index());
    let n = ((b - a) * modified.samples as f64).ceil() as usize;
    (0..=n)
        .into_par_iter()
        .map(|k| {
            let t = a + (b - a) * k as f64 / n as f64;
            let q = modified.point(t);
            // original strand over the same x, by bisection on the monotone window
            let (mut lo, mut up) = (a, b);
            let inc = orig.front_x(b) > orig.front_x(a);
            for _ in 0..80 {
                let mid = 0.5 * (lo + up);
                if (orig.front_x(mid) < q[0]) == inc {
                    lo = mid;
                } else {
                    up = mid;
                }
            }
            let o = orig.point(0.5 * (lo + up));
            (q[hi] - o[hi]).abs().max((q[si] - o[si]).abs())
        })
        .reduce(|| 0.0, f64::max)
}

/// Chooses the zigzag orientation so that the rotation number changes by `sign`.
fn zigzag_orientation(c: &Curve3, window: (f64, f64), sign: i8) -> f64 {
    let l = c.front_x(window.1) - c.front_x(window.0);
    (sign as f64) * l.signum()
}

/// Legendrian stabilization: a zigzag with two cusps near t = p. tb drops by one and the
/// rotation number changes by `sign`.
pub fn stabilize_at(c: &Curve3, p: f64, sign: i8, half: f64) -> Result<Curve3> {
    if sign != 1 && sign != -1 {
        return Err(Error::BadParameters(format!("stabilization sign must be ±1, got {sign}")));
    }
    let window = regular_window(c, p, half)?;
    let model = Model::zigzag(zigzag_orientation(c, window, sign));
    let k = 0.05 / model.z_max();
    let samples = resolution_for(window.1 - window.0, 512, c.samples);
    Ok(insert(&c.clone().with_samples(samples), window, &model, k))
}

/// Stabilization at the regular point farthest from cusps and crossings.
pub fn stabilize(c: &Curve3, sign: i8) -> Result<Curve3> {
    let p = best_regular_point(c, &[])?;
    stabilize_at(c, p, sign, 0.08)
}

/// Regular point farthest from cusps, crossings and the `taken` windows.
pub fn best_regular_point(c: &Curve3, taken: &[(f64, f64)]) -> Result<f64> {
    let mut best: Option<(f64, f64)> = None;
    for k in 1..64 {
        let p = k as f64 / 64.0;
        if taken.iter().any(|&(a, b)| p > a - 0.02 && p < b + 0.02) {
            continue;
        }
        if let Ok((a, b)) = regular_window(c, p, 0.5) {
            let w = (p - a).min(b - p).min(taken.iter().map(|&(ta, tb)| (p - tb).abs().min((p - ta).abs())).fold(1.0, f64::min));
            if best.map_or(true, |(_, bw)| w > bw) {
                best = Some((p, w));
            }
        }
    }
    best.map(|b| b.0).ok_or_else(|| Error::NotRegular("no regular point found".into()))
}

/// Applies stabilizations of the given signs at distinct regular points.
pub fn stabilized(c: &Curve3, signs: &[i8]) -> Result<Curve3> {
    let mut out = c.clone();
    let mut taken: Vec<(f64, f64)> = Vec::new();
    for &s in signs {
        let p = best_regular_point(&out, &taken)?;
        let w = regular_window(&out, p, 0.08)?;
        let half = 0.5 * (w.1 - w.0);
        let limit = taken.iter().map(|&(a, b)| (p - b).abs().min((p - a).abs())).fold(half, f64::min);
        out = stabilize_at(&out, p, s, limit * 0.9)?;
        taken.push((p - limit, p + limit));
    }
    Ok(out)
}

/// Result of a double stabilization.
#[derive(Debug, Clone)]
pub struct DoubleStabilization {
    pub curve: Curve3,
    /// The member of the family at its self-tangency.
    pub at_tangency: Curve3,
    pub report: TangencyReport,
    pub window: (f64, f64),
}

/// Double stabilization near t = loc whose self-tangency encloses front area of modulus `a`.
pub fn double_stabilization(c: &Curve3, loc: f64, a: f64, tol: &Tolerances) -> Result<DoubleStabilization> {
    if !(a > 0.0) {
        return Err(Error::BadParameters(format!("area must be positive, got {a}")));
    }
    let window = regular_window(c, loc, WINDOW_HALF)?;
    let (va, vb, gs) = mushroom_tangency();
    let instant = Model::mushroom(gs);
    // loop area of the tangency in model units
    let loop_area: f64 = {
        let cells = 256;
        let h = (vb - va) / cells as f64;
        (0..cells)
            .map(|i| {
                let s = va + i as f64 * h;
                gauss8(|v| instant.z.eval(v) * (instant.m)(v).1, s, s + h)
            })
            .sum()
    };
    let l = 0.5 * (c.front_x(window.1) - c.front_x(window.0));
    let k = a / (l * l * loop_area.abs());
    let samples = resolution_for(window.1 - window.0, 2048, c.samples);
    let base = c.clone().with_samples(samples);
    let at_tangency = insert(&base, window, &instant, k);
    let curve = insert(&base, window, &Model::mushroom(MUSHROOM_FINAL), k);
    let g = at_tangency.to_geiges();
    let pw = |v: f64| 0.5 * (window.0 + window.1) + v * 0.5 * (window.1 - window.0);
    let (ta, tb) = (pw(va), pw(vb));
    let s = find_self_intersections(&g, tol)?
        .into_iter()
        .find(|s| (s.t0 - ta.min(tb)).abs() < 1e-3 && (s.t1 - ta.max(tb)).abs() < 1e-3)
        .ok_or_else(|| Error::NonGeneric("double stabilization tangency not resolved".into()))?;
    let report = area_at_tangency(&g, &s, tol)?;
    Ok(DoubleStabilization { curve, at_tangency, report, window })
}

/// Horizontal double stabilization: the added area is compensated by a lobe at `comp`
/// (or at an automatically chosen regular point) so that the result closes up.
pub fn double_stabilization_horizontal(
    c: &Curve4,
    loc: f64,
    a: f64,
    comp: Option<f64>,
    tol: &Tolerances,
) -> Result<(Curve4, TangencyReport)> {
    let g = geiges_project(c, tol)?;
    let ds = double_stabilization(&g, loc, a, tol)?;
    let added = total_area(&ds.curve) - total_area(&g);
    let lifted = relift(c, &ds.curve, ds.window);
    let comp = match comp {
        Some(p) => p,
        None => best_regular_point(&ds.curve, &[ds.window])?,
    };
    let lg = geiges_project_raw(&lifted);
    let (modified, window) = add_area_lobe_in_window(&lg, comp, -added, 1)?;
    if window.0 < ds.window.1 && ds.window.0 < window.1 {
        return Err(Error::WindowOverlap { p: loc, n: comp });
    }
    Ok((relift(&lifted, &modified, window), ds.report))
}

