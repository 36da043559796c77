//! Mapping degrees of sphere maps and the obstruction sphere of torus-knot loops.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector, Quaternion, Rotation3, UnitQuaternion, Vector3, Vector4};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curves::{Curve3, Frame};
use crate::error::{Error, Result};
use crate::numeric::{gcd, winding};

const FD_STEP: f64 = 1e-6;
const DEFECT_TOL: f64 = 0.05;
const REFINEMENTS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    /// t in [0,1)
    Circle,
    /// (φ, θ) in [0,π] × [0,1)
    Sphere2,
    /// (φ, θ, t) in [0,π] × [0,1) × [0,1)
    Sphere2xCircle,
    /// (χ, φ, θ) in [0,π] × [0,π] × [0,1)
    Sphere3,
}

impl Domain {
    pub fn dim(self) -> usize {
        match self {
            Domain::Circle => 1,
            Domain::Sphere2 => 2,
            Domain::Sphere2xCircle | Domain::Sphere3 => 3,
        }
    }

    pub fn target_dim(self) -> usize {
        self.dim() + 1
    }

    /// Length of each parameter axis.
    pub fn extents(self) -> Vec<f64> {
        match self {
            Domain::Circle => vec![1.0],
            Domain::Sphere2 => vec![PI, 1.0],
            Domain::Sphere2xCircle => vec![PI, 1.0, 1.0],
            Domain::Sphere3 => vec![PI, PI, 1.0],
        }
    }

    /// The point of the domain manifold with parameters `p`.
    pub fn embed(self, p: &[f64]) -> Vec<f64> {
        let tau = 2.0 * PI;
        match self {
            Domain::Circle => vec![(tau * p[0]).cos(), (tau * p[0]).sin()],
            Domain::Sphere2 => {
                let (sp, cp) = p[0].sin_cos();
                vec![sp * (tau * p[1]).cos(), sp * (tau * p[1]).sin(), cp]
            }
            Domain::Sphere2xCircle => {
                let (sp, cp) = p[0].sin_cos();
                vec![
                    sp * (tau * p[1]).cos(),
                    sp * (tau * p[1]).sin(),
                    cp,
                    (tau * p[2]).cos(),
                    (tau * p[2]).sin(),
                ]
            }
            Domain::Sphere3 => {
                let (sc, cc) = p[0].sin_cos();
                let (sp, cp) = p[1].sin_cos();
                vec![cc, sc * cp, sc * sp * (tau * p[2]).cos(), sc * sp * (tau * p[2]).sin()]
            }
        }
    }

    /// Volume density of the parametrization at `p`.
    pub fn chart_volume(self, p: &[f64]) -> f64 {
        let tau = 2.0 * PI;
        match self {
            Domain::Circle => tau,
            Domain::Sphere2 => tau * p[0].sin(),
            Domain::Sphere2xCircle => tau * tau * p[0].sin(),
            Domain::Sphere3 => tau * p[0].sin().powi(2) * p[1].sin(),
        }
    }

    /// Total volume of the target sphere.
    pub fn target_volume(self) -> f64 {
        match self {
            Domain::Circle => 2.0 * PI,
            Domain::Sphere2 => 4.0 * PI,
            Domain::Sphere2xCircle | Domain::Sphere3 => 2.0 * PI * PI,
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Domain::Circle => "circle",
            Domain::Sphere2 => "sphere2",
            Domain::Sphere2xCircle => "sphere2xcircle",
            Domain::Sphere3 => "sphere3",
        })
    }
}

type MapFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// A map from a sphere (or S²×S¹) parameter box to a unit sphere.
#[derive(Clone)]
pub struct SphereMap {
    pub domain: Domain,
    pub grid: usize,
    f: MapFn,
}

impl fmt::Debug for SphereMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SphereMap").field("domain", &self.domain).field("grid", &self.grid).finish()
    }
}

fn normalize(mut v: Vec<f64>) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    for x in &mut v {
        *x /= n;
    }
    v
}

impl SphereMap {
    /// Map given in parameter coordinates; outputs are normalized.
    pub fn new<F>(domain: Domain, grid: usize, f: F) -> Self
    where
        F: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        SphereMap { domain, grid, f: Arc::new(f) }
    }

    /// Map given on points of the domain manifold.
    pub fn on_points<F>(domain: Domain, grid: usize, f: F) -> Self
    where
        F: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        SphereMap::new(domain, grid, move |p| f(&domain.embed(p)))
    }

    pub fn with_grid(mut self, grid: usize) -> Self {
        self.grid = grid;
        self
    }

    pub fn eval(&self, p: &[f64]) -> Vec<f64> {
        normalize((self.f)(p))
    }

    /// Central difference along parameter `axis`.
    pub fn partial(&self, p: &[f64], axis: usize) -> Vec<f64> {
        let h = FD_STEP * self.domain.extents()[axis];
        let mut a = p.to_vec();
        let mut b = p.to_vec();
        a[axis] += h;
        b[axis] -= h;
        let fa = self.eval(&a);
        let fb = self.eval(&b);
        fa.iter().zip(&fb).map(|(x, y)| (x - y) / (2.0 * h)).collect()
    }

    /// Compose with a map of the target sphere.
    pub fn then<G>(&self, g: G) -> SphereMap
    where
        G: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        let f = self.f.clone();
        SphereMap::new(self.domain, self.grid, move |p| g(&normalize(f(p))))
    }

    /// Largest deviation of |eval| from 1 on a coarse grid.
    pub fn norm_defect(&self) -> f64 {
        grid_points(self.domain, self.grid.min(32))
            .iter()
            .map(|p| {
                let n = self.eval(p).iter().map(|x| x * x).sum::<f64>().sqrt();
                if n.is_finite() { (n - 1.0).abs() } else { 1.0 }
            })
            .fold(0.0, f64::max)
    }

    fn integrand(&self, p: &[f64]) -> f64 {
        let d = self.domain.dim();
        let mut m = DMatrix::<f64>::zeros(d + 1, d + 1);
        m.set_column(0, &DVector::from_vec(self.eval(p)));
        for k in 0..d {
            m.set_column(k + 1, &DVector::from_vec(self.partial(p, k)));
        }
        m.determinant()
    }
}

/// Cell midpoints of a uniform grid with `n` cells per axis.
fn grid_points(domain: Domain, n: usize) -> Vec<Vec<f64>> {
    let ext = domain.extents();
    let d = ext.len();
    let total = n.pow(d as u32);
    (0..total)
        .map(|mut idx| {
            let mut p = vec![0.0; d];
            for k in (0..d).rev() {
                p[k] = (idx % n) as f64 + 0.5;
                p[k] *= ext[k] / n as f64;
                idx /= n;
            }
            p
        })
        .collect()
}

/// Result of a degree quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegreeEstimate {
    pub degree: i64,
    pub raw: f64,
    pub defect: f64,
    pub grid: usize,
}

/// Raw degree integral at `n` cells per axis.
pub fn degree_integral(f: &SphereMap, n: usize) -> f64 {
    let ext = f.domain.extents();
    let cell: f64 = ext.iter().map(|e| e / n as f64).product();
    let d = f.domain.dim();
    let total = n.pow(d as u32);
    let cells: Vec<f64> = (0..total)
        .into_par_iter()
        .map(|mut idx| {
            let mut p = [0.0; 3];
            for k in (0..d).rev() {
                p[k] = ((idx % n) as f64 + 0.5) * ext[k] / n as f64;
                idx /= n;
            }
            f.integrand(&p[..d])
        })
        .collect();
    let sum: f64 = cells.iter().sum();
    sum * cell / f.domain.target_volume()
}

fn estimate(f: &SphereMap) -> Result<DegreeEstimate> {
    let mut n = f.grid;
    let mut raw = 0.0;
    for _ in 0..=REFINEMENTS {
        raw = degree_integral(f, n);
        let defect = (raw - raw.round()).abs();
        if defect < DEFECT_TOL {
            return Ok(DegreeEstimate { degree: raw.round() as i64, raw, defect, grid: n });
        }
        n *= 2;
    }
    Err(Error::NotConverged { raw, grid: n / 2 })
}

/// Degree of a map S² → S² by the area-form integral, with the estimate kept.
pub fn degree_s2_estimate(f: &SphereMap) -> Result<DegreeEstimate> {
    if f.domain != Domain::Sphere2 {
        return Err(Error::BadParameters(format!("degree_s2 needs a sphere2 domain, got {}", f.domain)));
    }
    estimate(f)
}

pub fn degree_s2(f: &SphereMap) -> Result<i64> {
    degree_s2_estimate(f).map(|e| e.degree)
}

/// Degree of a map from S³ or S²×S¹ to S³ by the volume-form integral.
pub fn degree_3_to_s3_estimate(f: &SphereMap) -> Result<DegreeEstimate> {
    if f.domain.dim() != 3 {
        return Err(Error::BadParameters(format!("degree_3_to_s3 needs a 3-dimensional domain, got {}", f.domain)));
    }
    estimate(f)
}

pub fn degree_3_to_s3(f: &SphereMap) -> Result<i64> {
    degree_3_to_s3_estimate(f).map(|e| e.degree)
}

/// Winding number of a circle map into ℝ² \ 0.
pub fn winding_number(f: &SphereMap) -> Result<i64> {
    if f.domain != Domain::Circle {
        return Err(Error::BadParameters(format!("winding_number needs a circle domain, got {}", f.domain)));
    }
    let n = f.grid.max(16);
    winding(
        |t| {
            let v = (f.f)(&[t]);
            (v[0], v[1])
        },
        n,
        1e-12,
    )
    .map_err(|_| Error::ResolutionExhausted(n))
}

fn oracle_grid(domain: Domain, grid: usize) -> usize {
    match domain.dim() {
        1 => grid.max(256),
        2 => grid.clamp(32, 96),
        _ => grid.clamp(12, 24),
    }
}

fn neighbours(idx: usize, n: usize, d: usize) -> Vec<usize> {
    let mut coords = vec![0; d];
    let mut r = idx;
    for k in (0..d).rev() {
        coords[k] = r % n;
        r /= n;
    }
    let mut out = Vec::new();
    for k in 0..d {
        for delta in [n - 1, 1] {
            let mut c = coords.clone();
            c[k] = (c[k] + delta) % n;
            out.push(c.iter().fold(0, |acc, &x| acc * n + x));
        }
    }
    out
}

/// Gauss–Newton with backtracking on |f(p) − q|² from `p`; returns the converged parameter.
fn newton(f: &SphereMap, q: &[f64], mut p: Vec<f64>) -> Option<Vec<f64>> {
    let d = f.domain.dim();
    let ext = f.domain.extents();
    let resid = |p: &[f64]| -> f64 { f.eval(p).iter().zip(q).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt() };
    let mut res = resid(&p);
    for _ in 0..100 {
        if res < 1e-12 {
            break;
        }
        let v = f.eval(&p);
        let r = DVector::from_iterator(d + 1, v.iter().zip(q).map(|(a, b)| a - b));
        let mut j = DMatrix::<f64>::zeros(d + 1, d);
        for k in 0..d {
            j.set_column(k, &DVector::from_vec(f.partial(&p, k)));
        }
        let jt = j.transpose();
        let step = (&jt * &j).try_inverse()? * (jt * r);
        let mut scale = (0.2 / step.norm()).min(1.0);
        let mut moved = false;
        for _ in 0..30 {
            let trial: Vec<f64> = (0..d).map(|k| p[k] - scale * step[k]).collect();
            let inside = (0..d).all(|k| ext[k] == 1.0 || (0.0..=ext[k]).contains(&trial[k]));
            let tr = if inside { resid(&trial) } else { f64::INFINITY };
            if tr < res {
                p = trial;
                res = tr;
                moved = true;
                break;
            }
            scale *= 0.5;
        }
        if !moved {
            break;
        }
    }
    for k in 0..d {
        if ext[k] == 1.0 {
            p[k] = p[k].rem_euclid(1.0);
        }
    }
    (res < 1e-9).then_some(p)
}

pub fn preimages(f: &SphereMap, q: &[f64], n: usize) -> Vec<Vec<f64>> {
    let domain = f.domain;
    let d = domain.dim();
    let pts = grid_points(domain, n);
    let vals: Vec<Vec<f64>> = pts.par_iter().map(|p| f.eval(p)).collect();
    let gap = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    // seed wherever q may lie in the image of a cell: within the spread of the neighbouring values
    let seeds: Vec<usize> = (0..pts.len())
        .into_par_iter()
        .filter(|&i| {
            let dist = gap(&vals[i], q);
            let nb = neighbours(i, n, d);
            let spread = nb.iter().map(|&j| gap(&vals[i], &vals[j])).fold(0.0, f64::max);
            dist <= 1.5 * spread || nb.iter().all(|&j| dist <= gap(&vals[j], q)) && dist < 0.75
        })
        .collect();
    let roots: Vec<Vec<f64>> = seeds.par_iter().filter_map(|&i| newton(f, q, pts[i].clone())).collect();
    let mut found: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
    for p in roots {
        let x = domain.embed(&p);
        let dup = found.iter().any(|(y, _)| x.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt() < 1e-6);
        if !dup {
            found.push((x, p));
        }
    }
    found.into_iter().map(|(_, p)| p).collect()
}

/// Signed count of preimages of `q`, located by multistart Newton from the grid.
///
/// The seed grid is doubled until two consecutive grids locate the same number of preimages.
pub fn degree_regular_value(f: &SphereMap, q: &[f64]) -> Result<i64> {
    let domain = f.domain;
    let d = domain.dim();
    if q.len() != d + 1 {
        return Err(Error::BadParameters(format!("target point needs {} coordinates", d + 1)));
    }
    let q = normalize(q.to_vec());
    let mut n = oracle_grid(domain, f.grid);
    let mut found = preimages(f, &q, n);
    for _ in 0..REFINEMENTS {
        n *= 2;
        let next = preimages(f, &q, n);
        let stable = next.len() == found.len();
        found = next;
        if stable {
            break;
        }
    }
    let mut total = 0;
    for p in &found {
        let vol = domain.chart_volume(p);
        let jac = if vol.abs() < 1e-8 { 0.0 } else { f.integrand(p) / vol };
        if jac.abs() < 1e-6 {
            return Err(Error::NotRegularValue { jac });
        }
        total += jac.signum() as i64;
    }
    Ok(total)
}

/// Quaternionic structure on ℂ² = ℝ⁴, (z₁, z₂) ↔ x₁ + i y₁ + j x₂ + k y₂.
pub fn quat_i(z: &Vector4<f64>) -> Vector4<f64> {
    Vector4::new(-z[1], z[0], -z[3], z[2])
}

pub fn quat_j(z: &Vector4<f64>) -> Vector4<f64> {
    Vector4::new(-z[2], z[3], z[0], -z[1])
}

pub fn quat_k(z: &Vector4<f64>) -> Vector4<f64> {
    Vector4::new(-z[3], -z[2], z[1], z[0])
}

/// The loop θ ↦ diag(e^{2πimθ}, e^{2πinθ})·(e^{2πipt}, e^{2πiqt}) with its formal framing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KalmanLoop {
    pub p: i64,
    pub q: i64,
    pub m: i64,
    pub n: i64,
}

impl KalmanLoop {
    pub fn point(&self, theta: f64, t: f64) -> Vector4<f64> {
        let a = 2.0 * PI * (self.m as f64 * theta + self.p as f64 * t);
        let b = 2.0 * PI * (self.n as f64 * theta + self.q as f64 * t);
        Vector4::new(a.cos(), a.sin(), b.cos(), b.sin())
    }

    /// ∂_t of the curve at (θ, t).
    pub fn tangent(&self, theta: f64, t: f64) -> Vector4<f64> {
        let z = self.point(theta, t);
        let tau = 2.0 * PI;
        Vector4::new(
            -tau * self.p as f64 * z[1],
            tau * self.p as f64 * z[0],
            -tau * self.q as f64 * z[3],
            tau * self.q as f64 * z[2],
        )
    }

    /// F_s = s·jγ + (1 − s)·γ'.
    pub fn framing(&self, theta: f64, t: f64, s: f64) -> Vector4<f64> {
        s * quat_j(&self.point(theta, t)) + (1.0 - s) * self.tangent(theta, t)
    }

    /// Smallest |F_s| over a grid in (θ, t, s).
    pub fn min_framing_norm(&self, samples: usize) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..samples {
            for j in 0..samples {
                for k in 0..=8 {
                    let v = self.framing(i as f64 / samples as f64, j as f64 / samples as f64, k as f64 / 8.0);
                    best = best.min(v.norm());
                }
            }
        }
        best
    }

    /// Winding of the ξ-component of F_s(t) in the frame (jγ, kγ) as θ runs once around.
    pub fn framing_rotation(&self, t: f64, s: f64) -> Result<i64> {
        winding(
            |theta| {
                let z = self.point(theta, t);
                let f = self.framing(theta, t, s);
                (f.dot(&quat_j(&z)), f.dot(&quat_k(&z)))
            },
            512,
            1e-9,
        )
        .map_err(|_| Error::ResolutionExhausted(512))
    }

    /// The curve at θ, sampled at `samples` parameters.
    pub fn curve(&self, theta: f64, samples: usize) -> Vec<Vector4<f64>> {
        (0..samples).map(|i| self.point(theta, i as f64 / samples as f64)).collect()
    }
}

pub fn kalman_loop(p: i64, q: i64, m: i64, n: i64) -> Result<KalmanLoop> {
    if gcd(p, q) != 1 {
        return Err(Error::BadParameters(format!("gcd({p}, {q}) ≠ 1")));
    }
    if m % 2 != 0 || n % 2 != 0 {
        return Err(Error::BadParameters(format!("(m, n) = ({m}, {n}) must be even")));
    }
    let l = KalmanLoop { p, q, m, n };
    if l.min_framing_norm(32) < 1e-9 {
        return Err(Error::BadParameters("formal framing vanishes".into()));
    }
    Ok(l)
}

fn torus_point(p: f64, q: f64, t: f64) -> Vector3<f64> {
    let tau = 2.0 * PI;
    let r = (tau * q * t).cos() + 2.0;
    Vector3::new(r * (tau * p * t).cos(), r * (tau * p * t).sin(), -(tau * q * t).sin())
}

fn torus_tangent(p: f64, q: f64, t: f64) -> Vector3<f64> {
    let tau = 2.0 * PI;
    let r = (tau * q * t).cos() + 2.0;
    let dr = -tau * q * (tau * q * t).sin();
    let (s, c) = (tau * p * t).sin_cos();
    Vector3::new(dr * c - r * tau * p * s, dr * s + r * tau * p * c, -tau * q * (tau * q * t).cos())
}

/// The (p, q) torus knot on the standard torus of radii 2 and 1 in ℝ³.
pub fn stereographic_torus_knot(p: i64, q: i64) -> Curve3 {
    let (pf, qf) = (p as f64, q as f64);
    let samples = (256 * (p.unsigned_abs() + q.unsigned_abs()).max(1)) as usize;
    Curve3::new(move |t| torus_point(pf, qf, t), move |t| torus_tangent(pf, qf, t), Frame::ContactXyz, samples)
}

/// Capping disk of the loop B_θ = rotation by 4παθ about the z-axis.
///
/// In unit quaternions (1, k, i) the disk is a pencil of circles through 1 tangent to k:
/// the circle at radius r is traversed α times and degenerates to 1 at the centre.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RotationPath {
    pub alpha: u32,
}

impl RotationPath {
    /// Unit quaternion at polar disk coordinates (r, θ).
    pub fn quaternion(&self, r: f64, theta: f64) -> UnitQuaternion<f64> {
        let psi = 0.5 * PI * r.clamp(0.0, 1.0);
        let (s, c) = psi.sin_cos();
        let (st, ct) = (2.0 * PI * self.alpha as f64 * theta).sin_cos();
        let a = c * c + s * s * ct;
        let b = s * st;
        let ci = c * s - s * c * ct;
        UnitQuaternion::from_quaternion(Quaternion::new(a, ci, 0.0, b))
    }

    pub fn rotation(&self, r: f64, theta: f64) -> Rotation3<f64> {
        self.quaternion(r, theta).to_rotation_matrix()
    }

    /// Axis·angle point in the radius-π ball model of ℝP³ at z = (x, y).
    pub fn eval(&self, x: f64, y: f64) -> Vector3<f64> {
        let r = x.hypot(y);
        let theta = y.atan2(x).rem_euclid(2.0 * PI) / (2.0 * PI);
        self.quaternion(r, theta).scaled_axis()
    }

    /// The boundary loop B_θ.
    pub fn boundary(&self, theta: f64) -> Rotation3<f64> {
        Rotation3::from_axis_angle(&Vector3::z_axis(), 4.0 * PI * self.alpha as f64 * theta)
    }
}

pub fn kalman_capping_disk(alpha: u32) -> RotationPath {
    RotationPath { alpha: alpha.max(1) }
}

/// The obstruction sphere H_{t₀}: capping disk on the upper hemisphere, interpolation
/// from (γ^θ)'(t₀) to ∂_y on the lower one.
pub fn kalman_obstruction_sphere(p: i64, q: i64, alpha: u32, t0: f64) -> Result<SphereMap> {
    if gcd(p, q) != 1 {
        return Err(Error::BadParameters(format!("gcd({p}, {q}) ≠ 1")));
    }
    if alpha == 0 {
        return Err(Error::BadParameters("alpha must be at least 1".into()));
    }
    let v = torus_tangent(p as f64, q as f64, t0).normalize();
    // B_θ v sweeps the latitude of v; it meets -∂_y only on the equator
    if v[2].abs() < 1e-3 {
        return Err(Error::InterpolationDegenerate { t0 });
    }
    let disk = kalman_capping_disk(alpha);
    let ey = Vector3::y();
    Ok(SphereMap::new(Domain::Sphere2, 256, move |x| {
        let (phi, theta) = (x[0], x[1]);
        let u = if phi <= 0.5 * PI {
            disk.rotation(phi / (0.5 * PI), theta) * v
        } else {
            let s = (phi - 0.5 * PI) / (0.5 * PI);
            s * ey + (1.0 - s) * (disk.boundary(theta) * v)
        };
        vec![u[0], u[1], u[2]]
    }))
}

/// Unit tangent of the stereographic torus knot at t₀, the vector rotated by the capping disk.
pub fn obstruction_tangent(p: i64, q: i64, t0: f64) -> Vector3<f64> {
    torus_tangent(p as f64, q as f64, t0).normalize()
}

fn stereo_to_c(x: &[f64]) -> (f64, f64, bool) {
    let d = 1.0 - x[2];
    if d < 1e-300 {
        (0.0, 0.0, true)
    } else {
        (x[0] / d, x[1] / d, false)
    }
}

fn c_to_sphere(re: f64, im: f64) -> Vec<f64> {
    let n2 = re * re + im * im;
    if !n2.is_finite() {
        return vec![0.0, 0.0, 1.0];
    }
    vec![2.0 * re / (n2 + 1.0), 2.0 * im / (n2 + 1.0), (n2 - 1.0) / (n2 + 1.0)]
}

/// Rational map of the Riemann sphere given by polynomial coefficients (low to high), conjugating z if asked.
fn rational(coeffs: Vec<(f64, f64)>, conj: bool) -> impl Fn(&[f64]) -> Vec<f64> + Send + Sync {
    move |x| {
        let (re, im, inf) = stereo_to_c(x);
        if inf {
            return vec![0.0, 0.0, 1.0];
        }
        let im = if conj { -im } else { im };
        let (mut a, mut b) = (0.0, 0.0);
        for &(cr, ci) in coeffs.iter().rev() {
            let (na, nb) = (a * re - b * im + cr, a * im + b * re + ci);
            a = na;
            b = nb;
        }
        c_to_sphere(a, b)
    }
}

/// Default base point of the obstruction sphere.
pub const KALMAN_T0: f64 = 0.0;

/// Builtin maps by name; see `builtin_names`.
pub fn builtin_map(spec: &str) -> Result<SphereMap> {
    let spec = spec.trim();
    let (name, args) = match spec.find('(') {
        Some(i) if spec.ends_with(')') => (&spec[..i], &spec[i + 1..spec.len() - 1]),
        _ => (spec, ""),
    };
    let nums: Vec<f64> = if args.trim().is_empty() {
        Vec::new()
    } else {
        args.split(',')
            .map(|a| a.trim().parse::<f64>().map_err(|_| Error::BadParameters(format!("bad argument {a:?}"))))
            .collect::<Result<_>>()?
    };
    let int_arg = |i: usize, default: i64| -> Result<i64> {
        match nums.get(i) {
            None => Ok(default),
            Some(x) if x.fract() == 0.0 => Ok(*x as i64),
            Some(x) => Err(Error::BadParameters(format!("{name}: integer expected, got {x}"))),
        }
    };
    let m = match name {
        "identity_circle" => SphereMap::on_points(Domain::Circle, 256, |x| x.to_vec()),
        "power_circle" => {
            let k = int_arg(0, 2)? as f64;
            SphereMap::new(Domain::Circle, 256, move |p| {
                vec![(2.0 * PI * k * p[0]).cos(), (2.0 * PI * k * p[0]).sin()]
            })
        }
        "identity_s2" => SphereMap::on_points(Domain::Sphere2, 256, |x| x.to_vec()),
        "antipodal_s2" => SphereMap::on_points(Domain::Sphere2, 256, |x| x.iter().map(|a| -a).collect()),
        "reflect_s2" => SphereMap::on_points(Domain::Sphere2, 256, |x| vec![x[0], x[1], -x[2]]),
        "rotate_s2" => SphereMap::on_points(Domain::Sphere2, 256, |x| {
            let r = Rotation3::from_axis_angle(&nalgebra::Unit::new_normalize(Vector3::new(1.0, 2.0, -0.5)), 1.1)
                * Vector3::new(x[0], x[1], x[2]);
            vec![r[0], r[1], r[2]]
        }),
        "wobble_s2" => SphereMap::on_points(Domain::Sphere2, 256, |x| {
            vec![x[0] + 0.3 * (3.0 * x[1]).sin(), x[1] + 0.3 * (2.0 * x[2]).cos() * x[0], x[2] + 0.2 * x[0] * x[1]]
        }),
        "suspension" => {
            let k = int_arg(0, 2)? as f64;
            SphereMap::new(Domain::Sphere2, 256, move |p| Domain::Sphere2.embed(&[p[0], k * p[1]]))
        }
        "rational_square" => SphereMap::on_points(Domain::Sphere2, 256, rational(vec![(0.0, 0.0), (0.0, 0.0), (1.0, 0.0)], false)),
        "rational_cubic" => SphereMap::on_points(
            Domain::Sphere2,
            256,
            rational(vec![(0.2, -0.1), (0.3, 0.0), (0.0, 0.0), (1.0, 0.0)], false),
        ),
        "conj_square" => SphereMap::on_points(Domain::Sphere2, 256, rational(vec![(0.0, 0.0), (0.0, 0.0), (1.0, 0.0)], true)),
        "fold_s2" => SphereMap::on_points(Domain::Sphere2, 256, |x| vec![x[0], x[1], x[2] * x[2] - 0.3]),
        "constant_s2" => SphereMap::new(Domain::Sphere2, 256, |_| vec![0.0, 0.0, 1.0]),
        "antipodal_s3" => SphereMap::on_points(Domain::Sphere3, 64, |x| x.iter().map(|a| -a).collect()),
        "identity_s3" => SphereMap::on_points(Domain::Sphere3, 64, |x| x.to_vec()),
        "square_s3" => SphereMap::on_points(Domain::Sphere3, 64, |x| {
            vec![x[0] * x[0] - x[1] * x[1], 2.0 * x[0] * x[1], x[2], x[3]]
        }),
        "constant_s2xs1" => SphereMap::on_points(Domain::Sphere2xCircle, 64, |x| vec![x[0], x[1], x[2], 0.0]),
        "kalman" => {
            let p = int_arg(0, 5)?;
            let q = int_arg(1, 2)?;
            let alpha = int_arg(2, 1)?;
            let t0 = nums.get(3).copied().unwrap_or(KALMAN_T0);
            if alpha < 1 {
                return Err(Error::BadParameters("alpha must be at least 1".into()));
            }
            kalman_obstruction_sphere(p, q, alpha as u32, t0)?
        }
        _ => return Err(Error::BadParameters(format!("unknown map {name:?}"))),
    };
    Ok(m)
}

pub fn builtin_names() -> &'static [&'static str] {
    &[
        "identity_circle",
        "power_circle(k)",
        "identity_s2",
        "antipodal_s2",
        "reflect_s2",
        "rotate_s2",
        "wobble_s2",
        "suspension(k)",
        "rational_square",
        "rational_cubic",
        "conj_square",
        "fold_s2",
        "constant_s2",
        "identity_s3",
        "antipodal_s3",
        "square_s3",
        "constant_s2xs1",
        "kalman(p,q,alpha,t0)",
    ]
}

/// Map S² → S² sampled on a (φ, θ) node grid, bilinearly interpolated.
///
/// Nodes are φ = iπ/(n_phi − 1), θ = j/n_theta, stored row-major in i.
pub fn sampled_s2(n_phi: usize, n_theta: usize, values: Vec<Vector3<f64>>) -> Result<SphereMap> {
    if n_phi < 2 || n_theta < 3 || values.len() != n_phi * n_theta {
        return Err(Error::BadParameters(format!(
            "sampled map needs {n_phi}×{n_theta} values, got {}",
            values.len()
        )));
    }
    let values = Arc::new(values);
    Ok(SphereMap::new(Domain::Sphere2, 256, move |p| {
        let u = (p[0] / PI).clamp(0.0, 1.0) * (n_phi - 1) as f64;
        let v = p[1].rem_euclid(1.0) * n_theta as f64;
        let (i, j) = ((u.floor() as usize).min(n_phi - 2), v.floor() as usize % n_theta);
        let (a, b) = (u - i as f64, v - v.floor());
        let j1 = (j + 1) % n_theta;
        let at = |i: usize, j: usize| values[i * n_theta + j];
        let w = at(i, j) * (1.0 - a) * (1.0 - b) + at(i + 1, j) * a * (1.0 - b) + at(i, j1) * (1.0 - a) * b + at(i + 1, j1) * a * b;
        vec![w[0], w[1], w[2]]
    }))
}
