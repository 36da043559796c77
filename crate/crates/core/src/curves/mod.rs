//! Closed parametrized curves in contact R^3 and Engel R^4.

mod builtin;
mod intersect;

pub use builtin::*;
pub use intersect::{find_self_intersections, find_self_intersections_brute, min_nonadjacent_distance};

use std::fmt;
use std::sync::Arc;

use nalgebra::{Vector3, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{bisect, central_diff4, gauss8, periodic_trapezoid, PeriodicSpline};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Frame {
    /// ker(dz - y dx) on (x, y, z)
    ContactXyz,
    /// ker(dz - w dx) on (x, z, w)
    GeigesXzw,
    /// ker(dy - z dx) ∩ ker(dz - w dx) on (x, y, z, w)
    EngelXyzw,
}

impl Frame {
    /// Coordinate index of the front height in a 3-dimensional frame.
    pub fn height_index(self) -> usize {
        match self {
            Frame::ContactXyz => 2,
            Frame::GeigesXzw => 1,
            Frame::EngelXyzw => panic!("Engel frame has no front height index"),
        }
    }

    /// Coordinate index of the slope coordinate in a 3-dimensional frame.
    pub fn slope_index(self) -> usize {
        match self {
            Frame::ContactXyz => 1,
            Frame::GeigesXzw => 2,
            Frame::EngelXyzw => panic!("Engel frame has no slope index"),
        }
    }
}

impl fmt::Display for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Frame::ContactXyz => "contact-xyz",
            Frame::GeigesXzw => "geiges-xzw",
            Frame::EngelXyzw => "engel-xyzw",
        };
        f.write_str(s)
    }
}

/// Numerical thresholds. Positional tolerance is relative to the curve diameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub pos_rel: f64,
    pub leg: f64,
    pub deriv: f64,
    pub sep_min: f64,
    pub area: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { pos_rel: 1e-7, leg: 1e-6, deriv: 1e-8, sep_min: 1e-3, area: 1e-7 }
    }
}

pub type Map3 = Arc<dyn Fn(f64) -> Vector3<f64> + Send + Sync>;
pub type Map4 = Arc<dyn Fn(f64) -> Vector4<f64> + Send + Sync>;

/// Closed curve t in [0,1) -> R^3 with its derivative.
#[derive(Clone)]
pub struct Curve3 {
    eval: Map3,
    deriv: Map3,
    pub frame: Frame,
    pub samples: usize,
    pub legendrian: bool,
}

impl fmt::Debug for Curve3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Curve3")
            .field("frame", &self.frame)
            .field("samples", &self.samples)
            .field("legendrian", &self.legendrian)
            .finish()
    }
}

impl Curve3 {
    pub fn new<E, D>(eval: E, deriv: D, frame: Frame, samples: usize) -> Self
    where
        E: Fn(f64) -> Vector3<f64> + Send + Sync + 'static,
        D: Fn(f64) -> Vector3<f64> + Send + Sync + 'static,
    {
        assert!(frame != Frame::EngelXyzw, "Curve3 lives in a 3-dimensional frame");
        Curve3 { eval: Arc::new(eval), deriv: Arc::new(deriv), frame, samples, legendrian: false }
    }

    /// Curve whose derivative is obtained by fourth-order central differences.
    pub fn from_eval<E>(eval: E, frame: Frame, samples: usize) -> Self
    where
        E: Fn(f64) -> Vector3<f64> + Send + Sync + 'static,
    {
        let eval: Map3 = Arc::new(eval);
        let e2 = eval.clone();
        let h = 1e-4;
        let deriv = move |t: f64| {
            Vector3::from_fn(|k, _| central_diff4(|s| e2(s)[k], t, h))
        };
        Curve3 { eval, deriv: Arc::new(deriv), frame, samples, legendrian: false }
    }

    /// Periodic cubic-spline interpolant of equispaced samples on [0,1).
    pub fn from_table(rows: &[Vector3<f64>], frame: Frame, samples: usize) -> Self {
        let splines: Vec<PeriodicSpline> =
            (0..3).map(|k| PeriodicSpline::new(rows.iter().map(|r| r[k]).collect())).collect();
        let s1 = Arc::new(splines);
        let s2 = s1.clone();
        Curve3::new(
            move |t| Vector3::new(s1[0].eval(t).0, s1[1].eval(t).0, s1[2].eval(t).0),
            move |t| Vector3::new(s2[0].eval(t).1, s2[1].eval(t).1, s2[2].eval(t).1),
            frame,
            samples,
        )
    }

    pub fn with_samples(mut self, n: usize) -> Self {
        self.samples = n;
        self
    }

    pub fn flagged_legendrian(mut self) -> Self {
        self.legendrian = true;
        self
    }

    pub fn point(&self, t: f64) -> Vector3<f64> {
        (self.eval)(t.rem_euclid(1.0))
    }

    pub fn tangent(&self, t: f64) -> Vector3<f64> {
        (self.deriv)(t.rem_euclid(1.0))
    }

    pub fn eval_map(&self) -> Map3 {
        self.eval.clone()
    }

    pub fn deriv_map(&self) -> Map3 {
        self.deriv.clone()
    }

    pub fn front_x(&self, t: f64) -> f64 {
        self.point(t)[0]
    }

    pub fn height(&self, t: f64) -> f64 {
        self.point(t)[self.frame.height_index()]
    }

    pub fn slope(&self, t: f64) -> f64 {
        self.point(t)[self.frame.slope_index()]
    }

    /// Parameter values of the sample grid.
    pub fn grid(&self) -> impl Iterator<Item = f64> + '_ {
        let n = self.samples;
        (0..n).map(move |i| i as f64 / n as f64)
    }

    pub fn sample_points(&self) -> Vec<Vector3<f64>> {
        self.grid().map(|t| self.point(t)).collect()
    }

    pub fn diameter(&self) -> f64 {
        let pts = self.sample_points();
        let mut lo = pts[0];
        let mut hi = pts[0];
        for p in &pts {
            lo = lo.inf(p);
            hi = hi.sup(p);
        }
        (hi - lo).norm()
    }

    /// Absolute positional tolerance for this curve.
    pub fn tol_pos(&self, tol: &Tolerances) -> f64 {
        tol.pos_rel * self.diameter().max(1e-300)
    }

    /// max |h' - s x'| over the sample grid.
    pub fn legendrian_residual(&self) -> f64 {
        let (hi, si) = (self.frame.height_index(), self.frame.slope_index());
        self.grid()
            .map(|t| {
                let p = self.point(t);
                let d = self.tangent(t);
                (d[hi] - p[si] * d[0]).abs()
            })
            .fold(0.0, f64::max)
    }

    pub fn min_speed(&self) -> f64 {
        self.grid().map(|t| self.tangent(t).norm()).fold(f64::INFINITY, f64::min)
    }

    /// Checks closure, immersion and (if flagged) the Legendrian condition.
    pub fn validate(&self, tol: &Tolerances) -> Result<()> {
        let gap = (self.point(1.0 - 1e-12) - self.point(0.0)).norm();
        if gap > self.tol_pos(tol).max(1e-9) {
            return Err(Error::NonGeneric(format!("curve not closed: gap {gap:.3e}")));
        }
        let speed = self.min_speed();
        if speed <= tol.deriv {
            return Err(Error::NonGeneric(format!("curve not immersed: speed {speed:.3e}")));
        }
        if self.legendrian {
            let r = self.legendrian_residual();
            if r > tol.leg {
                return Err(Error::LegendrianViolation { residual: r, tol: tol.leg });
            }
        }
        Ok(())
    }

    fn swap_yz(&self, frame: Frame) -> Curve3 {
        let e = self.eval.clone();
        let d = self.deriv.clone();
        let mut c = Curve3::new(
            move |t| {
                let p = e(t);
                Vector3::new(p[0], p[2], p[1])
            },
            move |t| {
                let p = d(t);
                Vector3::new(p[0], p[2], p[1])
            },
            frame,
            self.samples,
        );
        c.legendrian = self.legendrian;
        c
    }

    /// Rewrites a Geiges curve (x,z,w) as the contact curve (x, y=w, z); identity on contact curves.
    pub fn to_contact(&self) -> Curve3 {
        match self.frame {
            Frame::ContactXyz => self.clone(),
            _ => self.swap_yz(Frame::ContactXyz),
        }
    }

    /// Inverse of [`Curve3::to_contact`].
    pub fn to_geiges(&self) -> Curve3 {
        match self.frame {
            Frame::GeigesXzw => self.clone(),
            _ => self.swap_yz(Frame::GeigesXzw),
        }
    }

    /// Applies a linear map of coordinates to positions and derivatives.
    pub fn map_linear(&self, m: nalgebra::Matrix3<f64>) -> Curve3 {
        let e = self.eval.clone();
        let d = self.deriv.clone();
        let mut c = Curve3::new(move |t| m * e(t), move |t| m * d(t), self.frame, self.samples);
        c.legendrian = self.legendrian;
        c
    }

    /// Orientation-preserving reparametrization t -> phi(t) with phi' > 0 and phi(t+1) = phi(t)+1.
    pub fn reparametrize<P, Q>(&self, phi: P, dphi: Q) -> Curve3
    where
        P: Fn(f64) -> f64 + Send + Sync + Clone + 'static,
        Q: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let e = self.eval.clone();
        let d = self.deriv.clone();
        let phi2 = phi.clone();
        let mut c = Curve3::new(
            move |t| e(phi(t).rem_euclid(1.0)),
            move |t| d(phi2(t).rem_euclid(1.0)) * dphi(t),
            self.frame,
            self.samples,
        );
        c.legendrian = self.legendrian;
        c
    }

    /// Parameters in [0,1) where the front x-coordinate has a critical point.
    pub fn cusp_parameters(&self) -> Vec<f64> {
        let n = self.samples;
        let xd = |t: f64| self.tangent(t)[0];
        let vals: Vec<f64> = (0..n).map(|i| xd(i as f64 / n as f64)).collect();
        let mut out = Vec::new();
        for i in 0..n {
            let (a, b) = (vals[i], vals[(i + 1) % n]);
            if a == 0.0 {
                out.push(i as f64 / n as f64);
            } else if a * b < 0.0 {
                let t0 = i as f64 / n as f64;
                out.push(bisect(xd, t0, t0 + 1.0 / n as f64, 1e-14).rem_euclid(1.0));
            }
        }
        out
    }
}

/// Closed curve t -> R^4 in Engel coordinates (x, y, z, w).
#[derive(Clone)]
pub struct Curve4 {
    eval: Map4,
    deriv: Map4,
    pub samples: usize,
    pub horizontal: bool,
}

impl fmt::Debug for Curve4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Curve4")
            .field("samples", &self.samples)
            .field("horizontal", &self.horizontal)
            .finish()
    }
}

impl Curve4 {
    pub fn new<E, D>(eval: E, deriv: D, samples: usize) -> Self
    where
        E: Fn(f64) -> Vector4<f64> + Send + Sync + 'static,
        D: Fn(f64) -> Vector4<f64> + Send + Sync + 'static,
    {
        Curve4 { eval: Arc::new(eval), deriv: Arc::new(deriv), samples, horizontal: false }
    }

    pub fn frame(&self) -> Frame {
        Frame::EngelXyzw
    }

    pub fn point(&self, t: f64) -> Vector4<f64> {
        (self.eval)(t.rem_euclid(1.0))
    }

    /// Evaluation without wrapping the parameter; used for curves that are not closed.
    pub fn point_raw(&self, t: f64) -> Vector4<f64> {
        (self.eval)(t)
    }

    pub fn tangent(&self, t: f64) -> Vector4<f64> {
        (self.deriv)(t.rem_euclid(1.0))
    }

    pub fn eval_map(&self) -> Map4 {
        self.eval.clone()
    }

    pub fn deriv_map(&self) -> Map4 {
        self.deriv.clone()
    }

    pub fn with_samples(mut self, n: usize) -> Self {
        self.samples = n;
        self
    }

    pub fn sample_points(&self) -> Vec<Vector4<f64>> {
        let n = self.samples;
        (0..n).map(|i| self.point(i as f64 / n as f64)).collect()
    }

    /// max over samples of max(|y' - z x'|, |z' - w x'|).
    pub fn horizontal_residual(&self) -> f64 {
        let n = self.samples;
        (0..n)
            .map(|i| {
                let t = i as f64 / n as f64;
                let p = self.point(t);
                let d = self.tangent(t);
                (d[1] - p[2] * d[0]).abs().max((d[2] - p[3] * d[0]).abs())
            })
            .fold(0.0, f64::max)
    }

    pub fn check_horizontal(&self, tol: &Tolerances) -> Result<f64> {
        let r = self.horizontal_residual();
        if r > tol.leg {
            return Err(Error::HorizontalViolation { residual: r, tol: tol.leg });
        }
        Ok(r)
    }

    /// Translate in the y direction.
    pub fn translate_y(&self, dy: f64) -> Curve4 {
        let e = self.eval.clone();
        Curve4 {
            eval: Arc::new(move |t| e(t) + Vector4::new(0.0, dy, 0.0, 0.0)),
            deriv: self.deriv.clone(),
            samples: self.samples,
            horizontal: self.horizontal,
        }
    }
}

/// One-parameter family of curves theta in [0,1) -> C.
#[derive(Clone)]
pub struct CurveFamily<C> {
    slice: Arc<dyn Fn(f64) -> C + Send + Sync>,
    pub theta_samples: usize,
}

impl<C> CurveFamily<C> {
    pub fn new<F>(slice: F, theta_samples: usize) -> Self
    where
        F: Fn(f64) -> C + Send + Sync + 'static,
    {
        CurveFamily { slice: Arc::new(slice), theta_samples }
    }

    pub fn at(&self, theta: f64) -> C {
        (self.slice)(theta.rem_euclid(1.0))
    }

    pub fn thetas(&self) -> impl Iterator<Item = f64> {
        let m = self.theta_samples;
        (0..m).map(move |i| i as f64 / m as f64)
    }
}

impl CurveFamily<Curve3> {
    /// Largest sample-to-sample sup distance between consecutive slices.
    pub fn max_step(&self) -> f64 {
        let m = self.theta_samples;
        let mut worst = 0.0f64;
        for i in 0..m {
            let a = self.at(i as f64 / m as f64);
            let b = self.at((i + 1) as f64 / m as f64);
            for t in a.grid() {
                worst = worst.max((a.point(t) - b.point(t)).norm());
            }
        }
        worst
    }
}

/// A resolved double point of a curve in R^3.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelfIntersection {
    pub t0: f64,
    pub t1: f64,
    pub point: [f64; 3],
    pub residual: f64,
}

/// Planar (x, z) trace of a curve together with its cusp parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct FrontTrace {
    pub points: Vec<(f64, f64)>,
    pub cusps: Vec<f64>,
}

/// (x, y, z, w) -> (x, z, w) for a horizontal curve.
pub fn geiges_project(c: &Curve4, tol: &Tolerances) -> Result<Curve3> {
    c.check_horizontal(tol)?;
    Ok(geiges_project_unchecked(c))
}

pub(crate) fn geiges_project_unchecked(c: &Curve4) -> Curve3 {
    let e = c.eval_map();
    let d = c.deriv_map();
    let mut out = Curve3::new(
        move |t| {
            let p = e(t);
            Vector3::new(p[0], p[2], p[3])
        },
        move |t| {
            let p = d(t);
            Vector3::new(p[0], p[2], p[3])
        },
        Frame::GeigesXzw,
        c.samples,
    );
    out.legendrian = true;
    out
}

/// Front of the Geiges projection: the (x, z) trace with cusps at the zeros of x'.
pub fn front_geiges(c: &Curve4, tol: &Tolerances) -> Result<FrontTrace> {
    let g = geiges_project(c, tol)?;
    Ok(FrontTrace {
        points: g.sample_points().iter().map(|p| (p[0], p[1])).collect(),
        cusps: g.cusp_parameters(),
    })
}

/// Closed-curve integral of z dx by the periodic trapezoid rule at the curve resolution.
pub fn total_area(c: &Curve3) -> f64 {
    let hi = c.frame.height_index();
    periodic_trapezoid(|t| c.point(t)[hi] * c.tangent(t)[0], c.samples)
}

/// Integral of z x' over [t0, t1]; t1 may exceed 1, in which case the window wraps.
pub fn segment_area(c: &Curve3, t0: f64, t1: f64) -> f64 {
    if t1 <= t0 {
        return 0.0;
    }
    let hi = c.frame.height_index();
    let cells = ((t1 - t0) * c.samples as f64 / 4.0).ceil().max(1.0) as usize;
    let h = (t1 - t0) / cells as f64;
    (0..cells)
        .map(|k| {
            let a = t0 + k as f64 * h;
            gauss8(|t| c.point(t)[hi] * c.tangent(t)[0], a, a + h)
        })
        .sum()
}
