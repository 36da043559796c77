//! Builtin analytic curves and families.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::Vector3;

use super::{Curve3, CurveFamily, Frame};
use crate::numeric::{gauss8, smooth_step};

/// Profile h(u) of an eye-shaped front with its first two derivatives.
pub type Profile = Arc<dyn Fn(f64) -> (f64, f64, f64) + Send + Sync>;

/// Front x = cos θ, z = sin³θ · h(cos θ), θ = 2πt; the slope is z'/x' in closed form.
///
/// Returns (x, height, slope) and their t-derivatives.
fn eye_jet(h: &Profile, t: f64) -> ([f64; 3], [f64; 3]) {
    let th = 2.0 * PI * t;
    let (s, c) = th.sin_cos();
    let (hv, h1, h2) = h(c);
    let x = c;
    let z = s * s * s * hv;
    let w = -3.0 * s * c * hv + s * s * s * h1;
    let dx = -s;
    let dz = 3.0 * s * s * c * hv - s.powi(4) * h1;
    let dw = -3.0 * (c * c - s * s) * hv + 6.0 * s * s * c * h1 - s.powi(4) * h2;
    let k = 2.0 * PI;
    ([x, z, w], [k * dx, k * dz, k * dw])
}

/// Eye-shaped Legendrian front with profile `h`, in the requested frame.
pub fn eye_curve(h: Profile, frame: Frame, samples: usize) -> Curve3 {
    let h2 = h.clone();
    let (hi, si) = (frame.height_index(), frame.slope_index());
    let pack = move |v: [f64; 3]| {
        let mut p = Vector3::zeros();
        p[0] = v[0];
        p[hi] = v[1];
        p[si] = v[2];
        p
    };
    let pack2 = pack;
    Curve3::new(move |t| pack(eye_jet(&h, t).0), move |t| pack2(eye_jet(&h2, t).1), frame, samples)
        .flagged_legendrian()
}

pub fn constant_profile(a: f64) -> Profile {
    Arc::new(move |_| (a, 0.0, 0.0))
}

/// Polynomial profile from coefficients c[0] + c[1] u + ...
pub fn polynomial_profile(coeffs: Vec<f64>) -> Profile {
    Arc::new(move |u| {
        let (mut v, mut d1, mut d2) = (0.0, 0.0, 0.0);
        for (k, &a) in coeffs.iter().enumerate().rev() {
            d2 = d2 * u + 2.0 * d1;
            d1 = d1 * u + v;
            v = v * u + a;
            let _ = k;
        }
        (v, d1, d2)
    })
}

/// Weighted mean of a function of u over [-1,1] with weight (1-u²)^{3/2}.
pub fn eye_weighted_mean<F: Fn(f64) -> f64>(f: F) -> f64 {
    let cells = 64;
    let wf = |u: f64| (1.0 - u * u).max(0.0).powf(1.5);
    let mut num = 0.0;
    let mut den = 0.0;
    for k in 0..cells {
        // substitute u = -cos φ to remove the endpoint singularity
        let a = PI * k as f64 / cells as f64;
        let b = a + PI / cells as f64;
        num += gauss8(|p| f(-p.cos()) * wf(-p.cos()) * p.sin(), a, b);
        den += gauss8(|p| wf(-p.cos()) * p.sin(), a, b);
    }
    num / den
}

/// Standard two-cusp Legendrian unknot in contact coordinates: tb = -1, rot = 0.
pub fn unknot_front(samples: usize) -> Curve3 {
    eye_curve(constant_profile(1.0), Frame::ContactXyz, samples)
}

/// Zero-area Geiges curve with one double point (a front self-tangency) at which the
/// enclosed front area vanishes: the loop consists of two lobes of opposite area.
pub fn figure_eight(samples: usize) -> Curve3 {
    eye_curve(polynomial_profile(vec![0.0, 0.0, 1.0, 0.0, -8.0 / 3.0]), Frame::GeigesXzw, samples)
}

/// Profile with a double root at `u0` and zero weighted mean, so the eye has zero area
/// and a single self-tangency.
pub fn tangency_profile(u0: f64, slope: f64) -> Profile {
    // h(u) = (u-u0)^2 (1 + slope (u-u0)) + k (u-u0)^2 (u-u0)^2, with k fixing the mean
    let base = move |u: f64| {
        let d = u - u0;
        d * d * (1.0 + slope * d)
    };
    let quart = move |u: f64| {
        let d = u - u0;
        d * d * d * d
    };
    let k = -eye_weighted_mean(base) / eye_weighted_mean(quart);
    Arc::new(move |u| {
        let d = u - u0;
        let v = d * d * (1.0 + slope * d) + k * d.powi(4);
        let d1 = 2.0 * d + 3.0 * slope * d * d + 4.0 * k * d.powi(3);
        let d2 = 2.0 + 6.0 * slope * d + 12.0 * k * d * d;
        (v, d1, d2)
    })
}

/// Embedded zero-area Geiges eye with two transverse front crossings.
pub fn unknot_horizontal_geiges(samples: usize) -> Curve3 {
    eye_curve(polynomial_profile(vec![-0.5, 0.0, 3.0]), Frame::GeigesXzw, samples)
}

const TWIST_WIDTH: f64 = 0.2;
const TWIST_DEPTH: f64 = 2.0;

fn well(v: f64) -> (f64, f64, f64) {
    let a = v / TWIST_WIDTH;
    let g = (-a * a).exp();
    let g1 = -2.0 * a / TWIST_WIDTH * g;
    let g2 = (4.0 * a * a - 2.0) / (TWIST_WIDTH * TWIST_WIDTH) * g;
    (g, g1, g2)
}

fn sm(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    x * x * (3.0 - 2.0 * x)
}

/// Un-normalized area-twist profile: a well appears on the right, the left well fades,
/// then the right well slides back to the left.
fn twist_raw(theta: f64, u: f64) -> (f64, f64, f64) {
    let a = TWIST_DEPTH;
    let th = theta.rem_euclid(1.0);
    let comb = |terms: &[(f64, f64)]| {
        let mut out = (1.0, 0.0, 0.0);
        for &(wgt, centre) in terms {
            let (g, g1, g2) = well(u - centre);
            out.0 -= wgt * a * g;
            out.1 -= wgt * a * g1;
            out.2 -= wgt * a * g2;
        }
        out
    };
    if th < 1.0 / 3.0 {
        comb(&[(1.0, -0.5), (sm(3.0 * th), 0.5)])
    } else if th < 2.0 / 3.0 {
        comb(&[(1.0 - sm(3.0 * th - 1.0), -0.5), (1.0, 0.5)])
    } else {
        comb(&[(1.0, 0.5 - sm(3.0 * th - 2.0))])
    }
}

/// Profile of the area-twist loop at parameter theta (zero weighted mean).
pub fn area_twist_profile(theta: f64) -> Profile {
    let mean = eye_weighted_mean(|u| twist_raw(theta, u).0);
    Arc::new(move |u| {
        let (v, d1, d2) = twist_raw(theta, u);
        (v - mean, d1, d2)
    })
}

/// The area-twist loop of zero-area Geiges curves.
pub fn area_twist(theta_samples: usize, samples: usize) -> CurveFamily<Curve3> {
    CurveFamily::new(
        move |th| eye_curve(area_twist_profile(th), Frame::GeigesXzw, samples),
        theta_samples,
    )
}

fn step2(x: f64) -> (f64, f64, f64) {
    let (s, d) = smooth_step(x);
    let h = 1e-5;
    let dd = (smooth_step(x + h).1 - smooth_step(x - h).1) / (2.0 * h);
    (s, d, dd)
}

/// Legendrian (p,q) torus knot with tb = pq - p - q: satellite of the unknot front carrying the
/// 1-jet of cos(q'Θ/p + φ0) over the p-fold cover, twisted only inside a window on the upper
/// strand. The companion's contact framing is one twist below its Seifert framing, so q' = q + p.
pub fn torus_knot(p: u32, q: u32, samples: usize) -> Curve3 {
    let (pf, qf) = (p as f64, (q + p) as f64);
    let eps = 0.08;
    let phase = PI / (2.0 * pf);
    let (wa, wb) = (PI / 2.0 - 0.7, PI / 2.0 + 0.7);
    // returns x, z, y and t-derivatives
    let jet = move |t: f64| -> ([f64; 3], [f64; 3]) {
        let big = 2.0 * PI * pf * t.rem_euclid(1.0);
        let j = (big / (2.0 * PI)).floor();
        let th = big - 2.0 * PI * j;
        let (s, c) = th.sin_cos();
        let (st, dst, ddst) = step2((th - wa) / (wb - wa));
        let hw = 2.0 * PI * st;
        let hw1 = 2.0 * PI * dst / (wb - wa);
        let hw2 = 2.0 * PI * ddst / ((wb - wa) * (wb - wa));
        let arg = qf * (2.0 * PI * j + hw) / pf + phase;
        let (sa, ca) = arg.sin_cos();
        let k1 = qf / pf * hw1;
        let g = eps * ca;
        let g1 = -eps * sa * k1;
        let g2 = -eps * (ca * k1 * k1 + sa * qf / pf * hw2);
        let xu = c;
        let xu1 = -s;
        let xu2 = -c;
        let zu = s * s * s;
        let zu1 = 3.0 * s * s * c;
        let yu = -3.0 * s * c;
        let yu1 = -3.0 * (c * c - s * s);
        let (ry, ry1) = if g1 == 0.0 && g2 == 0.0 {
            (0.0, 0.0)
        } else {
            (g1 / xu1, (g2 * xu1 - g1 * xu2) / (xu1 * xu1))
        };
        let x = xu;
        let z = zu + g;
        let y = yu + ry;
        let sc = 2.0 * PI * pf;
        ([x, z, y], [sc * xu1, sc * (zu1 + g1), sc * (yu1 + ry1)])
    };
    Curve3::new(
        move |t| {
            let v = jet(t).0;
            Vector3::new(v[0], v[2], v[1])
        },
        move |t| {
            let d = jet(t).1;
            Vector3::new(d[0], d[2], d[1])
        },
        Frame::ContactXyz,
        samples,
    )
    .flagged_legendrian()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::{total_area, Tolerances};

    #[test]
    fn eye_curves_are_legendrian() {
        let tol = Tolerances::default();
        for c in [unknot_front(1024), figure_eight(1024), unknot_horizontal_geiges(1024)] {
            assert!(c.legendrian_residual() < 1e-10);
            c.validate(&tol).unwrap();
        }
    }

    #[test]
    fn zero_area_profiles() {
        let a = total_area(&figure_eight(4096));
        assert!(a.abs() < 1e-10, "{a}");
        assert!(total_area(&unknot_horizontal_geiges(4096)).abs() < 1e-10);
        assert!(total_area(&eye_curve(tangency_profile(0.3, 0.5), Frame::GeigesXzw, 4096)).abs() < 1e-10);
        let fam = area_twist(12, 4096);
        for th in fam.thetas() {
            assert!(total_area(&fam.at(th)).abs() < 1e-10);
        }
    }

    #[test]
    fn torus_knot_is_legendrian_and_closed() {
        let c = torus_knot(2, 3, 4096);
        assert!(c.legendrian_residual() < 1e-6, "{}", c.legendrian_residual());
        c.validate(&Tolerances::default()).unwrap();
    }

    #[test]
    fn area_twist_closes_up() {
        let a = area_twist_profile(0.0);
        let b = area_twist_profile(1.0 - 1e-12);
        for k in 0..=10 {
            let u = -1.0 + 0.2 * k as f64;
            assert!((a(u).0 - b(u).0).abs() < 1e-9);
        }
    }
}
