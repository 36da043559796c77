//! Small numerical kernels shared by the geometric modules.

const GL8_X: [f64; 8] = [
    -0.960_289_856_497_536_3,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL8_W: [f64; 8] = [
    0.101_228_536_290_376_26,
    0.222_381_034_453_374_47,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362,
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_47,
    0.101_228_536_290_376_26,
];

/// Eight-point Gauss–Legendre rule on `[a, b]`.
pub fn gauss8<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut s = 0.0;
    for k in 0..8 {
        s += GL8_W[k] * f(c + h * GL8_X[k]);
    }
    s * h
}

/// Composite trapezoid rule of a 1-periodic integrand on `n` equispaced nodes.
pub fn periodic_trapezoid<F: Fn(f64) -> f64>(f: F, n: usize) -> f64 {
    let h = 1.0 / n as f64;
    (0..n).map(|i| f(i as f64 * h)).sum::<f64>() * h
}

/// Fourth-order central difference.
pub fn central_diff4<F: Fn(f64) -> f64>(f: F, t: f64, h: f64) -> f64 {
    (f(t - 2.0 * h) - 8.0 * f(t - h) + 8.0 * f(t + h) - f(t + 2.0 * h)) / (12.0 * h)
}

fn flat(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (-1.0 / x).exp()
    }
}

fn flat_d(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (-1.0 / x).exp() / (x * x)
    }
}

/// C-infinity step: 0 for x <= 0, 1 for x >= 1. Returns (value, derivative).
pub fn smooth_step(x: f64) -> (f64, f64) {
    if x <= 0.0 {
        return (0.0, 0.0);
    }
    if x >= 1.0 {
        return (1.0, 0.0);
    }
    let a = flat(x);
    let b = flat(1.0 - x);
    let g = a + b;
    let da = flat_d(x);
    let db = -flat_d(1.0 - x);
    (a / g, (da * g - a * (da + db)) / (g * g))
}

/// Even cutoff equal to 1 on |v| <= r1 and 0 on |v| >= r2. Returns (value, derivative).
pub fn cutoff(v: f64, r1: f64, r2: f64) -> (f64, f64) {
    let a = v.abs();
    let (s, ds) = smooth_step((r2 - a) / (r2 - r1));
    (s, -ds * v.signum() / (r2 - r1))
}

/// Running integral of a scalar integrand on `[a, b]`, tabulated with Gauss–Legendre
/// cells and evaluated by cubic Hermite interpolation using the integrand as slope.
#[derive(Clone, Debug)]
pub struct Cumulative {
    a: f64,
    h: f64,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl Cumulative {
    pub fn new<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cells: usize) -> Self {
        let h = (b - a) / cells as f64;
        let mut values = Vec::with_capacity(cells + 1);
        let mut slopes = Vec::with_capacity(cells + 1);
        let mut acc = 0.0;
        values.push(0.0);
        slopes.push(f(a));
        for i in 0..cells {
            let x0 = a + i as f64 * h;
            acc += gauss8(&f, x0, x0 + h);
            values.push(acc);
            slopes.push(f(x0 + h));
        }
        Cumulative { a, h, values, slopes }
    }

    pub fn total(&self) -> f64 {
        *self.values.last().unwrap()
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.values.len() - 1;
        let s = ((x - self.a) / self.h).clamp(0.0, n as f64);
        let i = (s.floor() as usize).min(n - 1);
        let u = s - i as f64;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (self.slopes[i] * self.h, self.slopes[i + 1] * self.h);
        let u2 = u * u;
        let u3 = u2 * u;
        (2.0 * u3 - 3.0 * u2 + 1.0) * y0
            + (u3 - 2.0 * u2 + u) * m0
            + (-2.0 * u3 + 3.0 * u2) * y1
            + (u3 - u2) * m1
    }
}

/// Periodic natural cubic spline through equispaced samples on `[0, 1)`.
#[derive(Clone, Debug)]
pub struct PeriodicSpline {
    y: Vec<f64>,
    m: Vec<f64>,
}

impl PeriodicSpline {
    pub fn new(y: Vec<f64>) -> Self {
        let n = y.len();
        assert!(n >= 4, "periodic spline needs at least 4 samples");
        let h = 1.0 / n as f64;
        // second derivatives from the cyclic system m[i-1] + 4 m[i] + m[i+1] = 6 (y[i-1] - 2y[i] + y[i+1]) / h^2
        let rhs: Vec<f64> = (0..n)
            .map(|i| 6.0 * (y[(i + n - 1) % n] - 2.0 * y[i] + y[(i + 1) % n]) / (h * h))
            .collect();
        let m = solve_cyclic(1.0, 4.0, 1.0, &rhs);
        PeriodicSpline { y, m }
    }

    /// Value and first derivative at `t` (taken modulo 1).
    pub fn eval(&self, t: f64) -> (f64, f64) {
        let n = self.y.len();
        let h = 1.0 / n as f64;
        let s = t.rem_euclid(1.0) / h;
        let i = (s.floor() as usize) % n;
        let j = (i + 1) % n;
        let b = s - s.floor();
        let a = 1.0 - b;
        let (yi, yj, mi, mj) = (self.y[i], self.y[j], self.m[i], self.m[j]);
        let v = a * yi + b * yj + ((a * a * a - a) * mi + (b * b * b - b) * mj) * h * h / 6.0;
        let d = (yj - yi) / h + (-(3.0 * a * a - 1.0) * mi + (3.0 * b * b - 1.0) * mj) * h / 6.0;
        (v, d)
    }
}

/// Solves the cyclic tridiagonal system with constant bands (Sherman–Morrison).
fn solve_cyclic(lo: f64, diag: f64, up: f64, rhs: &[f64]) -> Vec<f64> {
    let n = rhs.len();
    let gamma = -diag;
    let mut bb = vec![diag; n];
    bb[0] = diag - gamma;
    bb[n - 1] = diag - lo * up / gamma;
    let x = thomas(lo, &bb, up, rhs);
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = lo;
    let z = thomas(lo, &bb, up, &u);
    let fact = (x[0] + up * x[n - 1] / gamma) / (1.0 + z[0] + up * z[n - 1] / gamma);
    x.iter().zip(&z).map(|(a, b)| a - fact * b).collect()
}

fn thomas(lo: f64, diag: &[f64], up: f64, rhs: &[f64]) -> Vec<f64> {
    let n = rhs.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = up / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let den = diag[i] - lo * c[i - 1];
        c[i] = up / den;
        d[i] = (rhs[i] - lo * d[i - 1]) / den;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

/// Bisection refined root of a continuous function with a sign change on `[a, b]`.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let mut fa = f(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (b - a).abs() < tol {
            return m;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm > 0.0) == (fa > 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// Wraps an angle increment into (-pi, pi].
pub fn wrap_angle(mut a: f64) -> f64 {
    use std::f64::consts::PI;
    while a > PI {
        a -= 2.0 * PI;
    }
    while a <= -PI {
        a += 2.0 * PI;
    }
    a
}

/// Winding number of a nonvanishing planar map `f` on [0,1], closing up at 1.
///
/// Starts from `n` equal steps and bisects any step whose angle increment reaches π/2.
/// Returns `Err(t)` at a parameter where the map is below `min_norm` or refinement stalls.
pub fn winding<F: Fn(f64) -> (f64, f64)>(f: F, n: usize, min_norm: f64) -> Result<i64, f64> {
    fn angle_between(a: (f64, f64), b: (f64, f64)) -> f64 {
        (a.0 * b.1 - a.1 * b.0).atan2(a.0 * b.0 + a.1 * b.1)
    }
    let eval = |t: f64| -> Result<(f64, f64), f64> {
        let v = f(t);
        if v.0.hypot(v.1) < min_norm || !v.0.is_finite() || !v.1.is_finite() {
            Err(t)
        } else {
            Ok(v)
        }
    };
    let mut total = 0.0;
    let mut stack: Vec<(f64, f64, (f64, f64), (f64, f64), u32)> = Vec::new();
    let mut prev = eval(0.0)?;
    let first = prev;
    for i in 1..=n {
        let t1 = i as f64 / n as f64;
        let v1 = if i == n { first } else { eval(t1)? };
        stack.push((t1 - 1.0 / n as f64, t1, prev, v1, 0));
        while let Some((a, b, va, vb, depth)) = stack.pop() {
            let d = angle_between(va, vb);
            if d.abs() < std::f64::consts::FRAC_PI_2 {
                total += d;
            } else {
                if depth > 40 {
                    return Err(a);
                }
                let m = 0.5 * (a + b);
                let vm = eval(m)?;
                stack.push((m, b, vm, vb, depth + 1));
                stack.push((a, m, va, vm, depth + 1));
            }
        }
        prev = v1;
    }
    Ok((total / (2.0 * std::f64::consts::PI)).round() as i64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn spline_reproduces_trig() {
        let n = 512;
        let y: Vec<f64> = (0..n).map(|i| (2.0 * PI * i as f64 / n as f64).sin()).collect();
        let s = PeriodicSpline::new(y);
        for k in 0..50 {
            let t = k as f64 / 50.0 + 0.0031;
            let (v, d) = s.eval(t);
            assert!((v - (2.0 * PI * t).sin()).abs() < 1e-8);
            assert!((d - 2.0 * PI * (2.0 * PI * t).cos()).abs() < 1e-4);
        }
    }

    #[test]
    fn cumulative_matches_closed_form() {
        let c = Cumulative::new(|x: f64| x.cos(), 0.0, 2.0, 64);
        for k in 0..=20 {
            let x = 0.1 * k as f64;
            assert!((c.eval(x) - x.sin()).abs() < 1e-8);
        }
    }

    #[test]
    fn winding_of_power_maps() {
        for k in -3i64..=3 {
            let w = winding(|t| ((2.0 * PI * k as f64 * t).cos(), (2.0 * PI * k as f64 * t).sin()), 16, 1e-12);
            assert_eq!(w, Ok(k));
        }
        assert_eq!(winding(|_| (1.0, 0.0), 8, 1e-12), Ok(0));
        assert!(winding(|t| (t - 0.5, 0.0), 8, 1e-12).is_err());
    }

    #[test]
    fn smooth_step_derivative() {
        for k in 1..20 {
            let x = k as f64 / 20.0;
            let d = central_diff4(|y| smooth_step(y).0, x, 1e-4);
            assert!((d - smooth_step(x).1).abs() < 1e-6);
        }
    }
}
