use std::collections::{HashMap, HashSet};

use nalgebra::{Matrix2, Vector2, Vector3};

use super::{Curve3, SelfIntersection, Tolerances};
use crate::error::{Error, Result};

fn cyclic_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

fn candidate_radius(pts: &[Vector3<f64>]) -> f64 {
    let n = pts.len();
    (0..n).map(|i| (pts[(i + 1) % n] - pts[i]).norm()).fold(0.0, f64::max)
}

/// Gauss–Newton on |c(t0) - c(t1)|^2. Returns (t0, t1, residual, gram determinant).
fn refine(c: &Curve3, mut t0: f64, mut t1: f64) -> (f64, f64, f64, f64) {
    let mut det = 0.0;
    for _ in 0..40 {
        let r = c.point(t0) - c.point(t1);
        let a = c.tangent(t0);
        let b = -c.tangent(t1);
        let g = Matrix2::new(a.dot(&a), a.dot(&b), a.dot(&b), b.dot(&b));
        det = g.determinant() / (a.norm_squared() * b.norm_squared()).max(1e-300);
        let rhs = -Vector2::new(a.dot(&r), b.dot(&r));
        let Some(inv) = g.try_inverse() else { break };
        let step = inv * rhs;
        let s = step.norm();
        let scale = if s > 0.01 { 0.01 / s } else { 1.0 };
        t0 += scale * step[0];
        t1 += scale * step[1];
        if s < 1e-15 {
            break;
        }
    }
    let res = (c.point(t0) - c.point(t1)).norm();
    (t0.rem_euclid(1.0), t1.rem_euclid(1.0), res, det)
}

fn resolve(
    c: &Curve3,
    candidates: impl Iterator<Item = (usize, usize)>,
    tol: &Tolerances,
) -> Result<Vec<SelfIntersection>> {
    let n = c.samples;
    let tol_pos = c.tol_pos(tol);
    let mut found: Vec<SelfIntersection> = Vec::new();
    let mut tried: HashSet<(usize, usize)> = HashSet::new();
    for (i, j) in candidates {
        let (s0, s1) = (i as f64 / n as f64, j as f64 / n as f64);
        let near = (0..3).any(|di| {
            (0..3).any(|dj| tried.contains(&((i + n + di - 1) % n, (j + n + dj - 1) % n)))
        });
        if near {
            continue;
        }
        tried.insert((i, j));
        let (mut t0, mut t1, res, det) = refine(c, s0, s1);
        if res >= tol_pos {
            continue;
        }
        if cyclic_gap(t0, t1) <= tol.sep_min {
            continue;
        }
        if det < 1e-10 {
            return Err(Error::NonGeneric(format!(
                "double points are not isolated near t = ({t0:.6}, {t1:.6})"
            )));
        }
        if t0 > t1 {
            std::mem::swap(&mut t0, &mut t1);
        }
        if found
            .iter()
            .any(|s| cyclic_gap(s.t0, t0) < tol.sep_min && cyclic_gap(s.t1, t1) < tol.sep_min)
        {
            continue;
        }
        let p = c.point(t0);
        found.push(SelfIntersection { t0, t1, point: [p[0], p[1], p[2]], residual: res });
    }
    if found.len() > n / 16 {
        return Err(Error::NonGeneric(format!("{} double points: residual plateau", found.len())));
    }
    found.sort_by(|a, b| a.t0.partial_cmp(&b.t0).unwrap());
    Ok(found)
}

/// Double points of a curve: spatial-hash candidates on the sample grid, refined by Gauss–Newton.
pub fn find_self_intersections(c: &Curve3, tol: &Tolerances) -> Result<Vec<SelfIntersection>> {
    let n = c.samples;
    let pts = c.sample_points();
    let rc = candidate_radius(&pts);
    let key = |p: &Vector3<f64>| {
        ((p[0] / rc).floor() as i64, (p[1] / rc).floor() as i64, (p[2] / rc).floor() as i64)
    };
    let mut grid: HashMap<(i64, i64, i64), Vec<usize>> = HashMap::new();
    for (i, p) in pts.iter().enumerate() {
        grid.entry(key(p)).or_default().push(i);
    }
    let min_gap = tol.sep_min.max(3.0 / n as f64);
    let mut cands: Vec<(usize, usize, f64)> = Vec::new();
    for (i, p) in pts.iter().enumerate() {
        let (a, b, cc) = key(p);
        for da in -1..=1 {
            for db in -1..=1 {
                for dc in -1..=1 {
                    if let Some(list) = grid.get(&(a + da, b + db, cc + dc)) {
                        for &j in list {
                            if j <= i {
                                continue;
                            }
                            if cyclic_gap(i as f64 / n as f64, j as f64 / n as f64) <= min_gap {
                                continue;
                            }
                            let d = (pts[i] - pts[j]).norm();
                            if d < rc {
                                cands.push((i, j, d));
                            }
                        }
                    }
                }
            }
        }
    }
    cands.sort_by(|a, b| a.2.partial_cmp(&b.2).unwrap());
    resolve(c, cands.into_iter().map(|(i, j, _)| (i, j)), tol)
}

/// O(N^2) pairwise scan with the same refinement; the oracle for [`find_self_intersections`].
pub fn find_self_intersections_brute(c: &Curve3, tol: &Tolerances) -> Result<Vec<SelfIntersection>> {
    let n = c.samples;
    let pts = c.sample_points();
    let rc = candidate_radius(&pts);
    let min_gap = tol.sep_min.max(3.0 / n as f64);
    let mut cands = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if cyclic_gap(i as f64 / n as f64, j as f64 / n as f64) <= min_gap {
                continue;
            }
            let d = (pts[i] - pts[j]).norm();
            if d < rc {
                cands.push((i, j, d));
            }
        }
    }
    cands.sort_by(|a, b| a.2.partial_cmp(&b.2).unwrap());
    resolve(c, cands.into_iter().map(|(i, j, _)| (i, j)), tol)
}

/// Minimum distance between samples whose indices differ by more than `skip` (cyclically).
pub fn min_nonadjacent_distance(pts: &[Vector3<f64>], skip: usize) -> f64 {
    let n = pts.len();
    let rc = {
        let mut lo = pts[0];
        let mut hi = pts[0];
        for p in pts {
            lo = lo.inf(p);
            hi = hi.sup(p);
        }
        ((hi - lo).norm() / (n as f64).sqrt()).max(1e-12)
    };
    let mut best = f64::INFINITY;
    let mut cell = rc;
    // grow the hash cell until some pair is found
    loop {
        let key = |p: &Vector3<f64>| {
            ((p[0] / cell).floor() as i64, (p[1] / cell).floor() as i64, (p[2] / cell).floor() as i64)
        };
        let mut grid: HashMap<(i64, i64, i64), Vec<usize>> = HashMap::new();
        for (i, p) in pts.iter().enumerate() {
            grid.entry(key(p)).or_default().push(i);
        }
        for (i, p) in pts.iter().enumerate() {
            let (a, b, c) = key(p);
            for da in -1..=1 {
                for db in -1..=1 {
                    for dc in -1..=1 {
                        if let Some(list) = grid.get(&(a + da, b + db, c + dc)) {
                            for &j in list {
                                let g = (i as isize - j as isize).unsigned_abs();
                                let g = g.min(n - g);
                                if g > skip {
                                    best = best.min((p - pts[j]).norm());
                                }
                            }
                        }
                    }
                }
            }
        }
        if best <= cell {
            return best;
        }
        cell *= 2.0;
    }
}
