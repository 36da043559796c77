use std::f64::consts::PI;

use legendre_core::curves::find_self_intersections_brute;
use legendre_core::degree::*;
use legendre_core::{find_self_intersections, Tolerances};
use nalgebra::{Quaternion, UnitQuaternion, Vector3};
use proptest::prelude::*;

const Q2: [f64; 3] = [0.31, -0.52, 0.79];
const Q3: [f64; 4] = [0.31, -0.52, 0.79, 0.23];

fn s2(name: &str) -> SphereMap {
    builtin_map(name).unwrap()
}

#[test]
fn identity_and_antipodal_on_s2() {
    assert_eq!(degree_s2(&s2("identity_s2")).unwrap(), 1);
    assert_eq!(degree_s2(&s2("antipodal_s2")).unwrap(), -1);
    assert_eq!(degree_regular_value(&s2("antipodal_s2"), &Q2).unwrap(), -1);
    assert_eq!(degree_regular_value(&s2("identity_s2"), &[0.0, 1.0, 0.2]).unwrap(), 1);
}

#[test]
fn quadrature_agrees_with_regular_values_on_synthetic_maps() {
    let maps = [
        ("identity_s2", 1),
        ("antipodal_s2", -1),
        ("reflect_s2", -1),
        ("rotate_s2", 1),
        ("wobble_s2", 1),
        ("suspension(2)", 2),
        ("suspension(-3)", -3),
        ("rational_square", 2),
        ("rational_cubic", 3),
        ("conj_square", -2),
        ("fold_s2", 0),
        ("constant_s2", 0),
    ];
    for (name, want) in maps {
        let m = s2(name);
        let e = degree_s2_estimate(&m).unwrap();
        assert_eq!(e.degree, want, "{name}");
        assert_eq!(e.grid, 256, "{name}");
        assert!(e.defect < 0.05, "{name}: {e:?}");
        assert_eq!(degree_regular_value(&m, &Q2).unwrap(), want, "{name}");
        assert!(m.norm_defect() < 1e-9);
    }
}

#[test]
fn finer_grids_shrink_the_defect() {
    for name in ["identity_s2", "wobble_s2", "suspension(2)"] {
        let m = s2(name);
        let coarse = degree_integral(&m, 64);
        let fine = degree_integral(&m, 128);
        assert!((fine - fine.round()).abs() < (coarse - coarse.round()).abs(), "{name}");
    }
}

#[test]
fn reflecting_the_target_negates_the_degree() {
    for name in ["identity_s2", "rational_cubic", "suspension(-3)", "wobble_s2"] {
        let m = s2(name);
        let r = m.then(|x| vec![x[0], -x[1], x[2]]);
        assert_eq!(degree_s2(&r).unwrap(), -degree_s2(&m).unwrap(), "{name}");
    }
}

#[test]
fn circle_windings() {
    assert_eq!(winding_number(&s2("power_circle(3)")).unwrap(), 3);
    assert_eq!(winding_number(&s2("identity_circle")).unwrap(), 1);
    let constant = SphereMap::new(Domain::Circle, 64, |_| vec![0.6, -0.8]);
    assert_eq!(winding_number(&constant).unwrap(), 0);
    // derivative direction of the figure-eight (sin 4πt, sin 2πt)
    let eight = SphereMap::new(Domain::Circle, 64, |t| {
        vec![4.0 * PI * (4.0 * PI * t[0]).cos(), 2.0 * PI * (2.0 * PI * t[0]).cos()]
    });
    assert_eq!(winding_number(&eight).unwrap(), 0);
    let square = s2("power_circle(2)");
    assert_eq!(degree_regular_value(&square, &[0.3, 0.7]).unwrap(), 2);
    let vanishing = SphereMap::new(Domain::Circle, 64, |t| vec![(2.0 * PI * t[0]).cos(), 0.0]);
    assert!(winding_number(&vanishing).is_err());
}

#[test]
fn three_dimensional_degrees() {
    let anti = s2("antipodal_s3");
    assert_eq!(degree_3_to_s3(&anti).unwrap(), 1);
    assert_eq!(degree_regular_value(&anti, &Q3).unwrap(), 1);
    assert_eq!(degree_3_to_s3(&s2("identity_s3")).unwrap(), 1);
    let sq = s2("square_s3");
    assert_eq!(degree_3_to_s3(&sq).unwrap(), 2);
    assert_eq!(degree_regular_value(&sq, &Q3).unwrap(), 2);
    let flat = s2("constant_s2xs1");
    assert_eq!(degree_3_to_s3(&flat).unwrap(), 0);
    assert_eq!(degree_regular_value(&flat, &Q3).unwrap(), 0);
    assert!(degree_3_to_s3(&s2("identity_s2")).is_err());
    assert!(degree_s2(&anti).is_err());
}

#[test]
fn kalman_loop_lies_on_the_clifford_torus() {
    let l = kalman_loop(5, 2, 2, 0).unwrap();
    for i in 0..40 {
        for j in 0..40 {
            let z = l.point(i as f64 / 40.0, j as f64 / 40.0);
            assert!((z.norm() - 2f64.sqrt()).abs() < 1e-12);
            assert!((z[0].hypot(z[1]) - 1.0).abs() < 1e-12);
            // ξ = ⟨jz, kz⟩ is orthogonal to z and to the Reeb field iz
            for w in [quat_j(&z), quat_k(&z)] {
                assert!(w.dot(&z).abs() < 1e-12 && w.dot(&quat_i(&z)).abs() < 1e-12);
            }
        }
    }
    assert!(l.min_framing_norm(48) > 1.0);
    assert_eq!(kalman_loop(5, 2, 0, 0).unwrap().framing_rotation(0.3, 0.5).unwrap(), 0);
    assert!(matches!(kalman_loop(4, 2, 0, 0), Err(legendre_core::Error::BadParameters(_))));
    assert!(kalman_loop(5, 2, 1, 0).is_err());
}

#[test]
fn swapping_the_factors_swaps_p_and_q() {
    let a = kalman_loop(2, 3, 0, 0).unwrap();
    let b = kalman_loop(3, 2, 0, 0).unwrap();
    for i in 0..200 {
        let t = i as f64 / 200.0;
        let z = a.point(0.0, t);
        let w = b.point(0.0, t);
        assert!((z[0] - w[2]).abs() + (z[1] - w[3]).abs() + (z[2] - w[0]).abs() + (z[3] - w[1]).abs() < 1e-12);
    }
}

#[test]
fn stereographic_torus_knots() {
    let c = stereographic_torus_knot(1, 0);
    for i in 0..50 {
        let p = c.point(i as f64 / 50.0);
        assert!((p.xy().norm() - 3.0).abs() < 1e-12 && p[2].abs() < 1e-12);
    }
    let tol = Tolerances::default();
    let k = stereographic_torus_knot(5, 2);
    assert!(find_self_intersections(&k, &tol).unwrap().is_empty());
    assert!(find_self_intersections_brute(&k, &tol).unwrap().is_empty());
    for i in 0..100 {
        let t = i as f64 / 100.0;
        let h = 1e-5;
        let fd = (k.point(t + h) - k.point(t - h)) / (2.0 * h);
        assert!((fd - k.tangent(t)).norm() < 1e-6 * fd.norm());
    }
}

#[test]
fn capping_disk_boundary_and_centre() {
    for alpha in 1..=3 {
        let disk = kalman_capping_disk(alpha);
        assert!(disk.eval(0.0, 0.0).norm() < 1e-12);
        assert!(disk.eval(1.0, 0.0).norm() < 1e-12);
        for i in 0..64 {
            let th = i as f64 / 64.0;
            let b = disk.boundary(th);
            assert!((disk.rotation(1.0, th).matrix() - b.matrix()).norm() < 1e-12);
            let ang = 4.0 * PI * alpha as f64 * th;
            let want = Vector3::new(ang.cos(), ang.sin(), 0.0);
            let got = b * Vector3::x();
            assert!((got - want).norm() < 1e-12);
        }
        let v = Vector3::new(0.6, 0.0, 0.8);
        let wind = SphereMap::new(Domain::Circle, 64, move |t| {
            let w = disk.boundary(t[0]) * v;
            vec![w[0], w[1]]
        });
        assert_eq!(winding_number(&wind).unwrap(), 2 * alpha as i64);
    }
}

#[test]
fn capping_disk_is_continuous_in_the_ball_model() {
    let disk = kalman_capping_disk(2);
    let n = 200;
    let mut crossings = 0;
    for i in 0..=n {
        for j in 0..n {
            let (r, th) = (i as f64 / n as f64, j as f64 / n as f64);
            let (r2, th2) = ((i as f64 + 0.5) / n as f64, (j as f64 + 0.5) / n as f64);
            let a = disk.rotation(r, th);
            let b = disk.rotation(r2.min(1.0), th2);
            assert!((a.matrix() - b.matrix()).norm() < 0.2);
            let (x, y) = (r * (2.0 * PI * th).cos(), r * (2.0 * PI * th).sin());
            let (x2, y2) = (r2.min(1.0) * (2.0 * PI * th2).cos(), r2.min(1.0) * (2.0 * PI * th2).sin());
            let (pa, pb) = (disk.eval(x, y), disk.eval(x2, y2));
            // ball points are close, or antipodal on the boundary sphere of radius π
            if (pa - pb).norm() > 0.5 {
                assert!((pa + pb).norm() < 0.5 && pa.norm() > PI - 0.3);
                crossings += 1;
            }
            assert!(pa.norm() <= PI + 1e-12);
        }
    }
    assert!(crossings > 0);
}

#[test]
fn obstruction_degree_is_alpha_with_tangent_hemisphere_sign() {
    for alpha in 1..=3u32 {
        for t0 in [0.1, 0.37, 0.73] {
            let m = kalman_obstruction_sphere(5, 2, alpha, t0).unwrap();
            let e = degree_s2_estimate(&m).unwrap();
            let sign = -obstruction_tangent(5, 2, t0)[2].signum() as i64;
            assert_eq!(e.degree, sign * alpha as i64, "alpha {alpha}, t0 {t0}");
            assert_eq!(degree_regular_value(&m, &Q2).unwrap(), e.degree, "alpha {alpha}, t0 {t0}");
        }
    }
}

#[test]
fn obstruction_degree_is_additive_in_alpha() {
    let one = degree_s2(&kalman_obstruction_sphere(5, 2, 1, 0.73).unwrap()).unwrap();
    for alpha in 1..=3u32 {
        let d = degree_s2(&kalman_obstruction_sphere(5, 2, alpha, 0.73).unwrap()).unwrap();
        assert_eq!(d, alpha as i64 * one);
    }
}

#[test]
fn another_capping_disk_gives_the_same_degree() {
    // hemisphere of the great sphere spanned by 1, k, i: centre at i
    for (alpha, t0) in [(1u32, 0.1), (2, 0.73)] {
        let v = obstruction_tangent(5, 2, t0);
        let alt = SphereMap::new(Domain::Sphere2, 256, move |x| {
            let (phi, th) = (x[0], x[1]);
            let u = if phi <= 0.5 * PI {
                let r = phi / (0.5 * PI);
                let (s, c) = (0.5 * PI * r).sin_cos();
                let a = 2.0 * PI * alpha as f64 * th;
                let q = UnitQuaternion::from_quaternion(Quaternion::new(s * a.cos(), c, 0.0, s * a.sin()));
                q * v
            } else {
                let s = (phi - 0.5 * PI) / (0.5 * PI);
                s * Vector3::y() + (1.0 - s) * (kalman_capping_disk(alpha).boundary(th) * v)
            };
            vec![u[0], u[1], u[2]]
        });
        let m = kalman_obstruction_sphere(5, 2, alpha, t0).unwrap();
        assert_eq!(degree_s2(&alt).unwrap(), degree_s2(&m).unwrap());
    }
}

#[test]
fn obstruction_sphere_is_continuous_across_the_equator() {
    let m = kalman_obstruction_sphere(5, 2, 2, 0.1).unwrap();
    for j in 0..100 {
        let th = j as f64 / 100.0;
        let a = m.eval(&[0.5 * PI - 1e-9, th]);
        let b = m.eval(&[0.5 * PI + 1e-9, th]);
        assert!(a.iter().zip(&b).map(|(x, y)| (x - y).abs()).sum::<f64>() < 1e-6);
        let south = m.eval(&[PI, th]);
        assert!((south[1] - 1.0).abs() < 1e-12);
    }
}

#[test]
fn horizontal_tangent_is_degenerate() {
    // the z-component of the (5,2) tangent vanishes at t0 = 1/8
    assert!(matches!(
        kalman_obstruction_sphere(5, 2, 1, 0.125),
        Err(legendre_core::Error::InterpolationDegenerate { .. })
    ));
    assert!(kalman_obstruction_sphere(4, 2, 1, 0.1).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn suspension_degrees(k in -4i64..=4) {
        let m = builtin_map(&format!("suspension({k})")).unwrap();
        prop_assert_eq!(degree_s2(&m).unwrap(), k);
    }

    #[test]
    fn regular_values_agree_with_quadrature(x in -1.0f64..1.0, y in -1.0f64..1.0, z in 0.2f64..1.0) {
        let m = builtin_map("rational_cubic").unwrap();
        prop_assert_eq!(degree_regular_value(&m, &[x, y, z]).unwrap(), 3);
    }
}
