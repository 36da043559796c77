use std::sync::Arc;

use legendre_core::curves::*;
use legendre_core::invariants::*;
use legendre_core::lifts::*;
use legendre_core::Error;
use proptest::prelude::*;

fn tol() -> Tolerances {
    Tolerances::default()
}

fn max_gap(a: &Curve3, b: &Curve3) -> f64 {
    (0..2000)
        .map(|k| {
            let t = k as f64 / 2000.0;
            (a.point(t) - b.point(t)).norm()
        })
        .fold(0.0, f64::max)
}

/// Eye with a double root of h at u0 plus delta (u-u0)^2, which keeps the tangency and adds area.
fn shifted_tangency(u0: f64, slope: f64, delta: f64) -> Curve3 {
    let h = tangency_profile(u0, slope);
    let prof: Profile = Arc::new(move |u| {
        let (a, b, c) = h(u);
        let d = u - u0;
        (a + delta * d * d, b + 2.0 * delta * d, c + 2.0 * delta)
    });
    eye_curve(prof, Frame::GeigesXzw, 4096)
}

fn reflect_zw(c: &Curve3) -> Curve3 {
    c.map_linear(nalgebra::Matrix3::from_diagonal(&nalgebra::Vector3::new(1.0, -1.0, -1.0)))
}

#[test]
fn lift_roundtrip() {
    let g = unknot_horizontal_geiges(4096);
    let lift = lift_horizontal(&g, 0.3, &tol()).unwrap();
    assert!(lift.embedded);
    assert!(lift.tangencies.is_empty());
    let back = geiges_project(&lift.curve, &tol()).unwrap();
    assert!(max_gap(&g, &back) < 1e-9);
    assert!((lift.curve.point(0.0)[1] - 0.3).abs() < 1e-12);
    assert!((lift.curve.point(0.0) - lift.curve.point(1.0 - 1e-13)).norm() < 1e-9);
    assert!(brute_force_double_points(&lift.curve, &tol()).is_empty());
}

#[test]
fn nonzero_area_is_obstructed() {
    let c = eye_curve(constant_profile(1.0), Frame::GeigesXzw, 2048);
    match lift_horizontal(&c, 0.0, &tol()) {
        Err(Error::AreaObstruction { area, .. }) => assert!((area.abs() - 2.0 * 3.0 * std::f64::consts::PI / 8.0).abs() < 1e-9),
        other => panic!("expected an area obstruction, got {other:?}"),
    }
}

#[test]
fn figure_eight_lift_has_one_double_point() {
    let f8 = figure_eight(4096);
    let lift = lift_horizontal(&f8, 0.0, &tol()).unwrap();
    assert!(!lift.embedded);
    assert_eq!(lift.tangencies.len(), 1);
    let r = lift.tangencies[0];
    assert!(r.epsilon_a.abs() < 1e-10);
    assert!((r.intersection.t0 - 0.25).abs() < 1e-9 && (r.intersection.t1 - 0.75).abs() < 1e-9);
    let bf = brute_force_double_points(&lift.curve, &tol());
    assert_eq!(bf.len(), 1);
    assert!((bf[0].0 - 0.25).abs() < 1e-9 && (bf[0].1 - 0.75).abs() < 1e-9);
    let d = front_diagram(&f8, &tol());
    assert!(matches!(d, Err(Error::NonGeneric(_))));
}

#[test]
fn epsilon_sign_flips_with_the_cubic_term() {
    let eps = |s: f64| {
        let c = eye_curve(tangency_profile(0.0, s), Frame::GeigesXzw, 4096);
        let r = tangency_reports(&c, &tol()).unwrap();
        assert_eq!(r.len(), 1);
        r[0].epsilon_a
    };
    let (neg, zero, pos) = (eps(-0.6), eps(0.0), eps(0.6));
    assert!(zero.abs() < 1e-10);
    assert!(neg.abs() > 1e-3 && pos.abs() > 1e-3);
    assert!(neg * pos < 0.0);
    assert!((neg + pos).abs() < 1e-10);
}

#[test]
fn framing_sign_matches_branch_directions() {
    for (u0, s) in [(0.0, 0.5), (0.2, -0.4), (-0.3, 0.7)] {
        let c = eye_curve(tangency_profile(u0, s), Frame::GeigesXzw, 4096);
        for r in tangency_reports(&c, &tol()).unwrap() {
            let x0 = c.tangent(r.intersection.t0)[0];
            let x1 = c.tangent(r.intersection.t1)[0];
            assert_eq!(r.framing_sign as f64 * (x0 * x1).signum(), 1.0);
        }
    }
}

#[test]
fn reflection_shifts_epsilon_by_total_area() {
    let c = shifted_tangency(0.1, 0.5, 0.3);
    let total = total_area(&c);
    assert!(total.abs() > 1e-3);
    let e = tangency_reports(&c, &tol()).unwrap()[0].epsilon_a;
    let m = reflect_zw(&c);
    let e2 = tangency_reports(&m, &tol()).unwrap()[0].epsilon_a;
    assert!((e2 - (e - total)).abs() < 1e-9);
}

#[test]
fn lobe_adds_exact_area() {
    let g = unknot_horizontal_geiges(4096);
    for (a, n) in [(0.01, 1), (-0.02, 3), (0.05, 8)] {
        let c = add_area_lobe(&g, 0.25, a, n).unwrap();
        assert!((total_area(&c) - total_area(&g) - a).abs() < 1e-8);
        assert!(c.legendrian_residual() < 1e-10);
    }
}

#[test]
fn lobe_leaves_the_rest_of_the_curve_alone() {
    let g = unknot_horizontal_geiges(4096);
    let (c, w) = add_area_lobe_in_window(&g, 0.25, 0.02, 2).unwrap();
    for k in 0..200 {
        let t = k as f64 / 200.0;
        if t < w.0 || t > w.1 {
            assert!((c.point(t) - g.point(t)).norm() < 1e-12);
        }
    }
}

#[test]
fn lobe_deviation_halves_with_doubled_count() {
    let g = unknot_horizontal_geiges(4096);
    let dev = |n| {
        let (c, w) = add_area_lobe_in_window(&g, 0.25, 0.01, n).unwrap();
        vertical_deviation(&g, &c, w)
    };
    let (d8, d16) = (dev(8), dev(16));
    let ratio = d8 / d16;
    assert!((1.6..=2.4).contains(&ratio), "ratio {ratio}");
}

#[test]
fn single_lobe_is_a_reidemeister_one_move() {
    let u = unknot_front(2048);
    let c = add_area_lobe(&u, 0.25, 0.05, 1).unwrap();
    let d = front_diagram(&c, &tol()).unwrap();
    assert_eq!(d.cusps.len(), 4);
    assert_eq!(d.crossings.iter().map(|c| c.sign).collect::<Vec<_>>(), vec![1]);
    assert_eq!(thurston_bennequin(&d), -1);
    assert_eq!(rotation_number(&c, &tol()).unwrap(), 0);
}

#[test]
fn horizontal_lobe_shifts_y() {
    let g = unknot_horizontal_geiges(4096);
    let c4 = lift_horizontal(&g, 0.0, &tol()).unwrap().curve;
    let l = add_area_lobe_horizontal(&c4, 0.25, 0.01, 4, &tol()).unwrap();
    assert!((l.point(0.6)[1] - c4.point(0.6)[1] - 0.01).abs() < 1e-8);
    assert!((l.point(0.1)[1] - c4.point(0.1)[1]).abs() < 1e-12);
}

#[test]
fn area_pair_closes() {
    let g = unknot_horizontal_geiges(4096);
    let pg = add_area_pair(&g, 0.25, 0.75, 0.01, 4).unwrap();
    assert!((total_area(&pg) - total_area(&g)).abs() < 1e-8);
    let c4 = lift_horizontal(&g, 0.0, &tol()).unwrap().curve;
    let pr = add_area_pair_horizontal(&c4, 0.25, 0.75, 0.01, 4, &tol()).unwrap();
    assert!((pr.point(0.9)[1] - c4.point(0.9)[1]).abs() < 1e-8);
    assert!((pr.point(0.5)[1] - c4.point(0.5)[1] - 0.01).abs() < 1e-8);
    assert!(matches!(add_area_pair(&g, 0.25, 0.3, 0.01, 1), Err(Error::WindowOverlap { .. })));
}

#[test]
fn area_pair_stays_within_the_lobe_bound() {
    let g = unknot_horizontal_geiges(4096);
    let pair = add_area_pair(&g, 0.25, 0.75, 0.01, 8).unwrap();
    let (one, wp) = add_area_lobe_in_window(&g, 0.25, 0.01, 8).unwrap();
    let bound = vertical_deviation(&g, &one, wp);
    let (_, wn) = add_area_lobe_in_window(&g, 0.75, -0.01, 8).unwrap();
    let dev = vertical_deviation(&g, &pair, wp).max(vertical_deviation(&g, &pair, wn));
    assert!(dev <= 2.0 * bound, "{dev} vs {bound}");
}

#[test]
fn stabilization_changes_tb_and_rot() {
    let u = unknot_front(2048);
    for s in [1i8, -1] {
        let c = stabilize(&u, s).unwrap();
        let d = front_diagram(&c, &tol()).unwrap();
        assert_eq!(thurston_bennequin(&d), -2);
        assert_eq!(rotation_number(&c, &tol()).unwrap(), s as i64);
        assert_eq!(tb_linking_oracle(&c).unwrap(), -2);
        assert!(parity_check(&c, &tol()).unwrap());
    }
    let c = stabilized(&u, &[1, 1]).unwrap();
    let d = front_diagram(&c, &tol()).unwrap();
    assert_eq!(thurston_bennequin(&d), -3);
    assert_eq!(rotation_number(&c, &tol()).unwrap(), 2);
    assert!(matches!(stabilize(&u, 0), Err(Error::BadParameters(_))));
}

#[test]
fn best_regular_point_is_centred_between_cusps() {
    let u = unknot_front(2048);
    let p = best_regular_point(&u, &[]).unwrap();
    assert!((p - 0.25).abs() < 1e-12 || (p - 0.75).abs() < 1e-12, "{p}");
    let ds = double_stabilization(&u, p, 0.02, &tol()).unwrap();
    assert_eq!(thurston_bennequin(&front_diagram(&ds.curve, &tol()).unwrap()), -3);
}

#[test]
fn double_stabilization_on_the_unknot() {
    let u = unknot_front(2048);
    let d0 = front_diagram(&u, &tol()).unwrap();
    let ds = double_stabilization(&u, 0.25, 0.02, &tol()).unwrap();
    let d = front_diagram(&ds.curve, &tol()).unwrap();
    assert_eq!(thurston_bennequin(&d), thurston_bennequin(&d0) - 2);
    assert_eq!(rotation_number(&ds.curve, &tol()).unwrap(), 0);
    assert_eq!(d.crossings.len(), d0.crossings.len() + 1);
    assert_eq!(d.cusps.len(), d0.cusps.len() + 2);
    assert_eq!(tb_linking_oracle(&ds.curve).unwrap(), -3);
    assert!(ds.report.epsilon_a.abs() >= 0.01);
    assert!((ds.report.epsilon_a.abs() - 0.02).abs() < 1e-8);
    let inst = find_self_intersections(&ds.at_tangency.to_geiges(), &tol()).unwrap();
    let inside: Vec<_> = inst.iter().filter(|s| s.t0 > ds.window.0 && s.t1 < ds.window.1).collect();
    assert_eq!(inside.len(), 1);
    assert!(find_self_intersections(&ds.curve.to_geiges(), &tol()).unwrap().is_empty());
}

#[test]
fn horizontal_double_stabilization_closes() {
    let g = unknot_horizontal_geiges(4096);
    let c4 = lift_horizontal(&g, 0.0, &tol()).unwrap().curve;
    let (ds, rep) = double_stabilization_horizontal(&c4, 0.25, 0.005, None, &tol()).unwrap();
    assert!(total_area(&geiges_project(&ds, &tol()).unwrap()).abs() < 1e-8);
    assert!(rep.epsilon_a.abs() >= 0.0025);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn lobe_area_is_exact(a in -0.05f64..0.05, n in 1usize..6, p in 0.2f64..0.3) {
        let g = unknot_horizontal_geiges(2048);
        let c = add_area_lobe(&g, p, a, n).unwrap();
        prop_assert!((total_area(&c) - total_area(&g) - a).abs() < 1e-8);
    }

    #[test]
    fn reflection_relation(u0 in -0.4f64..0.4, s in -0.8f64..0.8, delta in -0.5f64..0.5) {
        prop_assume!(s.abs() > 0.05);
        let c = shifted_tangency(u0, s, delta);
        let reps = tangency_reports(&c, &tol()).unwrap();
        let reps2 = tangency_reports(&reflect_zw(&c), &tol()).unwrap();
        prop_assert_eq!(reps.len(), reps2.len());
        let total = total_area(&c);
        for (r, r2) in reps.iter().zip(&reps2) {
            prop_assert!((r2.epsilon_a - (r.epsilon_a - total)).abs() < 1e-9);
        }
    }
}
