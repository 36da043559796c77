use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use legendre_core::curves::{figure_eight, torus_knot, unknot_front};
use legendre_core::degree::{builtin_map, degree_integral};
use legendre_core::diskcalc::{area_invariant, elementary_change, random_diagram, sites, Move};
use legendre_core::invariants::{front_diagram, polygon_linking, projected_linking};
use legendre_core::{find_self_intersections, Tolerances};
use nalgebra::Vector3;

fn degree(c: &mut Criterion) {
    let mut g = c.benchmark_group("degree_integral");
    g.sample_size(10);
    let m = builtin_map("antipodal_s2").unwrap();
    for n in [64, 128, 256] {
        g.bench_with_input(BenchmarkId::new("antipodal_s2", n), &n, |b, &n| b.iter(|| degree_integral(&m, n)));
    }
    let m = builtin_map("antipodal_s3").unwrap();
    g.bench_function("antipodal_s3/32", |b| b.iter(|| degree_integral(&m, 32)));
    g.finish();
}

fn intersections(c: &mut Criterion) {
    let tol = Tolerances::default();
    let mut g = c.benchmark_group("self_intersections");
    g.sample_size(20);
    for n in [1024, 4096, 16384] {
        let f = figure_eight(n).to_geiges();
        g.bench_with_input(BenchmarkId::new("figure_eight", n), &f, |b, f| b.iter(|| find_self_intersections(f, &tol).unwrap()));
    }
    g.finish();
}

fn fronts(c: &mut Criterion) {
    let tol = Tolerances::default();
    let mut g = c.benchmark_group("front_diagram");
    g.sample_size(10);
    let u = unknot_front(4096);
    g.bench_function("unknot_front/4096", |b| b.iter(|| front_diagram(&u, &tol).unwrap()));
    let t = torus_knot(2, 3, 4096);
    g.bench_function("torus_knot(2,3)/4096", |b| b.iter(|| front_diagram(&t, &tol).unwrap()));
    g.finish();
}

fn linking(c: &mut Criterion) {
    let mut g = c.benchmark_group("linking");
    g.sample_size(10);
    let pts = torus_knot(2, 3, 1024).to_contact().sample_points();
    let push: Vec<_> = pts.iter().map(|p| p + Vector3::new(0.0, 0.0, 1e-3)).collect();
    g.bench_function("gauss_sum/1024", |b| b.iter(|| polygon_linking(black_box(&pts), &push)));
    g.bench_function("projected/1024", |b| b.iter(|| projected_linking(black_box(&pts), &push)));
    g.finish();
}

fn diskcalc(c: &mut Criterion) {
    let diagrams: Vec<_> = (0..100).map(|s| random_diagram(s, 5)).collect();
    c.bench_function("diskcalc/all_moves_100_diagrams", |b| {
        b.iter(|| {
            let mut n = 0u32;
            for d in &diagrams {
                for mv in Move::ALL {
                    for s in sites(d, mv) {
                        n += area_invariant(&elementary_change(d, &s).unwrap()) as u32;
                    }
                }
            }
            n
        })
    });
}

criterion_group!(benches, degree, intersections, fronts, linking, diskcalc);
criterion_main!(benches);
