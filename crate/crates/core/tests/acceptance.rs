use legendre_core::selftest::limits::*;
use legendre_core::selftest::{run_criterion, CRITERIA, KALMAN_T0};

fn main() {
    // thresholds of the suite, pinned
    assert_eq!(DEGREE_DEFECT, 0.05);
    assert_eq!(DEGREE_GRID, 256);
    assert_eq!(ZERO_AREA, 1e-9);
    assert_eq!(ZERO_AREA_RESOLUTION, 4096);
    assert_eq!(LOBE_AREA, 1e-8);
    assert_eq!(DEVIATION_RATIO, (1.6, 2.4));
    assert_eq!(RANDOM_DIAGRAMS, 1000);
    assert_eq!((EXHAUSTIVE_CURVES, EXHAUSTIVE_CUSPS), (4, 3));
    assert_eq!(MIN_TB_CURVES, 20);
    assert_eq!(DS_AREA_FRACTION, 0.5);
    assert_eq!(SEEDED_INSTANCES, 10);
    assert_eq!(BUDGETS, [(1, 60.0), (2, 60.0), (4, 10.0), (5, 10.0), (6, 5.0), (8, 120.0)]);
    assert_eq!(KALMAN_T0, 0.0);

    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for id in 1..=CRITERIA {
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        let r = run_criterion(id);
        println!("{r}");
        if !r.passed {
            failed += 1;
        }
    }
    println!("acceptance: {failed} criteria failed");
    if failed > 0 {
        std::process::exit(1);
    }
}
