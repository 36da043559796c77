use legendre_core::diskcalc::*;
use proptest::prelude::*;

#[test]
fn area_twist_disk_values() {
    let d = area_twist_disk();
    assert_eq!(area_invariant(&d), 1);
    assert_eq!(obstructed_curves(&d), vec![0]);
    assert_eq!(min_zero_parity(&d), 1);
    assert_eq!(d.curves[0].zeros, Some(1));
}

#[test]
fn parity_identity_exhaustive() {
    let all = enumerate_diagrams(4, 3);
    assert!(all.len() > 10_000);
    for d in &all {
        d.validate().unwrap();
        assert_eq!(area_invariant(d), min_zero_parity(d));
        if area_invariant(d) == 1 {
            assert!(!obstructed_curves(d).is_empty());
        }
    }
}

#[test]
fn every_move_preserves_area_on_random_diagrams() {
    let mut applied = [0usize; 7];
    for seed in 0..1000 {
        let d = random_diagram(seed, 5);
        d.validate().unwrap();
        let area = area_invariant(&d);
        for (k, mv) in Move::ALL.iter().enumerate() {
            for site in sites(&d, *mv) {
                let e = elementary_change(&d, &site).unwrap();
                assert_eq!(site.kind(), *mv);
                assert_eq!(area_invariant(&e), area, "{site:?} on seed {seed}");
                assert_eq!(e.boundary_count() % 2, 0);
                applied[k] += 1;
            }
        }
    }
    assert!(applied.iter().all(|&n| n > 0), "{applied:?}");
}

#[test]
fn random_diagrams_are_deterministic_and_valid() {
    assert_eq!(random_diagram(7, 6), random_diagram(7, 6));
    assert_eq!(random_diagram(7, 0), DiskDiagram::default());
    for seed in 0..1000 {
        let d = random_diagram(seed, 6);
        assert!(d.curves.len() <= 6);
        d.validate().unwrap();
    }
}

#[test]
fn closed_birth_keeps_area() {
    let d = area_twist_disk();
    let e = elementary_change(&d, &Change::ClosedBirth).unwrap();
    assert_eq!(e.curves.len(), 2);
    assert_eq!(area_invariant(&e), 1);
    let back = elementary_change(&e, &Change::ClosedDeath { curve: 1 }).unwrap();
    assert_eq!(back, d);
}

#[test]
fn inapplicable_moves_are_rejected() {
    let d = area_twist_disk();
    assert!(elementary_change(&d, &Change::CuspPairDeath { curve: 0 }).is_err());
    assert!(elementary_change(&d, &Change::BoundaryDeath { curve: 0 }).is_err());
    assert!(elementary_change(&d, &Change::CuspExit { curve: 0, end: 0 }).is_err());
    assert!(elementary_change(&d, &Change::ClosedDeath { curve: 3 }).is_err());
}

proptest! {
    #[test]
    fn parity_identity_random(seed in any::<u64>(), size in 0usize..10) {
        let d = random_diagram(seed, size);
        prop_assert_eq!(area_invariant(&d), min_zero_parity(&d));
    }

    #[test]
    fn random_walks_keep_area(seed in any::<u64>(), steps in proptest::collection::vec((0usize..7, any::<u16>()), 1..20)) {
        let mut d = random_diagram(seed, 4);
        let area = area_invariant(&d);
        for (m, pick) in steps {
            let s = sites(&d, Move::ALL[m]);
            if s.is_empty() {
                continue;
            }
            d = elementary_change(&d, &s[pick as usize % s.len()]).unwrap();
            prop_assert_eq!(area_invariant(&d), area);
        }
    }
}
