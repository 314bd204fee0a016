use gmoat_core::arith::{sieve_octant, NormSegment};
use gmoat_core::paths::*;
use gmoat_core::GapModel;
use proptest::prelude::*;

fn seg(lo: u64, hi: u64) -> NormSegment {
    NormSegment::new(lo, hi).unwrap()
}

#[test]
fn cramer_hundred_to_thousand_golden() {
    let d = build_paths(seg(100, 1000), GapModel::cramer(1.0)).unwrap();
    let audit = audit_decomposition(&d).unwrap();
    assert!(audit.hard_invariants_hold());
    assert_eq!(audit.path_count, 67);
    let mut sizes = vec![2, 1, 2];
    sizes.resize(67, 1);
    assert_eq!(audit.sizes, sizes);
    assert_eq!(audit.adjacent_increases, vec![2]);
    assert_eq!(audit.size_inversions, 1);
    assert!(!audit.monotone);
}

#[test]
fn triangle_golden_two_decades() {
    let d = build_paths(seg(100, 10_000), GapModel::cramer(1.0)).unwrap();
    assert_eq!(d.count(), 431);
    let t = triangle_audit(&d, 10.0).unwrap();
    assert_eq!(t.records.len(), 167);
    // Cramér steps exceed (ln 100)^2 > 21, so no step fits under M = 10.
    assert_eq!(t.within_bound, 0);
    assert_eq!(t.witnesses, 0);
    assert!(t.max_cosine_residual <= 1e-6);
}

#[test]
fn tampered_decompositions_are_caught() {
    let d = build_paths(seg(100, 10_000), GapModel::rh(0.05)).unwrap();
    let primes = sieve_octant(d.segment, false).unwrap();
    assert!(audit_against(&d, &primes).hard_invariants_hold());

    let mut dup = d.clone();
    let extra = dup.paths[1].members[0];
    dup.paths[0].members.push(extra);
    let a = audit_against(&dup, &primes);
    assert!(!a.disjoint);
    assert!(!a.hard_invariants_hold());

    let mut missing = d.clone();
    missing.paths.last_mut().unwrap().members.pop();
    assert!(!audit_against(&missing, &primes).coverage);

    let mut swapped = d.clone();
    let long = swapped.paths.iter_mut().find(|p| p.len() >= 2).unwrap();
    long.members.swap(0, 1);
    let a = audit_against(&swapped, &primes);
    assert!(a.norm_increase_violations > 0);
}

#[test]
fn bound_kinds() {
    let bhp = path_count_bound(gmoat_core::GapKind::Bhp, 4, 1.0, 0.025, 0.0).unwrap();
    assert!((bhp.bound_value - 1.27 * 10f64.powf(2.025) / 4.0).abs() < 1e-9);
    let with_e = path_count_bound(gmoat_core::GapKind::Cramer, 4, 2.0, 0.0, 3.5).unwrap();
    assert!((with_e.bound_value - (1.27 * 2.0 * 4.0 + 3.5)).abs() < 1e-12);
    assert!(path_count_bound(gmoat_core::GapKind::Const, 4, 1.0, 0.0, 0.0).is_err());
    assert!(path_count_bound(gmoat_core::GapKind::Rh, 0, 1.0, 0.0, 0.0).is_err());
}

#[test]
fn isolation_of_small_primes() {
    let p = gmoat_core::GaussianPrime::new(1, 1).unwrap();
    match isolation_radius(&p, 5.0).unwrap() {
        Isolation::Nearest { dist_squared, .. } => assert_eq!(dist_squared, 1),
        other => panic!("{other:?}"),
    }
    // 2 + 0i is not prime, so an isolated search needs a real prime.
    assert!(gmoat_core::GaussianPrime::new(2, 0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn every_model_yields_a_valid_partition(
        lo in 2u64..50_000,
        width in 10u64..5_000,
        kind in 0usize..4,
        c in 0.05f64..2.0,
    ) {
        let model = match kind {
            0 => GapModel::rh(c),
            1 => GapModel::cramer(c),
            2 => GapModel::bhp(0.025),
            _ => GapModel::constant(c * 5.0),
        };
        let d = build_paths(seg(lo, lo + width), model).unwrap();
        let audit = audit_decomposition(&d).unwrap();
        prop_assert!(audit.hard_invariants_hold());
        prop_assert_eq!(audit.prime_count, sieve_octant(d.segment, false).unwrap().len());
        // The first member of each path is the earliest prime not yet used.
        let firsts: Vec<_> = d.paths.iter().map(|p| p.members[0]).collect();
        prop_assert!(firsts.windows(2).all(|w| w[0] < w[1]));
    }
}
