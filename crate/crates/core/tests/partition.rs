use proptest::prelude::*;
use scatter_core::partition::{
    build_partition, verify_partition, DEFAULT_SMOOTHING, MAX_SMOOTHING, MEMBERS,
};
use scatter_core::{ClusterId, Error, GridSpec, ThreeBodyModel};

#[test]
fn smoothing_range_enforced() {
    for w in [0.0, -0.1, MAX_SMOOTHING, 0.5] {
        assert!(
            matches!(build_partition(w), Err(Error::InvalidParameter(_))),
            "{w}"
        );
    }
}

#[test]
fn grid_sampling_is_clean() {
    let p = build_partition(DEFAULT_SMOOTHING).unwrap();
    let grid = GridSpec::new(2, 64, 32.0).unwrap();
    let (fields, report) = verify_partition(&p, &grid, &ThreeBodyModel::default()).unwrap();
    assert!(report.is_clean(), "{:?}", report.violations);
    assert!(report.max_sum_defect < 1e-12);
    assert_eq!(fields.field(ClusterId::Bound).len(), grid.len());
}

#[test]
fn origin_belongs_to_the_bound_member() {
    let p = build_partition(DEFAULT_SMOOTHING).unwrap();
    assert_eq!(p.value(ClusterId::Bound, 0.0, 0.0), 1.0);
    assert_eq!(p.value(ClusterId::ElectronFree, 5.0, 0.0), 1.0);
    assert_eq!(p.value(ClusterId::PhotonFree, 0.0, -5.0), 1.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn squares_sum_to_one(x in -20.0..20.0f64, y in -20.0..20.0f64) {
        let p = build_partition(DEFAULT_SMOOTHING).unwrap();
        let v = p.values(x, y);
        prop_assert!((v.iter().map(|j| j * j).sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(v.iter().all(|j| (0.0..=1.0 + 1e-15).contains(j)));
    }

    #[test]
    fn homogeneous_outside_the_unit_ball(th in 0.0..std::f64::consts::TAU, r in 1.0..5.0f64, lambda in 1.0..20.0f64) {
        let p = build_partition(DEFAULT_SMOOTHING).unwrap();
        let (s, c) = th.sin_cos();
        let a = p.values(r * c, r * s);
        let b = p.values(lambda * r * c, lambda * r * s);
        for i in 0..MEMBERS.len() {
            prop_assert!((a[i] - b[i]).abs() < 1e-12);
        }
    }
}
