use proptest::prelude::*;
use scatter_core::lattice::{DispersionSymbol, PotentialSpec};
use scatter_core::spectral::{
    dense_spectrum, filter_response, ground_state_imag_time, threshold_table, ThresholdOptions,
    DENSE_LIMIT,
};
use scatter_core::{Error, GridSpec, HamiltonianSpec, ThreeBodyModel};

fn single_well() -> HamiltonianSpec {
    HamiltonianSpec::new(DispersionSymbol::quadratic(1.0, 0)).with_potential(
        PotentialSpec::poschl_teller(2.0, 1.0),
        scatter_core::lattice::CoordTag::X,
    )
}

#[test]
fn single_well_ground_state() {
    let grid = GridSpec::new(1, 256, 32.0).unwrap();
    let dense = dense_spectrum(&single_well(), &grid, 2).unwrap();
    assert!(
        (dense.eigenvalues[0] + 1.0).abs() < 1e-6,
        "{:?}",
        dense.eigenvalues
    );
    assert!(dense.eigenvalues[1] > -1e-3);
    assert!(dense.residuals[0] < 1e-8);
    let it = ground_state_imag_time(&single_well(), &grid, 1e-8).unwrap();
    assert!((it.eigenvalues[0] - dense.eigenvalues[0]).abs() < 1e-7);
}

#[test]
fn dense_refuses_large_grids() {
    let grid = GridSpec::new(2, 128, 16.0).unwrap();
    let err = dense_spectrum(&ThreeBodyModel::default().full_hamiltonian(), &grid, 1).unwrap_err();
    assert!(
        matches!(
            err,
            Error::GridTooLarge {
                limit: DENSE_LIMIT,
                ..
            }
        ),
        "{err}"
    );
}

#[test]
fn default_model_thresholds() {
    let grid = GridSpec::new(1, 256, 32.0).unwrap();
    let table = threshold_table(
        &ThreeBodyModel::default(),
        &grid,
        &ThresholdOptions::default(),
    )
    .unwrap();
    let t = table.thresholds();
    assert!(t.contains(&0.0), "{t:?}");
    assert!((table.lowest() + 1.0).abs() < 1e-2, "{t:?}");
    assert!(table.contains_threshold(-1.5, -0.5));
    assert!(!table.contains_threshold(-0.5, -0.25));
}

proptest! {
    #[test]
    fn filter_response_is_a_smoothed_box(lo in -5.0..5.0f64, w in 0.01..2.0f64, sharp in 2.0..12.0f64, u in -3.0..3.0f64) {
        let hi = lo + w;
        let e = lo + w * u;
        let f = filter_response(e, lo, hi, sharp);
        prop_assert!((-1e-15..=1.0 + 1e-15).contains(&f));
        let mirror = filter_response(lo + hi - e, lo, hi, sharp);
        prop_assert!((f - mirror).abs() < 1e-12);
        if sharp >= 6.0 && (0.0..=1.0).contains(&u) {
            prop_assert!(f >= 0.999, "{f}");
        }
    }
}
