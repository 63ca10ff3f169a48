use num_complex::Complex64;
use proptest::prelude::*;
use scatter_core::lattice::{cluster_coordinates, dump, fft};
use scatter_core::{ClusterId, Error, GridSpec, ThreeBodyModel, WaveFunction};

fn amplitudes(len: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), len).prop_map(|v| {
        v.into_iter()
            .map(|(re, im)| Complex64::new(re, im))
            .collect()
    })
}

fn state(grid: GridSpec) -> impl Strategy<Value = WaveFunction> {
    amplitudes(grid.len()).prop_map(move |a| WaveFunction::new(grid, a).unwrap())
}

fn small_grid() -> GridSpec {
    GridSpec::new(2, 16, 6.0).unwrap()
}

fn model_grid() -> GridSpec {
    GridSpec::new(2, 32, 16.0).unwrap()
}

#[test]
fn grid_rejects_bad_shapes() {
    for (p, n, l) in [
        (0, 16, 1.0),
        (3, 16, 1.0),
        (1, 12, 1.0),
        (1, 4, 1.0),
        (1, 16, 0.0),
        (1, 16, f64::NAN),
    ] {
        assert!(
            matches!(GridSpec::new(p, n, l), Err(Error::InvalidGrid(_))),
            "{p} {n} {l}"
        );
    }
}

#[test]
fn wrong_amplitude_count_rejected() {
    assert!(WaveFunction::new(small_grid(), vec![Complex64::new(1.0, 0.0); 10]).is_err());
}

#[test]
fn truncated_dump_rejected() {
    let psi = WaveFunction::from_fn(small_grid(), |x, y| {
        Complex64::new((-x * x - y * y).exp(), 0.0)
    });
    let mut buf = Vec::new();
    dump::write_dump(&psi, &mut buf).unwrap();
    assert!(dump::read_dump(&buf[..buf.len() - 8]).is_err());
    buf[0] = b'X';
    assert!(matches!(dump::read_dump(&buf[..]), Err(Error::Format(_))));
}

#[test]
fn dump_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("psi.bin");
    let psi = WaveFunction::from_fn(small_grid(), Complex64::new);
    dump::save(&psi, &path).unwrap();
    assert_eq!(dump::load(&path).unwrap(), psi);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fft_round_trip(a in amplitudes(256)) {
        let grid = small_grid();
        let mut data = a.clone();
        fft::forward(&grid, &mut data);
        fft::inverse(&grid, &mut data);
        for (u, v) in data.iter().zip(&a) {
            prop_assert!((u - v).norm() < 1e-12);
        }
    }

    #[test]
    fn momentum_round_trip(psi in state(small_grid())) {
        let back = WaveFunction::from_momentum(*psi.grid(), psi.to_momentum()).unwrap();
        prop_assert!(back.sub(&psi).norm() < 1e-12 * (1.0 + psi.norm()));
    }

    #[test]
    fn hamiltonian_is_symmetric(phi in state(model_grid()), psi in state(model_grid())) {
        let op = ThreeBodyModel::default().full_hamiltonian().discretize(&model_grid()).unwrap();
        let left = phi.inner(&op.apply(&psi).unwrap());
        let right = op.apply(&phi).unwrap().inner(&psi);
        prop_assert!((left - right).norm() < 1e-10 * (1.0 + left.norm()));
    }

    #[test]
    fn energy_inside_spectral_bounds(psi in state(model_grid())) {
        let op = ThreeBodyModel::default().full_hamiltonian().discretize(&model_grid()).unwrap();
        let (lo, hi) = op.spectral_bounds();
        let e = op.energy(&psi.normalized()).unwrap();
        prop_assert!(e >= lo - 1e-9 && e <= hi + 1e-9, "{lo} {e} {hi}");
    }

    #[test]
    fn dump_round_trip(psi in state(small_grid())) {
        let mut buf = Vec::new();
        dump::write_dump(&psi, &mut buf).unwrap();
        prop_assert_eq!(dump::read_dump(&buf[..]).unwrap(), psi);
    }

    #[test]
    fn pair_chart_inverts(x in -50.0..50.0f64, y in -50.0..50.0f64) {
        let c = cluster_coordinates(ClusterId::Pair, [x, y]);
        let (e, i) = (c.external[0], c.internal[0]);
        prop_assert!(((e + i) / 2.0 - x).abs() < 1e-12);
        prop_assert!(((e - i) / 2.0 - y).abs() < 1e-12);
    }
}
