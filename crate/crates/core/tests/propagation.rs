use proptest::prelude::*;
use scatter_core::propagation::{
    channel_cutoff, smooth_below, ChannelConvention, CutoffSpec, Propagator, PropagatorSpec,
    SpectralHypotheses, TraceSeries,
};
use scatter_core::random::{packet_state, Packet};
use scatter_core::{ClusterId, Error, GridSpec, ThreeBodyModel};

fn grid() -> GridSpec {
    GridSpec::new(2, 64, 32.0).unwrap()
}

#[test]
fn cutoff_parameters_validated() {
    assert!(CutoffSpec::new(0.3, 0.1, 0.6).is_ok());
    for (d, e, m) in [
        (0.1, 0.1, 0.6),
        (0.3, 0.0, 0.6),
        (0.3, 0.1, 0.5),
        (f64::NAN, 0.1, 0.6),
    ] {
        assert!(
            matches!(CutoffSpec::new(d, e, m), Err(Error::InvalidParameter(_))),
            "{d} {e} {m}"
        );
    }
}

#[test]
fn channel_cutoff_rejects_bad_inputs() {
    let c = CutoffSpec::new(0.3, 0.1, 0.6).unwrap();
    let g = grid();
    assert!(matches!(
        channel_cutoff(&g, ClusterId::Bound, 2.0, &c, ChannelConvention::Internal),
        Err(Error::NotTwoCluster(_))
    ));
    assert!(channel_cutoff(&g, ClusterId::Pair, 0.5, &c, ChannelConvention::Internal).is_err());
    let one = GridSpec::new(1, 64, 32.0).unwrap();
    assert!(channel_cutoff(&one, ClusterId::Pair, 2.0, &c, ChannelConvention::Internal).is_err());
}

#[test]
fn channel_cutoff_follows_the_chart() {
    let c = CutoffSpec::new(0.3, 0.1, 0.6).unwrap();
    let g = grid();
    let f = channel_cutoff(
        &g,
        ClusterId::PhotonFree,
        4.0,
        &c,
        ChannelConvention::Internal,
    )
    .unwrap();
    for (i, v) in f.iter().enumerate() {
        assert!((0.0..=1.0).contains(v));
        let [x, _] = g.site(i);
        if x.abs() < 0.5 {
            assert!(*v > 0.99, "{x} {v}");
        }
        if x.abs() > 3.0 {
            assert!(*v < 1e-6, "{x} {v}");
        }
    }
}

#[test]
fn hypotheses_reject_threshold_windows() {
    let h = SpectralHypotheses {
        thresholds: vec![-1.0, 0.0],
        eigenvalues: vec![-1.79],
        mourre_constant: None,
        enforce: true,
    };
    assert!(h
        .window_violation((-1.2, -0.8))
        .unwrap()
        .contains("threshold"));
    assert!(h.window_violation((-1.9, -1.7)).is_some());
    assert!(h.window_violation((-0.5, -0.25)).is_none());
}

#[test]
fn trace_csv_layout() {
    let mut t = TraceSeries::new("norm");
    t.push(0.0, 1.0);
    t.push(0.5, 0.25);
    t.meta("dt", 0.05);
    assert!(t.is_well_formed());
    assert_eq!(t.at(0.4), Some(0.25));
    let mut csv = Vec::new();
    t.write_csv(&mut csv).unwrap();
    assert_eq!(
        String::from_utf8(csv).unwrap(),
        "t,norm\n0.0,1.0\n0.5,0.25\n"
    );
    let mut side = Vec::new();
    t.write_sidecar(&mut side).unwrap();
    assert_eq!(
        String::from_utf8(side).unwrap(),
        "label = norm\nsamples = 2\ndt = 0.05\n"
    );
}

#[test]
fn nonpositive_time_step_rejected() {
    let spec = PropagatorSpec::new(ThreeBodyModel::default().full_hamiltonian(), 0.0);
    assert!(Propagator::new(&spec, &grid()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn smooth_below_is_a_decreasing_step(u in -10.0..10.0f64, du in 0.0..5.0f64, thr in -2.0..2.0f64, w in 0.01..1.0f64) {
        let a = smooth_below(u, thr, w);
        let b = smooth_below(u + du, thr, w);
        prop_assert!(b <= a + 1e-15 && (0.0..=1.0).contains(&a));
        prop_assert!((smooth_below(thr, thr, w) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn evolution_is_unitary_and_reversible(
        cx in -4.0..4.0f64, cy in -4.0..4.0f64, kx in -1.0..1.0f64, ky in -1.0..1.0f64, dt in 0.01..0.1f64,
    ) {
        let g = grid();
        let psi0 = packet_state(&g, Packet::new(cx, kx, 2.0), Some(Packet::new(cy, ky, 2.0)));
        let spec = PropagatorSpec::new(ThreeBodyModel::default().full_hamiltonian(), dt);
        let fwd = Propagator::new(&spec, &g).unwrap();
        let bwd = Propagator::backward(&spec, &g).unwrap();
        let mut psi = psi0.clone();
        for _ in 0..20 {
            fwd.step(&mut psi);
        }
        prop_assert!((psi.norm() - 1.0).abs() < 1e-12);
        prop_assert!(psi.sub(&psi0).norm() > 1e-6);
        for _ in 0..20 {
            bwd.step(&mut psi);
        }
        prop_assert!(psi.sub(&psi0).norm() < 1e-10);
    }
}
