use proptest::prelude::*;
use scatter_core::commutator::{continuum_edge, integrate, sqrt_lemma_eval};

fn brute_edge(s: f64) -> f64 {
    let f = |p: f64| (p + s) * (p + s) / 4.0 + (p - s).abs() / 2.0;
    (-70_000..=70_000)
        .map(|i| f(s + i as f64 * 1e-4))
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn sqrt_lemma_rejects_bad_input() {
    assert!(sqrt_lemma_eval(-1.0, 1e-9).is_err());
    assert!(sqrt_lemma_eval(f64::INFINITY, 1e-9).is_err());
    assert_eq!(sqrt_lemma_eval(0.0, 1e-9).unwrap(), 0.0);
}

#[test]
fn quadrature_of_a_polynomial() {
    let (v, err) = integrate(|x| 3.0 * x * x, 0.0, 2.0, 1e-12, 10_000).unwrap();
    assert!((v - 8.0).abs() < 1e-12 && err <= 1e-12);
}

#[test]
fn edge_is_continuous_at_the_kink() {
    assert!((continuum_edge(0.5) - continuum_edge(0.5 + 1e-12)).abs() < 1e-11);
    assert_eq!(continuum_edge(0.0), 0.0);
}

proptest! {
    #[test]
    fn sqrt_lemma_recovers_k(k in 0.01..50.0f64) {
        let v = sqrt_lemma_eval(k, 1e-10).unwrap();
        prop_assert!((v - k).abs() <= 1e-8 * k, "{k} {v}");
    }

    #[test]
    fn edge_matches_brute_force(s in -3.0..3.0f64) {
        prop_assert!((continuum_edge(s) - brute_edge(s)).abs() < 1e-6);
    }

    #[test]
    fn edge_is_even_and_below_s_squared(s in -10.0..10.0f64) {
        prop_assert_eq!(continuum_edge(s), continuum_edge(-s));
        prop_assert!(continuum_edge(s) <= s * s + 1e-15);
    }
}
