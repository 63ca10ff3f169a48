//! Cached FFT plans and lattice transforms.
//!
//! Plans are immutable and shared across threads. The forward transform is
//! unnormalized; the inverse divides by the number of sites.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use super::GridSpec;
use crate::par;

type Plan = Arc<dyn Fft<f64>>;

fn plan(len: usize, direction: FftDirection) -> Plan {
    static PLANS: OnceLock<Mutex<HashMap<(usize, bool), Plan>>> = OnceLock::new();
    let key = (len, direction == FftDirection::Forward);
    let mut cache = PLANS
        .get_or_init(|| Mutex::new(HashMap::new()))
        .lock()
        .expect("fft plan cache poisoned");
    cache
        .entry(key)
        .or_insert_with(|| FftPlanner::new().plan_fft(len, direction))
        .clone()
}

const ROWS_PER_TASK: usize = 16;

fn rows(fft: &Plan, data: &mut [Complex64], n: usize) {
    if data.len() == n {
        fft.process(data);
        return;
    }
    par::for_each_chunk_mut(data, n * ROWS_PER_TASK, |_, chunk| fft.process(chunk));
}

fn transpose(src: &[Complex64], dst: &mut [Complex64], n: usize) {
    const B: usize = 32;
    for ib in (0..n).step_by(B) {
        for jb in (0..n).step_by(B) {
            for i in ib..(ib + B).min(n) {
                for j in jb..(jb + B).min(n) {
                    dst[j * n + i] = src[i * n + j];
                }
            }
        }
    }
}

fn transform(grid: &GridSpec, data: &mut [Complex64], direction: FftDirection) {
    let n = grid.points();
    debug_assert_eq!(data.len(), grid.len());
    let fft = plan(n, direction);
    rows(&fft, data, n);
    if grid.particles() == 2 {
        let mut t = vec![Complex64::new(0.0, 0.0); data.len()];
        transpose(data, &mut t, n);
        rows(&fft, &mut t, n);
        transpose(&t, data, n);
    }
}

/// In-place forward transform over every axis of the grid.
pub fn forward(grid: &GridSpec, data: &mut [Complex64]) {
    transform(grid, data, FftDirection::Forward);
}

/// In-place inverse transform, normalized so that `inverse(forward(f)) == f`.
pub fn inverse(grid: &GridSpec, data: &mut [Complex64]) {
    transform(grid, data, FftDirection::Inverse);
    let scale = 1.0 / grid.len() as f64;
    data.iter_mut().for_each(|z| *z *= scale);
}

/// Apply a real multiplier given on the momentum lattice (FFT ordering).
pub fn apply_real_multiplier(grid: &GridSpec, data: &mut [Complex64], multiplier: &[f64]) {
    forward(grid, data);
    data.iter_mut().zip(multiplier).for_each(|(z, &m)| *z *= m);
    inverse(grid, data);
}

/// Apply a complex multiplier given on the momentum lattice.
pub fn apply_complex_multiplier(grid: &GridSpec, data: &mut [Complex64], multiplier: &[Complex64]) {
    forward(grid, data);
    data.iter_mut().zip(multiplier).for_each(|(z, &m)| *z *= m);
    inverse(grid, data);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_dimensional_round_trip() {
        let g = GridSpec::new(2, 16, 3.0).unwrap();
        let orig: Vec<Complex64> = (0..g.len())
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        let mut d = orig.clone();
        forward(&g, &mut d);
        inverse(&g, &mut d);
        let err: f64 = d
            .iter()
            .zip(&orig)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-13);
    }

    #[test]
    fn forward_of_plane_wave_is_a_spike() {
        let g = GridSpec::new(2, 8, 4.0).unwrap();
        let (m0, m1) = (2usize, 5usize);
        let mut d: Vec<Complex64> = (0..g.len())
            .map(|idx| {
                let [i, j] = g.unravel(idx);
                let ph = 2.0 * std::f64::consts::PI * ((m0 * i + m1 * j) as f64) / 8.0;
                Complex64::from_polar(1.0, ph)
            })
            .collect();
        forward(&g, &mut d);
        let peak = m0 * 8 + m1;
        for (idx, z) in d.iter().enumerate() {
            if idx == peak {
                assert!((z.re - 64.0).abs() < 1e-10);
            } else {
                assert!(z.norm() < 1e-10);
            }
        }
    }
}
