use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64;
use scatter_core::lattice::fft;
use scatter_core::par;
use scatter_core::partition::{build_partition, PartitionFields, DEFAULT_SMOOTHING};
use scatter_core::random::{packet_state, Packet};
use scatter_core::spectral::SpectralFilter;
use scatter_core::{GridSpec, ThreeBodyModel};

const MODES: [(&str, bool); 2] = [("parallel", false), ("sequential", true)];

fn grid() -> GridSpec {
    GridSpec::new(2, 256, 64.0).unwrap()
}

fn state() -> scatter_core::WaveFunction {
    packet_state(
        &grid(),
        Packet::new(0.0, 0.5, 4.0),
        Some(Packet::new(5.0, -0.5, 6.0)),
    )
}

fn bench_fft(c: &mut Criterion) {
    let g = grid();
    let mut data: Vec<Complex64> = state().into_amplitudes();
    let mut group = c.benchmark_group("fft_2d_256");
    for (name, seq) in MODES {
        par::force_sequential(seq);
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                fft::forward(&g, black_box(&mut data));
                fft::inverse(&g, black_box(&mut data));
            })
        });
    }
    par::force_sequential(false);
    group.finish();
}

fn bench_apply(c: &mut Criterion) {
    let op = ThreeBodyModel::default()
        .full_hamiltonian()
        .discretize(&grid())
        .unwrap();
    let psi = state();
    let mut group = c.benchmark_group("hamiltonian_apply");
    for (name, seq) in MODES {
        par::force_sequential(seq);
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| op.apply(black_box(&psi)).unwrap())
        });
    }
    par::force_sequential(false);
    group.finish();
}

fn bench_filter(c: &mut Criterion) {
    let g = GridSpec::new(2, 128, 32.0).unwrap();
    let h = ThreeBodyModel::default().full_hamiltonian();
    let filter = SpectralFilter::new(&h, &g, (-0.5, -0.3), 6.0).unwrap();
    let psi = packet_state(
        &g,
        Packet::new(0.0, 0.0, 2.0),
        Some(Packet::new(0.0, 0.0, 4.0)),
    );
    let mut group = c.benchmark_group("spectral_filter");
    group.sample_size(10);
    for (name, seq) in MODES {
        par::force_sequential(seq);
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| filter.apply(black_box(&psi)).unwrap())
        });
    }
    par::force_sequential(false);
    group.finish();
}

fn bench_partition(c: &mut Criterion) {
    let p = build_partition(DEFAULT_SMOOTHING).unwrap();
    let g = grid();
    let mut group = c.benchmark_group("partition_sampling");
    group.sample_size(10);
    for (name, seq) in MODES {
        par::force_sequential(seq);
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| PartitionFields::sample(&p, black_box(&g)).unwrap())
        });
    }
    par::force_sequential(false);
    group.finish();
}

criterion_group!(
    kernels,
    bench_fft,
    bench_apply,
    bench_filter,
    bench_partition
);
criterion_main!(kernels);
