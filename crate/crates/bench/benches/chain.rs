//! Throughput of the hot paths: single-frequency chain evaluation, full-band
//! response, noise PSD, impulse response and the sensitivity sweep.

use std::f64::consts::PI;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use paik_core::model::RECEIVER_CHANNELS;
use paik_core::noise::noise_psd;
use paik_core::response::{chain_impulse_response, frequency_response, FrequencyGrid};
use paik_core::sweep::{optimal_cable_length, sweep_grid, Metric, SweepAxes};
use paik_core::transfer::{h1, h2, H1Inputs, Referral, SourceImpedance};
use paik_core::ReadoutChain;

fn single_frequency(c: &mut Criterion) {
    let chain = ReadoutChain::reference();
    let w = 2.0 * PI * 5e6;
    c.bench_function("h2_at_5mhz", |b| b.iter(|| h2(black_box(w), &chain).unwrap()));
    c.bench_function("h1_at_5mhz", |b| {
        b.iter(|| h1(w, &H1Inputs::from_chain(black_box(w), &chain, SourceImpedance::Za).unwrap()).unwrap())
    });
}

fn full_band(c: &mut Criterion) {
    let chain = ReadoutChain::reference();
    let mut g = c.benchmark_group("full_band");
    for n in [200usize, 2000] {
        let grid = FrequencyGrid::new(20e3, 20e6, n).unwrap();
        g.bench_with_input(BenchmarkId::new("response", n), &grid, |b, grid| {
            b.iter(|| frequency_response(&chain, grid, Referral::Pressure).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("noise_psd", n), &grid, |b, grid| {
            b.iter(|| noise_psd(&chain, grid, 293.0).unwrap())
        });
    }
    g.finish();
    c.bench_function("impulse_100mhz", |b| {
        b.iter(|| chain_impulse_response(&chain, 100e6, 1024, Referral::Pressure).unwrap())
    });
}

fn sweeps(c: &mut Criterion) {
    let chain = ReadoutChain::reference();
    let axes = SweepAxes {
        areas: [1.5e-3, 2e-3, 3e-3, 4e-3].iter().map(|d: &f64| PI * d * d / 4.0).collect(),
        cable_lengths: vec![1.5, 2.0, 2.5, 3.0, 3.5],
        receiver_impedances: RECEIVER_CHANNELS.to_vec(),
    };
    let metric = Metric::H1MagAtF {
        freq_hz: 5e6,
        source: SourceImpedance::Za,
    };
    c.bench_function("sweep_80_cells_h1", |b| b.iter(|| sweep_grid(&chain, &axes, &metric).unwrap()));
    let ch4 = chain.with_receiver_impedance(RECEIVER_CHANNELS[3]).unwrap();
    c.bench_function("cable_optimum", |b| {
        b.iter(|| optimal_cable_length(&ch4, 1.5, 3.5, 5e6, SourceImpedance::Za).unwrap())
    });
}

criterion_group!(benches, single_frequency, full_band, sweeps);
criterion_main!(benches);
