use std::hint::black_box;

use afc_core::metrics::evaluate;
use afc_core::response::{compensation_params, mafc_response, optimize_compensation, pv_hilbert, CompensationCriterion};
use afc_core::{Complex64, DetuningGrid, LineShape, MediumResponse, ProfileRole, SampledProfile, SignalSpec, TransferSpectrum};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn hilbert(c: &mut Criterion) {
    let mut group = c.benchmark_group("pv_hilbert");
    let g = LineShape::gaussian(1.0).unwrap();
    for n in [501usize, 2001] {
        let grid = DetuningGrid::symmetric(4.0, n).unwrap();
        let profile = SampledProfile::sample(&g, 0.0, grid, ProfileRole::Envelope);
        group.bench_with_input(BenchmarkId::from_parameter(n), &profile, |b, p| b.iter(|| pv_hilbert(black_box(p))));
    }
    group.finish();
}

fn metrics(c: &mut Criterion) {
    let grid = DetuningGrid::with_spacing(3.0, 0.002).unwrap();
    let kappa = Complex64::new(1.0, 0.0);
    let afc = TransferSpectrum::from_response(&MediumResponse::rect_afc_closed(grid, f64::INFINITY).unwrap(), kappa);
    let signal = SignalSpec::gaussian(0.5, 0.0, grid).unwrap();
    c.bench_function("transfer_from_mafc_response", |b| {
        b.iter(|| {
            let m = mafc_response(&compensation_params(0.01), grid, black_box(20.0)).unwrap();
            TransferSpectrum::from_response(&m, kappa)
        })
    });
    c.bench_function("evaluate_rect_afc", |b| b.iter(|| evaluate(black_box(&afc), black_box(&signal)).unwrap()));
}

fn optimizer(c: &mut Criterion) {
    let mut group = c.benchmark_group("optimize_compensation");
    group.sample_size(10);
    for (name, criterion) in [("low_order", CompensationCriterion::LowOrder), ("minimax", CompensationCriterion::Minimax)] {
        group.bench_function(name, |b| b.iter(|| optimize_compensation(black_box(0.25), 0.01, criterion).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, hilbert, metrics, optimizer);
criterion_main!(benches);
