use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use hiflab_bench::{labelled_column, sample_specs, test_wave};
use hiflab_core::detector::{run_detector, DetectorConfig};
use hiflab_core::extraction::{assemble_features, full_cycle_dft, kf_step, ExtractionConfig, KfConfig, KfState};
use hiflab_core::ranking::{discretize, mdl_score, ContingencyTable, DiscretizeConfig};
use hiflab_core::signalgen::{synth_event, GridConfig};

fn dft(c: &mut Criterion) {
    let w = test_wave(32, 1920.0);
    c.bench_function("dft_fundamental_1920hz", |b| b.iter(|| full_cycle_dft(black_box(&w), 1, 60.0, 1920.0).unwrap()));
}

fn kalman(c: &mut Criterion) {
    let w = test_wave(2000, 2000.0);
    let cfg = KfConfig::default();
    c.bench_function("kf_2000_steps", |b| {
        b.iter(|| {
            let mut s = KfState::new(&cfg);
            for (k, &x) in w.iter().enumerate() {
                s = kf_step(&s, x, k as f64 / 2000.0, 60.0).unwrap();
            }
            s
        })
    });
}

fn synth_and_extract(c: &mut Criterion) {
    let (fault, _) = sample_specs();
    let grid = GridConfig::default();
    let rec = synth_event(&fault, &grid).unwrap();
    let ext = ExtractionConfig::default();
    let mut g = c.benchmark_group("record");
    g.sample_size(10);
    g.bench_function("synth_event", |b| b.iter(|| synth_event(black_box(&fault), &grid).unwrap()));
    g.bench_function("assemble_features", |b| b.iter(|| assemble_features(black_box(&rec), &ext).unwrap()));
    g.bench_function("run_detector", |b| b.iter(|| run_detector(black_box(&rec), &DetectorConfig::default()).unwrap()));
    g.finish();
}

fn mdl(c: &mut Criterion) {
    let table = ContingencyTable::new(vec![vec![120, 40, 9, 3], vec![7, 33, 80, 150]]).unwrap();
    c.bench_function("mdl_score_2x4", |b| b.iter(|| mdl_score(black_box(&table)).unwrap()));
    let (x, y) = labelled_column(2000);
    let cfg = DiscretizeConfig::default();
    c.bench_function("discretize_2000", |b| b.iter(|| discretize(black_box(&x), &y, 2, &cfg).unwrap()));
}

criterion_group!(benches, dft, kalman, synth_and_extract, mdl);
criterion_main!(benches);
