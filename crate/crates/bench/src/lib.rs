//! Shared fixtures for the benchmarks.

use hiflab_core::signalgen::{build_catalog, CatalogConfig, ScenarioSpec};

/// `n` samples of a 60 Hz cosine with a fifth harmonic, sampled at `fs`.
pub fn test_wave(n: usize, fs: f64) -> Vec<f64> {
    (0..n)
        .map(|k| {
            let t = k as f64 / fs;
            let w = 2.0 * std::f64::consts::PI * 60.0 * t;
            w.cos() + 0.05 * (5.0 * w + 0.3).cos()
        })
        .collect()
}

/// First fault and first non-fault scenario of the desk catalog.
pub fn sample_specs() -> (ScenarioSpec, ScenarioSpec) {
    let cat = build_catalog(&CatalogConfig::desk()).expect("desk catalog builds");
    (cat.faults[0].clone(), cat.non_faults[0].clone())
}

/// Two overlapping Gaussian-ish columns with labels, deterministic.
pub fn labelled_column(n: usize) -> (Vec<f64>, Vec<usize>) {
    let mut x = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    let mut s: u64 = 0x9e37_79b9_7f4a_7c15;
    for i in 0..n {
        s = s.wrapping_mul(6_364_136_223_846_793_005).wrapping_add(1_442_695_040_888_963_407);
        let u = (s >> 11) as f64 / (1u64 << 53) as f64;
        let class = i % 2;
        x.push(u + class as f64 * 0.6);
        y.push(class);
    }
    (x, y)
}
