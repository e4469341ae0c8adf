//! Synthetic minority over-sampling.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::seed;

/// Per-feature mean and standard deviation; zero spreads map to 1.
#[derive(Clone, Debug, PartialEq)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Standardizer {
    pub fn fit(points: &[Vec<f64>]) -> Self {
        let d = points.first().map_or(0, Vec::len);
        let n = points.len().max(1) as f64;
        let mut mean = vec![0.0; d];
        for p in points {
            for (m, x) in mean.iter_mut().zip(p) {
                *m += x / n;
            }
        }
        let mut std = vec![0.0; d];
        for p in points {
            for ((s, x), m) in std.iter_mut().zip(p).zip(&mean) {
                *s += (x - m).powi(2) / n;
            }
        }
        for s in &mut std {
            *s = s.sqrt();
            if !(*s > 0.0) {
                *s = 1.0;
            }
        }
        Self { mean, std }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.mean).zip(&self.std).map(|((x, m), s)| (x - m) / s).collect()
    }
}

pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum()
}

/// Indices of the `k` nearest other points, nearest first (ties by index).
pub(crate) fn nearest(points: &[Vec<f64>], i: usize, k: usize) -> Vec<usize> {
    let mut d: Vec<(f64, usize)> =
        (0..points.len()).filter(|&j| j != i).map(|j| (sq_dist(&points[i], &points[j]), j)).collect();
    d.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    d.into_iter().take(k).map(|(_, j)| j).collect()
}

/// `amount_pct / 100` synthetic points per minority point; a fractional
/// remainder is drawn from a random subset of the points.
pub fn smote_oversample(minority: &[Vec<f64>], k: usize, amount_pct: f64, seed: u64) -> Result<Vec<Vec<f64>>> {
    if k == 0 {
        return Err(Error::Config("SMOTE needs k ≥ 1".into()));
    }
    if !(amount_pct >= 0.0) || !amount_pct.is_finite() {
        return Err(Error::Config(format!("SMOTE amount {amount_pct}% must be finite and non-negative")));
    }
    if minority.len() <= k {
        return Err(Error::Neighbor { have: minority.len(), k });
    }
    let scaler = Standardizer::fit(minority);
    let scaled: Vec<Vec<f64>> = minority.iter().map(|p| scaler.apply(p)).collect();
    let neighbors: Vec<Vec<usize>> = (0..minority.len()).map(|i| nearest(&scaled, i, k)).collect();

    let mut rng = seed::rng(seed);
    let whole = (amount_pct / 100.0).floor() as usize;
    let extra = ((amount_pct / 100.0 - whole as f64) * minority.len() as f64).round() as usize;
    let mut sources: Vec<usize> = (0..minority.len()).flat_map(|i| std::iter::repeat_n(i, whole)).collect();
    let mut pool: Vec<usize> = (0..minority.len()).collect();
    pool.shuffle(&mut rng);
    sources.extend(pool.into_iter().take(extra));

    let mut out = Vec::with_capacity(sources.len());
    for i in sources {
        let nn = neighbors[i][rng.random_range(0..k)];
        let lambda: f64 = loop {
            let l = rng.random::<f64>();
            if l > 0.0 {
                break l;
            }
        };
        let x = &minority[i];
        out.push(x.iter().zip(&minority[nn]).map(|(a, b)| a + lambda * (b - a)).collect());
    }
    Ok(out)
}
