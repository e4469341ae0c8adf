//! Supervised discretization: recursive entropy-minimizing binary cuts with
//! an MDL stopping rule, falling back to equal-frequency bins.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DiscretizeConfig {
    /// Bin count used when no supervised cut is accepted.
    pub fallback_bins: usize,
}

impl Default for DiscretizeConfig {
    fn default() -> Self {
        Self { fallback_bins: 10 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteAttribute {
    /// Bin index per instance, dense in [0, n_bins).
    pub bins: Vec<usize>,
    /// Cut points, strictly increasing; bin k holds values in (edges[k-1], edges[k]].
    pub edges: Vec<f64>,
    /// True when the supervised search accepted no cut.
    pub fallback: bool,
}

impl DiscreteAttribute {
    pub fn n_bins(&self) -> usize {
        self.edges.len() + 1
    }
}

/// Bin index of `x` against sorted cut points.
pub fn bin_of(edges: &[f64], x: f64) -> usize {
    edges.partition_point(|&e| e < x)
}

fn entropy(counts: &[usize], n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    counts
        .iter()
        .filter(|&&k| k > 0)
        .map(|&k| {
            let p = k as f64 / n;
            -p * p.log2()
        })
        .sum()
}

fn distinct(counts: &[usize]) -> usize {
    counts.iter().filter(|&&k| k > 0).count()
}

/// Midpoint between two distinct neighbours that sorts strictly below `hi`.
fn cut_between(lo: f64, hi: f64) -> f64 {
    let m = lo + (hi - lo) / 2.0;
    if m < hi {
        m
    } else {
        lo
    }
}

struct Search<'a> {
    values: &'a [f64],
    classes: &'a [usize],
    n_classes: usize,
    /// prefix[i][c] = count of class c among the first i sorted instances.
    prefix: Vec<Vec<usize>>,
}

impl Search<'_> {
    fn counts(&self, lo: usize, hi: usize) -> Vec<usize> {
        (0..self.n_classes).map(|c| self.prefix[hi][c] - self.prefix[lo][c]).collect()
    }

    /// Recursively cut the sorted range [lo, hi), pushing accepted cut
    /// positions (index of the first element right of the cut).
    fn split(&self, lo: usize, hi: usize, cuts: &mut Vec<usize>) {
        let n = hi - lo;
        if n < 2 {
            return;
        }
        let total = self.counts(lo, hi);
        let h_s = entropy(&total, n);
        if h_s == 0.0 {
            return;
        }
        let mut best: Option<(f64, usize)> = None;
        for i in lo + 1..hi {
            if self.values[i] == self.values[i - 1] {
                continue;
            }
            let left = self.counts(lo, i);
            let right = self.counts(i, hi);
            let e = ((i - lo) as f64 * entropy(&left, i - lo) + (hi - i) as f64 * entropy(&right, hi - i)) / n as f64;
            if best.is_none_or(|(b, _)| e < b) {
                best = Some((e, i));
            }
        }
        let Some((e, i)) = best else { return };
        let left = self.counts(lo, i);
        let right = self.counts(i, hi);
        let gain = h_s - e;
        let k = distinct(&total) as f64;
        let k1 = distinct(&left) as f64;
        let k2 = distinct(&right) as f64;
        let delta = (3f64.powf(k) - 2.0).log2()
            - (k * h_s - k1 * entropy(&left, i - lo) - k2 * entropy(&right, hi - i));
        let threshold = ((n - 1) as f64).log2() / n as f64 + delta / n as f64;
        if gain > threshold {
            self.split(lo, i, cuts);
            cuts.push(i);
            self.split(i, hi, cuts);
        }
    }
}

/// Discretize one column against its class labels.
pub fn discretize(
    column: &[f64],
    classes: &[usize],
    n_classes: usize,
    config: &DiscretizeConfig,
) -> Result<DiscreteAttribute> {
    if column.len() != classes.len() {
        return Err(Error::InvalidInput(format!(
            "column has {} values but {} labels",
            column.len(),
            classes.len()
        )));
    }
    if let Some(x) = column.iter().find(|x| !x.is_finite()) {
        return Err(Error::InvalidInput(format!("non-finite value {x} in column")));
    }
    if let Some(&c) = classes.iter().find(|&&c| c >= n_classes) {
        return Err(Error::InvalidInput(format!("class index {c} outside 0..{n_classes}")));
    }
    if config.fallback_bins == 0 {
        return Err(Error::Config("fallback_bins must be at least 1".into()));
    }
    let mut order: Vec<usize> = (0..column.len()).collect();
    order.sort_by(|&a, &b| column[a].total_cmp(&column[b]).then(a.cmp(&b)));
    let values: Vec<f64> = order.iter().map(|&i| column[i]).collect();
    let sorted_classes: Vec<usize> = order.iter().map(|&i| classes[i]).collect();

    let mut prefix = vec![vec![0usize; n_classes]; values.len() + 1];
    for (i, &c) in sorted_classes.iter().enumerate() {
        prefix[i + 1] = prefix[i].clone();
        prefix[i + 1][c] += 1;
    }
    let search = Search { values: &values, classes: &sorted_classes, n_classes, prefix };
    debug_assert_eq!(search.classes.len(), values.len());
    let mut cuts = Vec::new();
    search.split(0, values.len(), &mut cuts);

    let fallback = cuts.is_empty();
    if fallback {
        cuts = equal_frequency_cuts(&values, config.fallback_bins);
    }
    let edges: Vec<f64> = cuts.iter().map(|&i| cut_between(values[i - 1], values[i])).collect();
    let bins = column.iter().map(|&x| bin_of(&edges, x)).collect();
    Ok(DiscreteAttribute { bins, edges, fallback })
}

/// Cut positions splitting the sorted values into `bins` rank-equal groups,
/// skipping any boundary that falls inside a run of equal values.
fn equal_frequency_cuts(sorted: &[f64], bins: usize) -> Vec<usize> {
    let n = sorted.len();
    let mut cuts: Vec<usize> = Vec::new();
    for q in 1..bins {
        let i = q * n / bins;
        if i == 0 || i >= n || sorted[i - 1] == sorted[i] {
            continue;
        }
        if cuts.last() != Some(&i) {
            cuts.push(i);
        }
    }
    cuts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed;
    use rand::Rng;

    #[test]
    fn constant_column_single_bin() {
        let d = discretize(&[3.0; 12], &[0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1], 2, &DiscretizeConfig::default()).unwrap();
        assert_eq!(d.n_bins(), 1);
        assert!(d.bins.iter().all(|&b| b == 0));
    }

    #[test]
    fn separable_column_cut_between_clusters() {
        let col: Vec<f64> = (0..20).map(|i| if i < 10 { i as f64 * 0.1 } else { 5.0 + i as f64 * 0.1 }).collect();
        let cls: Vec<usize> = (0..20).map(|i| usize::from(i >= 10)).collect();
        let d = discretize(&col, &cls, 2, &DiscretizeConfig::default()).unwrap();
        assert!(!d.fallback);
        assert_eq!(d.edges.len(), 1);
        assert!(d.edges[0] > 0.9 && d.edges[0] < 6.0);
        assert_eq!(d.bins, cls);
    }

    #[test]
    fn noise_falls_back() {
        let mut rejected = 0;
        for trial in 0..20 {
            let mut rng = seed::rng(seed::derive(77, trial));
            let col: Vec<f64> = (0..200).map(|_| rng.random::<f64>()).collect();
            let cls: Vec<usize> = (0..200).map(|_| rng.random_range(0..2)).collect();
            let d = discretize(&col, &cls, 2, &DiscretizeConfig::default()).unwrap();
            if d.fallback {
                rejected += 1;
                assert_eq!(d.n_bins(), 10);
            }
        }
        assert!(rejected >= 18, "only {rejected}/20 noise columns fell back");
    }

    #[test]
    fn ties_never_straddle_a_cut() {
        let col = [1.0, 1.0, 1.0, 1.0, 2.0, 2.0, 3.0, 3.0, 3.0, 3.0];
        let cuts = equal_frequency_cuts(&col, 5);
        for &i in &cuts {
            assert!(col[i - 1] < col[i]);
        }
    }

    #[test]
    fn adjacent_floats_stay_apart() {
        let a = 1.0f64;
        let b = f64::from_bits(a.to_bits() + 1);
        let e = cut_between(a, b);
        assert_eq!(bin_of(&[e], a), 0);
        assert_eq!(bin_of(&[e], b), 1);
    }
}
