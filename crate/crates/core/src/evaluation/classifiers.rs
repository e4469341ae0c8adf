//! Gaussian naive Bayes, k-nearest neighbours, an information-gain decision
//! tree and a bagged random forest of those trees.

use rand::seq::{index, SliceRandom};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt;

use super::smote::{sq_dist, Standardizer};
use crate::error::{Error, Result};
use crate::ranking::{info_gain, ContingencyTable};
use crate::seed;
use crate::signalgen::Label;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifierKind {
    NaiveBayesGaussian,
    Knn,
    DecisionTree,
    RandomForest,
}

impl ClassifierKind {
    pub const ALL: [ClassifierKind; 4] =
        [ClassifierKind::NaiveBayesGaussian, ClassifierKind::Knn, ClassifierKind::DecisionTree, ClassifierKind::RandomForest];
}

impl fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClassifierKind::NaiveBayesGaussian => "naive_bayes_gaussian",
            ClassifierKind::Knn => "knn",
            ClassifierKind::DecisionTree => "decision_tree",
            ClassifierKind::RandomForest => "random_forest",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Hyper {
    pub knn_k: usize,
    /// Added to every class variance, relative to the feature's overall variance.
    pub variance_floor: f64,
    pub trees: usize,
    /// Features tried per split; `None` means ⌈√d⌉.
    pub max_features: Option<usize>,
    pub bootstrap: bool,
    pub min_leaf: usize,
    pub max_depth: usize,
    /// Reject splits whose gain does not pay for the cut's description length.
    pub mdl_stop: bool,
}

impl Default for Hyper {
    fn default() -> Self {
        Self {
            knn_k: 3,
            variance_floor: 1e-9,
            trees: 50,
            max_features: None,
            bootstrap: true,
            min_leaf: 1,
            max_depth: 32,
            mdl_stop: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Leaf { hif: bool, n_hif: usize, n: usize },
    Split { feature: usize, threshold: f64, left: Box<Node>, right: Box<Node> },
}

impl Node {
    fn predict(&self, x: &[f64]) -> bool {
        match self {
            Node::Leaf { hif, .. } => *hif,
            Node::Split { feature, threshold, left, right } => {
                if x[*feature] <= *threshold {
                    left.predict(x)
                } else {
                    right.predict(x)
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Node::Leaf { .. } => 0,
            Node::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ClassifierModel {
    NaiveBayesGaussian {
        /// ln prior per class, non-HIF first.
        log_prior: [f64; 2],
        mean: [Vec<f64>; 2],
        var: [Vec<f64>; 2],
    },
    Knn {
        k: usize,
        scaler_mean: Vec<f64>,
        scaler_std: Vec<f64>,
        points: Vec<Vec<f64>>,
        hif: Vec<bool>,
    },
    DecisionTree(Node),
    RandomForest(Vec<Node>),
}

impl ClassifierModel {
    pub fn kind(&self) -> ClassifierKind {
        match self {
            ClassifierModel::NaiveBayesGaussian { .. } => ClassifierKind::NaiveBayesGaussian,
            ClassifierModel::Knn { .. } => ClassifierKind::Knn,
            ClassifierModel::DecisionTree(_) => ClassifierKind::DecisionTree,
            ClassifierModel::RandomForest(_) => ClassifierKind::RandomForest,
        }
    }

    pub fn predict_one(&self, x: &[f64]) -> Label {
        let hif = match self {
            ClassifierModel::NaiveBayesGaussian { log_prior, mean, var } => {
                let ll = |c: usize| -> f64 {
                    log_prior[c]
                        + x.iter()
                            .zip(&mean[c])
                            .zip(&var[c])
                            .map(|((x, m), v)| -0.5 * ((2.0 * std::f64::consts::PI * v).ln() + (x - m).powi(2) / v))
                            .sum::<f64>()
                };
                ll(1) > ll(0)
            }
            ClassifierModel::Knn { k, scaler_mean, scaler_std, points, hif } => {
                let scaler = Standardizer { mean: scaler_mean.clone(), std: scaler_std.clone() };
                let q = scaler.apply(x);
                let mut d: Vec<(f64, usize)> = points.iter().enumerate().map(|(i, p)| (sq_dist(&q, p), i)).collect();
                d.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                let k = (*k).min(d.len());
                let votes = d[..k].iter().filter(|(_, i)| hif[*i]).count();
                if 2 * votes == k {
                    hif[d[0].1]
                } else {
                    2 * votes > k
                }
            }
            ClassifierModel::DecisionTree(root) => root.predict(x),
            ClassifierModel::RandomForest(trees) => {
                let votes = trees.iter().filter(|t| t.predict(x)).count();
                if 2 * votes == trees.len() {
                    trees[0].predict(x)
                } else {
                    2 * votes > trees.len()
                }
            }
        };
        if hif {
            Label::Hif
        } else {
            Label::NonHif
        }
    }

    pub fn predict(&self, xs: &[Vec<f64>]) -> Vec<Label> {
        xs.iter().map(|x| self.predict_one(x)).collect()
    }
}

fn check_training(x: &[Vec<f64>], y: &[Label]) -> Result<usize> {
    if x.len() != y.len() {
        return Err(Error::InvalidInput(format!("{} rows but {} labels", x.len(), y.len())));
    }
    let d = x.first().map_or(0, Vec::len);
    if x.iter().any(|r| r.len() != d) {
        return Err(Error::InvalidInput("ragged training rows".into()));
    }
    if x.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("non-finite training value".into()));
    }
    let hif = y.iter().filter(|l| l.is_hif()).count();
    if hif == 0 || hif == y.len() {
        return Err(Error::InsufficientData(format!("training set needs both classes, has {hif} HIF of {}", y.len())));
    }
    Ok(d)
}

pub fn fit_classifier(kind: ClassifierKind, x: &[Vec<f64>], y: &[Label], hyper: &Hyper, seed: u64) -> Result<ClassifierModel> {
    let d = check_training(x, y)?;
    match kind {
        ClassifierKind::NaiveBayesGaussian => Ok(fit_nb(x, y, d, hyper.variance_floor)),
        ClassifierKind::Knn => {
            if hyper.knn_k == 0 {
                return Err(Error::Config("knn_k must be at least 1".into()));
            }
            let scaler = Standardizer::fit(x);
            Ok(ClassifierModel::Knn {
                k: hyper.knn_k,
                points: x.iter().map(|p| scaler.apply(p)).collect(),
                scaler_mean: scaler.mean,
                scaler_std: scaler.std,
                hif: y.iter().map(|l| l.is_hif()).collect(),
            })
        }
        ClassifierKind::DecisionTree => {
            let all: Vec<usize> = (0..x.len()).collect();
            let mut rng = seed::rng(seed::derive(seed, 0));
            Ok(ClassifierModel::DecisionTree(grow(x, y, &all, d, hyper, &mut rng)))
        }
        ClassifierKind::RandomForest => {
            if hyper.trees == 0 {
                return Err(Error::Config("a forest needs at least one tree".into()));
            }
            let mtry = hyper.max_features.unwrap_or(((d as f64).sqrt().ceil() as usize).max(1)).clamp(1, d.max(1));
            let h = Hyper { max_features: Some(mtry), ..hyper.clone() };
            let trees = (0..hyper.trees)
                .map(|t| {
                    let mut rng = seed::rng(seed::derive(seed, t as u64));
                    let rows: Vec<usize> = if hyper.bootstrap {
                        (0..x.len()).map(|_| rng.random_range(0..x.len())).collect()
                    } else {
                        (0..x.len()).collect()
                    };
                    grow(x, y, &rows, d, &h, &mut rng)
                })
                .collect();
            Ok(ClassifierModel::RandomForest(trees))
        }
    }
}

fn fit_nb(x: &[Vec<f64>], y: &[Label], d: usize, floor: f64) -> ClassifierModel {
    let overall = Standardizer::fit(x);
    let mut mean = [vec![0.0; d], vec![0.0; d]];
    let mut var = [vec![0.0; d], vec![0.0; d]];
    let mut n = [0usize; 2];
    for (r, l) in x.iter().zip(y) {
        let c = usize::from(l.is_hif());
        n[c] += 1;
        for (m, v) in mean[c].iter_mut().zip(r) {
            *m += v;
        }
    }
    for c in 0..2 {
        for m in &mut mean[c] {
            *m /= n[c] as f64;
        }
    }
    for (r, l) in x.iter().zip(y) {
        let c = usize::from(l.is_hif());
        for j in 0..d {
            var[c][j] += (r[j] - mean[c][j]).powi(2) / n[c] as f64;
        }
    }
    for c in 0..2 {
        for j in 0..d {
            let scale = overall.std[j].powi(2);
            var[c][j] += floor * scale + f64::MIN_POSITIVE;
        }
    }
    let total = x.len() as f64;
    ClassifierModel::NaiveBayesGaussian {
        log_prior: [(n[0] as f64 / total).ln(), (n[1] as f64 / total).ln()],
        mean,
        var,
    }
}

fn leaf(y: &[Label], rows: &[usize]) -> Node {
    let n_hif = rows.iter().filter(|&&r| y[r].is_hif()).count();
    Node::Leaf { hif: 2 * n_hif > rows.len(), n_hif, n: rows.len() }
}

/// Binary-class gain of splitting `rows` at position `i` of the sorted order.
fn split_gain(left: [u64; 2], right: [u64; 2]) -> f64 {
    let t = ContingencyTable::new(vec![vec![left[0], right[0]], vec![left[1], right[1]]]).expect("2x2 table");
    info_gain(&t)
}

fn class_entropy(c: [u64; 2]) -> f64 {
    let n = (c[0] + c[1]) as f64;
    c.iter().filter(|&&k| k > 0).map(|&k| -(k as f64 / n) * (k as f64 / n).log2()).sum()
}

fn mdl_accepts(total: [u64; 2], left: [u64; 2], right: [u64; 2], gain: f64) -> bool {
    let n = (total[0] + total[1]) as f64;
    let k = |c: [u64; 2]| c.iter().filter(|&&v| v > 0).count() as f64;
    let delta = (3f64.powf(k(total)) - 2.0).log2()
        - (k(total) * class_entropy(total) - k(left) * class_entropy(left) - k(right) * class_entropy(right));
    gain > ((n - 1.0).log2() + delta) / n
}

fn grow(x: &[Vec<f64>], y: &[Label], rows: &[usize], d: usize, hyper: &Hyper, rng: &mut ChaCha8Rng) -> Node {
    grow_at(x, y, rows, d, hyper, rng, 0)
}

/// (gain, feature, threshold, left counts, right counts).
type Candidate = (f64, usize, f64, [u64; 2], [u64; 2]);

fn grow_at(x: &[Vec<f64>], y: &[Label], rows: &[usize], d: usize, hyper: &Hyper, rng: &mut ChaCha8Rng, depth: usize) -> Node {
    let mut total = [0u64; 2];
    for &r in rows {
        total[usize::from(y[r].is_hif())] += 1;
    }
    if total[0] == 0 || total[1] == 0 || depth >= hyper.max_depth || rows.len() < 2 * hyper.min_leaf.max(1) {
        return leaf(y, rows);
    }
    let features: Vec<usize> = match hyper.max_features {
        Some(m) if m < d => {
            let mut f = index::sample(rng, d, m).into_vec();
            f.shuffle(rng);
            f
        }
        _ => (0..d).collect(),
    };

    // Ties keep the first split found.
    let mut best: Option<Candidate> = None;
    let mut sorted = rows.to_vec();
    for &f in &features {
        sorted.sort_by(|&a, &b| x[a][f].total_cmp(&x[b][f]).then(a.cmp(&b)));
        let mut left = [0u64; 2];
        for i in 1..sorted.len() {
            left[usize::from(y[sorted[i - 1]].is_hif())] += 1;
            let (lo, hi) = (x[sorted[i - 1]][f], x[sorted[i]][f]);
            if lo == hi || i < hyper.min_leaf || sorted.len() - i < hyper.min_leaf {
                continue;
            }
            let right = [total[0] - left[0], total[1] - left[1]];
            let g = split_gain(left, right);
            if best.as_ref().is_none_or(|b| g > b.0) {
                let mid = lo + (hi - lo) / 2.0;
                let threshold = if mid < hi { mid } else { lo };
                best = Some((g, f, threshold, left, right));
            }
        }
    }
    let Some((gain, feature, threshold, left, right)) = best else {
        return leaf(y, rows);
    };
    if gain <= 0.0 || (hyper.mdl_stop && !mdl_accepts(total, left, right, gain)) {
        return leaf(y, rows);
    }
    let (l, r): (Vec<usize>, Vec<usize>) = rows.iter().partition(|&&i| x[i][feature] <= threshold);
    Node::Split {
        feature,
        threshold,
        left: Box::new(grow_at(x, y, &l, d, hyper, rng, depth + 1)),
        right: Box::new(grow_at(x, y, &r, d, hyper, rng, depth + 1)),
    }
}
