//! Stratified k-fold cross-validation.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::classifiers::{fit_classifier, ClassifierKind, Hyper};
use super::metrics::{Confusion, Metrics};
use super::smote::smote_oversample;
use crate::error::{Error, Result};
use crate::seed;
use crate::signalgen::Label;

/// Where minority over-sampling happens.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmoteMode {
    Off,
    /// Inside each training fold only.
    #[default]
    InFold,
    /// Once over the whole dataset before folding.
    Global,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CvConfig {
    pub folds: usize,
    pub smote: SmoteMode,
    pub smote_k: usize,
    pub hyper: Hyper,
}

impl Default for CvConfig {
    fn default() -> Self {
        Self { folds: 10, smote: SmoteMode::InFold, smote_k: 5, hyper: Hyper::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub kind: ClassifierKind,
    pub seed: u64,
    pub per_fold: Vec<Metrics>,
    /// Over the pooled confusion counts of every test fold.
    pub pooled: Metrics,
    pub mean_accuracy: f64,
    pub std_accuracy: f64,
    pub synthetic_rows: usize,
    /// Synthetic rows that ended up in a test fold; zero unless over-sampling is global.
    pub synthetic_in_test: usize,
}

/// Fold index per row. Each class is shuffled then dealt round-robin, so
/// every fold's class counts are within one of the global proportion.
pub fn stratified_folds(labels: &[Label], folds: usize, seed: u64) -> Result<Vec<usize>> {
    if folds < 2 {
        return Err(Error::Fold(format!("need at least 2 folds, got {folds}")));
    }
    let mut rng = seed::rng(seed);
    let mut assign = vec![0; labels.len()];
    let mut offset = 0;
    for hif in [true, false] {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i].is_hif() == hif).collect();
        if idx.len() < folds {
            return Err(Error::Fold(format!(
                "{} {} rows cannot fill {folds} folds",
                idx.len(),
                if hif { "HIF" } else { "non-HIF" }
            )));
        }
        idx.shuffle(&mut rng);
        for (k, &i) in idx.iter().enumerate() {
            assign[i] = (k + offset) % folds;
        }
        offset += idx.len();
    }
    Ok(assign)
}

#[derive(Clone)]
struct Row {
    x: Vec<f64>,
    y: Label,
    synthetic: bool,
}

/// Balance the classes of `rows` by adding synthetic minority points.
fn oversample(rows: &[Row], k: usize, seed: u64) -> Result<Vec<Row>> {
    let hif = rows.iter().filter(|r| r.y.is_hif()).count();
    let non = rows.len() - hif;
    if hif == non {
        return Ok(Vec::new());
    }
    let minority_label = if hif < non { Label::Hif } else { Label::NonHif };
    let minority: Vec<Vec<f64>> = rows.iter().filter(|r| r.y == minority_label).map(|r| r.x.clone()).collect();
    let gap = hif.abs_diff(non);
    let amount = 100.0 * gap as f64 / minority.len() as f64;
    let mut syn = smote_oversample(&minority, k, amount, seed)?;
    syn.truncate(gap);
    Ok(syn.into_iter().map(|x| Row { x, y: minority_label, synthetic: true }).collect())
}

pub fn cross_validate(kind: ClassifierKind, x: &[Vec<f64>], y: &[Label], config: &CvConfig, seed: u64) -> Result<CvReport> {
    if x.len() != y.len() {
        return Err(Error::InvalidInput(format!("{} rows but {} labels", x.len(), y.len())));
    }
    let mut rows: Vec<Row> = x.iter().zip(y).map(|(x, &y)| Row { x: x.clone(), y, synthetic: false }).collect();
    let mut synthetic_rows = 0;
    if config.smote == SmoteMode::Global {
        let syn = oversample(&rows, config.smote_k, seed::derive(seed, 1))?;
        synthetic_rows += syn.len();
        rows.extend(syn);
    }
    let labels: Vec<Label> = rows.iter().map(|r| r.y).collect();
    let assign = stratified_folds(&labels, config.folds, seed)?;

    let mut per_fold = Vec::with_capacity(config.folds);
    let mut pooled = Confusion::default();
    let mut synthetic_in_test = 0;
    for fold in 0..config.folds {
        let mut train: Vec<Row> = Vec::new();
        let mut test: Vec<&Row> = Vec::new();
        for (r, &f) in rows.iter().zip(&assign) {
            if f == fold {
                test.push(r);
            } else {
                train.push(r.clone());
            }
        }
        if config.smote == SmoteMode::InFold {
            let syn = oversample(&train, config.smote_k, seed::derive(seed, 100 + fold as u64))?;
            synthetic_rows += syn.len();
            train.extend(syn);
        }
        synthetic_in_test += test.iter().filter(|r| r.synthetic).count();
        let tx: Vec<Vec<f64>> = train.iter().map(|r| r.x.clone()).collect();
        let ty: Vec<Label> = train.iter().map(|r| r.y).collect();
        let model = fit_classifier(kind, &tx, &ty, &config.hyper, seed::derive(seed, 200 + fold as u64))?;
        let truth: Vec<Label> = test.iter().map(|r| r.y).collect();
        let pred: Vec<Label> = test.iter().map(|r| model.predict_one(&r.x)).collect();
        let c = Confusion::tally(&truth, &pred);
        pooled.add(&c);
        per_fold.push(Metrics::from_confusion(c));
    }
    if config.smote != SmoteMode::Global {
        assert_eq!(synthetic_in_test, 0, "synthetic rows leaked into a test fold");
    }
    let accs: Vec<f64> = per_fold.iter().map(|m| m.accuracy).collect();
    let mean = accs.iter().sum::<f64>() / accs.len() as f64;
    let var = accs.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / accs.len() as f64;
    Ok(CvReport {
        kind,
        seed,
        per_fold,
        pooled: Metrics::from_confusion(pooled),
        mean_accuracy: mean,
        std_accuracy: var.sqrt(),
        synthetic_rows,
        synthetic_in_test,
    })
}
