//! Confusion counts and the indices derived from them.

use serde::{Deserialize, Serialize};

use super::classifiers::ClassifierModel;
use crate::error::{Error, Result};
use crate::signalgen::Label;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    /// HIF predicted HIF.
    pub tp: usize,
    /// HIF predicted non-HIF.
    pub fn_: usize,
    /// Non-HIF predicted non-HIF.
    pub tn: usize,
    /// Non-HIF predicted HIF.
    pub fp: usize,
}

impl Confusion {
    pub fn tally(truth: &[Label], predicted: &[Label]) -> Self {
        let mut c = Confusion::default();
        for (t, p) in truth.iter().zip(predicted) {
            match (t.is_hif(), p.is_hif()) {
                (true, true) => c.tp += 1,
                (true, false) => c.fn_ += 1,
                (false, false) => c.tn += 1,
                (false, true) => c.fp += 1,
            }
        }
        c
    }

    pub fn total(&self) -> usize {
        self.tp + self.fn_ + self.tn + self.fp
    }

    pub fn add(&mut self, other: &Confusion) {
        self.tp += other.tp;
        self.fn_ += other.fn_;
        self.tn += other.tn;
        self.fp += other.fp;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub confusion: Confusion,
    /// Percent correct over all rows.
    pub accuracy: f64,
    /// Percent of HIF rows detected; NaN without HIF rows.
    pub di: f64,
    /// Percent of non-HIF rows left alone; NaN without non-HIF rows.
    pub si: f64,
}

fn pct(num: usize, den: usize) -> f64 {
    if den == 0 {
        f64::NAN
    } else {
        100.0 * num as f64 / den as f64
    }
}

impl Metrics {
    pub fn from_confusion(confusion: Confusion) -> Self {
        let c = confusion;
        Self {
            confusion,
            accuracy: pct(c.tp + c.tn, c.total()),
            di: pct(c.tp, c.tp + c.fn_),
            si: pct(c.tn, c.tn + c.fp),
        }
    }

    pub fn of(truth: &[Label], predicted: &[Label]) -> Self {
        Self::from_confusion(Confusion::tally(truth, predicted))
    }
}

/// Score a fitted model on held-out rows.
pub fn evaluate_metrics(model: &ClassifierModel, x: &[Vec<f64>], y: &[Label]) -> Result<Metrics> {
    if x.is_empty() {
        return Err(Error::InsufficientData("empty test set".into()));
    }
    if x.len() != y.len() {
        return Err(Error::InvalidInput(format!("{} rows but {} labels", x.len(), y.len())));
    }
    Ok(Metrics::of(y, &model.predict(x)))
}
