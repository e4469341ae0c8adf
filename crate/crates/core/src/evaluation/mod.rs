//! Corpora, over-sampling, classifiers, cross-validation, and importance sweeps.

mod classifiers;
mod cv;
mod dataset;
mod metrics;
mod smote;
mod sweep;

pub use classifiers::{fit_classifier, ClassifierKind, ClassifierModel, Hyper, Node};
pub use cv::{cross_validate, stratified_folds, CvConfig, CvReport, SmoteMode};
pub use dataset::{aggregate_event, build_dataset, corpus_specs, specs_digest, Aggregation, CorpusConfig, Dataset};
pub use metrics::{evaluate_metrics, Confusion, Metrics};
pub use smote::{smote_oversample, Standardizer};
pub use sweep::{sweep_importance, SweepConfig, SweepDimension, SweepResult};
