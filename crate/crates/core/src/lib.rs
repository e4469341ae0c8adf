//! High-impedance fault detection laboratory.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod detector;
pub mod digest;
pub mod error;
pub mod evaluation;
pub mod extraction;
pub mod preset;
pub mod ranking;
pub mod seed;
pub mod signalgen;

pub use detector::{run_detector, DetectionResult, DetectorConfig};
pub use error::{Error, Result};
pub use evaluation::{cross_validate, sweep_importance, ClassifierKind, Dataset, Metrics, SweepDimension, SweepResult};
pub use extraction::{assemble_features, ExtractionConfig, FeatureMatrix};
pub use preset::{Preset, Settings};
pub use ranking::{rank_and_select, MdlReport};
pub use signalgen::{build_catalog, synth_event, CatalogConfig, GridConfig, ScenarioSpec, SignalRecord};
