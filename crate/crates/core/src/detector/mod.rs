//! Streaming relay logic: reference averaging, sensitivity-gain comparison,
//! gate-level decision with a blocking input, and a trip delay.

pub mod averager;
pub mod config;
pub mod logic;
pub mod run;

pub use averager::AveragerState;
pub use config::{CompareMode, DetectorConfig, N_SIGNALS, SIGNALS};
pub use logic::{compare_step, decision_step, AssertionBits, DelayTimer};
pub use run::{detector_signals, run_detector, run_on_stream, DetectionResult, DetectionSummary, Detector, TraceRow};
