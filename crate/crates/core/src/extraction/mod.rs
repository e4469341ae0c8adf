//! Feature extraction: phasors, sequence components, power quantities,
//! rates, and Kalman-filter harmonic coefficients.

pub mod features;
pub mod kalman;
pub mod matrix;
pub mod phasor;
pub mod power;
pub mod rates;
pub mod resample;
pub mod sequence;

pub use features::{assemble_features, channel_manifest, ExtractionConfig};
pub use kalman::{kf_step, KfConfig, KfState};
pub use matrix::{Channel, ChannelKind, FeatureMatrix};
pub use phasor::{full_cycle_dft, Phasor};
pub use power::{power_quantities, PowerQuantities};
pub use rates::rate_of_change;
pub use sequence::{sequence_components, SequenceTriple};
