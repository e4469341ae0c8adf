//! Waveform synthesis: arc model, feeder model, scenarios, and catalogs.

pub mod arc;
pub mod catalog;
pub mod grid;
pub mod record;
pub mod scenario;
pub mod synth;

pub use arc::{HifModel, HifModelParams, HifModelState, MoistureEffect};
pub use catalog::{build_catalog, Catalog, CatalogConfig};
pub use grid::{GridConfig, VoltagePoint};
pub use record::{Label, SignalRecord};
pub use scenario::{DerTech, EventClass, FaultParams, Location, Phase, ScenarioSpec, ShuntFault};
pub use synth::synth_event;
