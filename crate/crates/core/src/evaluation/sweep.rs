//! Variable importance along one fault-parameter axis.

use serde::{Deserialize, Serialize};
use std::fmt::{self, Write as _};

use super::dataset::{build_dataset, corpus_specs, Aggregation, CorpusConfig};
use crate::detector::SIGNALS;
use crate::error::{Error, Result};
use crate::extraction::ExtractionConfig;
use crate::ranking::{score_column, DiscretizeConfig};
use crate::signalgen::{CatalogConfig, EventClass, GridConfig, Location, Phase, ShuntFault};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepDimension {
    Impedance,
    InceptionAngle,
    Location,
}

impl fmt::Display for SweepDimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepDimension::Impedance => "impedance",
            SweepDimension::InceptionAngle => "inception_angle",
            SweepDimension::Location => "location",
        })
    }
}

impl std::str::FromStr for SweepDimension {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "impedance" => Ok(SweepDimension::Impedance),
            "inception_angle" | "angle" => Ok(SweepDimension::InceptionAngle),
            "location" => Ok(SweepDimension::Location),
            other => Err(Error::Config(format!("unknown sweep dimension `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepConfig {
    pub impedances: Vec<f64>,
    pub inception_angles: Vec<u32>,
    pub locations: Vec<Location>,
    /// Fault cases regenerated at each grid point.
    pub fault_cases: Vec<EventClass>,
    pub faults_per_point: usize,
    pub non_faults: usize,
    /// Channels scored; defaults to the detector's ten signals.
    pub channels: Vec<String>,
    pub catalog: CatalogConfig,
    pub aggregation: Aggregation,
    pub discretize: DiscretizeConfig,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            impedances: vec![30.0, 100.0, 200.0, 300.0, 400.0, 500.0],
            inception_angles: vec![0, 30, 60, 90],
            locations: Location::ALL.to_vec(),
            fault_cases: Phase::ALL.iter().map(|&phase| EventClass::FaultType1 { fault: ShuntFault::Slg { phase } }).collect(),
            faults_per_point: 60,
            non_faults: 60,
            channels: SIGNALS.iter().map(|s| s.to_string()).collect(),
            catalog: CatalogConfig::desk(),
            aggregation: Aggregation::default(),
            discretize: DiscretizeConfig::default(),
        }
    }
}

/// Score curves: `scores[g][c]` is channel `c` at grid point `g`, absent for gaps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub dimension: SweepDimension,
    pub grid: Vec<String>,
    pub channels: Vec<String>,
    pub scores: Vec<Vec<Option<f64>>>,
    /// Grid points whose fault sub-corpus came out empty.
    pub gaps: Vec<String>,
}

impl SweepResult {
    pub fn curve(&self, channel: &str) -> Option<Vec<Option<f64>>> {
        let c = self.channels.iter().position(|n| n == channel)?;
        Some(self.scores.iter().map(|row| row[c]).collect())
    }

    /// `grid,<channel>...`; gaps are empty cells.
    pub fn to_csv(&self) -> String {
        let mut s = format!("{}", self.dimension);
        for c in &self.channels {
            s.push(',');
            s.push_str(c);
        }
        s.push('\n');
        for (g, row) in self.grid.iter().zip(&self.scores) {
            s.push_str(g);
            for v in row {
                s.push(',');
                if let Some(v) = v {
                    let _ = write!(s, "{v}");
                }
            }
            s.push('\n');
        }
        s
    }
}

fn grid_points(dimension: SweepDimension, config: &SweepConfig) -> Vec<(String, CatalogConfig)> {
    let base = CatalogConfig { fault_cases: config.fault_cases.clone(), ..config.catalog.clone() };
    match dimension {
        SweepDimension::Impedance => config
            .impedances
            .iter()
            .map(|&z| (format!("{z}"), CatalogConfig { impedances: vec![z], ..base.clone() }))
            .collect(),
        SweepDimension::InceptionAngle => config
            .inception_angles
            .iter()
            .map(|&a| (format!("{a}"), CatalogConfig { inception_angles: vec![a], ..base.clone() }))
            .collect(),
        SweepDimension::Location => config
            .locations
            .iter()
            .map(|&l| (format!("{l:?}").to_lowercase(), CatalogConfig { locations: vec![l], ..base.clone() }))
            .collect(),
    }
}

/// Regenerate the fault sub-corpus at every grid point and score the
/// configured channels against a shared non-fault corpus.
pub fn sweep_importance(
    dimension: SweepDimension,
    config: &SweepConfig,
    grid: &GridConfig,
    extraction: &ExtractionConfig,
) -> Result<SweepResult> {
    let points = grid_points(dimension, config);
    if points.is_empty() {
        return Err(Error::Config(format!("empty {dimension} grid")));
    }
    let non_specs = corpus_specs(&CorpusConfig {
        catalog: config.catalog.clone(),
        faults: 0,
        non_faults: config.non_faults,
        include_three_phase: false,
    })?;
    let non = build_dataset(&non_specs, grid, extraction, config.aggregation)?.select(&config.channels)?;

    let mut scores = Vec::with_capacity(points.len());
    let mut gaps = Vec::new();
    let mut labels = Vec::with_capacity(points.len());
    for (label, catalog) in points {
        let specs = corpus_specs(&CorpusConfig {
            catalog,
            faults: config.faults_per_point,
            non_faults: 0,
            include_three_phase: true,
        })
        .or_else(|e| match e {
            Error::Config(_) => Ok(Vec::new()),
            other => Err(other),
        })?;
        if specs.is_empty() {
            gaps.push(label.clone());
            scores.push(vec![None; config.channels.len()]);
            labels.push(label);
            continue;
        }
        let faults = build_dataset(&specs, grid, extraction, config.aggregation)?.select(&config.channels)?;
        let mut classes = vec![1usize; faults.len()];
        classes.extend(std::iter::repeat_n(0, non.len()));
        let row = (0..config.channels.len())
            .map(|c| {
                let col: Vec<f64> = faults.matrix.rows.iter().chain(&non.matrix.rows).map(|r| r[c]).collect();
                score_column(&col, &classes, &config.discretize).map(|(mdl, _, _)| Some(mdl))
            })
            .collect::<Result<Vec<_>>>()?;
        scores.push(row);
        labels.push(label);
    }
    Ok(SweepResult { dimension, grid: labels, channels: config.channels.clone(), scores, gaps })
}
