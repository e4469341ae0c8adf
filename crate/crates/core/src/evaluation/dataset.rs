//! One aggregated feature row per event, and the corpora they come from.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extraction::{assemble_features, ChannelKind, ExtractionConfig, FeatureMatrix};
use crate::extraction::phasor::wrap;
use crate::ranking::{FaultGroup, Stratum};
use crate::seed;
use crate::signalgen::{build_catalog, synth_event, CatalogConfig, GridConfig, Label, ScenarioSpec};

/// How a channel's windows after the event collapse into one number.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregation {
    /// Largest |x − pre-event mean|.
    MaxAbsDeviation,
    /// Mean |x − pre-event mean|.
    MeanAbsDeviation,
    /// 95th percentile of |x − pre-event mean|; ignores sub-cycle switching bursts.
    #[default]
    P95AbsDeviation,
}

fn circular_mean(xs: &[f64]) -> f64 {
    let (s, c) = xs.iter().fold((0.0, 0.0), |(s, c), a| (s + a.sin(), c + a.cos()));
    if s == 0.0 && c == 0.0 {
        0.0
    } else {
        s.atan2(c)
    }
}

/// Collapse a windowed matrix into one value per channel, comparing the
/// windows at or after `event_time` with the mean of those before it.
pub fn aggregate_event(matrix: &FeatureMatrix, event_time: f64, rule: Aggregation) -> Result<Vec<f64>> {
    let split = matrix.times.partition_point(|&t| t < event_time);
    if split == 0 || split == matrix.len() {
        return Err(Error::Record(format!(
            "event at {event_time} s leaves {split} windows before and {} after",
            matrix.len() - split
        )));
    }
    let mut out = Vec::with_capacity(matrix.channels.len());
    for (j, ch) in matrix.channels.iter().enumerate() {
        let pre: Vec<f64> = matrix.rows[..split].iter().map(|r| r[j]).collect();
        let dev: Vec<f64> = match ch.kind {
            ChannelKind::Plain => {
                let base = pre.iter().sum::<f64>() / pre.len() as f64;
                matrix.rows[split..].iter().map(|r| (r[j] - base).abs()).collect()
            }
            ChannelKind::Angle => {
                let base = circular_mean(&pre);
                matrix.rows[split..].iter().map(|r| wrap(r[j] - base).abs()).collect()
            }
        };
        out.push(match rule {
            Aggregation::MaxAbsDeviation => dev.iter().copied().fold(0.0, f64::max),
            Aggregation::MeanAbsDeviation => dev.iter().sum::<f64>() / dev.len() as f64,
            Aggregation::P95AbsDeviation => {
                let mut d = dev;
                d.sort_by(f64::total_cmp);
                let k = ((0.95 * d.len() as f64).ceil() as usize).clamp(1, d.len());
                d[k - 1]
            }
        });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CorpusConfig {
    pub catalog: CatalogConfig,
    /// Fault records drawn from the catalog.
    pub faults: usize,
    pub non_faults: usize,
    /// Keep LLLG faults in the corpus.
    pub include_three_phase: bool,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        Self { catalog: CatalogConfig::desk(), faults: 200, non_faults: 200, include_three_phase: false }
    }
}

/// `n` specs from `base`: evenly spaced when the catalog is larger,
/// otherwise cycled with a fresh seed per pass.
fn draw(base: &[ScenarioSpec], n: usize) -> Vec<ScenarioSpec> {
    if base.is_empty() {
        return Vec::new();
    }
    (0..n)
        .map(|k| {
            let (i, pass) = if n <= base.len() { (k * base.len() / n, 0) } else { (k % base.len(), k / base.len()) };
            let mut s = base[i].clone();
            s.seed = seed::derive(s.seed, pass as u64);
            s
        })
        .collect()
}

/// Scenario list: `faults` fault specs then `non_faults` non-fault specs.
pub fn corpus_specs(config: &CorpusConfig) -> Result<Vec<ScenarioSpec>> {
    let cat = build_catalog(&config.catalog)?;
    let faults: Vec<ScenarioSpec> = cat
        .faults
        .into_iter()
        .filter(|s| config.include_three_phase || !s.event_class.is_three_phase_fault())
        .collect();
    if faults.is_empty() && config.faults > 0 {
        return Err(Error::Config("corpus asks for faults but the catalog has none".into()));
    }
    let mut out = draw(&faults, config.faults);
    out.extend(draw(&cat.non_faults, config.non_faults));
    Ok(out)
}

/// Events × aggregated channels.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    /// One row per event; `times` holds the event index.
    pub matrix: FeatureMatrix,
    pub specs: Vec<ScenarioSpec>,
    /// SHA-256 over the scenario list.
    pub digest: String,
}

pub fn specs_digest(specs: &[ScenarioSpec]) -> String {
    crate::digest::of_json(&specs)
}

/// Synthesize, extract and aggregate every scenario.
pub fn build_dataset(
    specs: &[ScenarioSpec],
    grid: &GridConfig,
    extraction: &ExtractionConfig,
    rule: Aggregation,
) -> Result<Dataset> {
    if specs.is_empty() {
        return Err(Error::InsufficientData("no scenarios to build a dataset from".into()));
    }
    let rows: Vec<(Vec<crate::extraction::Channel>, Vec<f64>)> = specs
        .par_iter()
        .map(|s| {
            let rec = synth_event(s, grid)?;
            let m = assemble_features(&rec, extraction)?;
            let row = aggregate_event(&m, s.event_time, rule)?;
            Ok((m.channels, row))
        })
        .collect::<Result<_>>()?;
    let channels = rows[0].0.clone();
    let labels = specs.iter().map(|s| if s.is_fault() { Label::Hif } else { Label::NonHif }).collect();
    Ok(Dataset {
        matrix: FeatureMatrix {
            channels,
            times: (0..specs.len()).map(|i| i as f64).collect(),
            rows: rows.into_iter().map(|r| r.1).collect(),
            labels,
            dropped: 0,
        },
        specs: specs.to_vec(),
        digest: specs_digest(specs),
    })
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.matrix.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrix.is_empty()
    }

    /// Keep only the named channels, in the given order.
    pub fn select(&self, names: &[impl AsRef<str>]) -> Result<Dataset> {
        let idx: Vec<usize> = names
            .iter()
            .map(|n| {
                self.matrix
                    .channel_index(n.as_ref())
                    .ok_or_else(|| Error::InvalidInput(format!("dataset has no channel {}", n.as_ref())))
            })
            .collect::<Result<_>>()?;
        let mut matrix = self.matrix.clone();
        matrix.channels = idx.iter().map(|&j| self.matrix.channels[j].clone()).collect();
        matrix.rows = self.matrix.rows.iter().map(|r| idx.iter().map(|&j| r[j]).collect()).collect();
        Ok(Dataset { matrix, specs: self.specs.clone(), digest: self.digest.clone() })
    }

    /// Ranking strata: per DER technology, each fault group with that
    /// technology's non-faults. Groups without faults are left out.
    pub fn strata(&self) -> Vec<Stratum> {
        let mut techs: Vec<_> = self.specs.iter().map(|s| s.der_tech).collect();
        techs.sort();
        techs.dedup();
        let mut out = Vec::new();
        for tech in techs {
            let non: Vec<usize> =
                (0..self.specs.len()).filter(|&i| self.specs[i].der_tech == tech && !self.specs[i].is_fault()).collect();
            for group in [FaultGroup::Unbalanced, FaultGroup::ThreePhase] {
                let mut rows: Vec<usize> = (0..self.specs.len())
                    .filter(|&i| {
                        let s = &self.specs[i];
                        s.der_tech == tech
                            && match group {
                                FaultGroup::Unbalanced => s.event_class.is_unbalanced_fault(),
                                FaultGroup::ThreePhase => s.event_class.is_three_phase_fault(),
                            }
                    })
                    .collect();
                if rows.is_empty() || non.is_empty() {
                    continue;
                }
                rows.extend(&non);
                out.push(Stratum { group, system: format!("{tech:?}").to_lowercase(), rows });
            }
        }
        out
    }
}
