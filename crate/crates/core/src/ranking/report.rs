//! Ranking driver and its report.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use super::discretize::{discretize, DiscretizeConfig};
use super::mdl::{info_gain, mdl_score};
use super::table::ContingencyTable;
use crate::error::{Error, Result};
use crate::extraction::FeatureMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FaultGroup {
    Unbalanced,
    ThreePhase,
}

impl fmt::Display for FaultGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FaultGroup::Unbalanced => "unbalanced",
            FaultGroup::ThreePhase => "three_phase",
        })
    }
}

/// A subset of matrix rows ranked on its own: one fault group under one
/// system configuration, together with that configuration's non-faults.
#[derive(Clone, Debug, PartialEq)]
pub struct Stratum {
    pub group: FaultGroup,
    pub system: String,
    pub rows: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RankConfig {
    pub discretize: DiscretizeConfig,
    /// Channels kept per fault group.
    pub efs_size: usize,
}

impl Default for RankConfig {
    fn default() -> Self {
        Self { discretize: DiscretizeConfig::default(), efs_size: 6 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelScore {
    pub name: String,
    pub mdl_bits: f64,
    /// Min-max scaled `mdl_bits` over the report.
    pub mdl_normalized: f64,
    pub gain_bits: f64,
    /// 1-based; 1 is the most informative channel.
    pub rank: usize,
    pub bins: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MdlReport {
    pub instances: usize,
    pub channels: Vec<ChannelScore>,
    /// Effective feature set per fault group, best first.
    pub efs: BTreeMap<FaultGroup, Vec<String>>,
}

impl MdlReport {
    pub fn get(&self, name: &str) -> Option<&ChannelScore> {
        self.channels.iter().find(|c| c.name == name)
    }

    pub fn rank_of(&self, name: &str) -> Option<usize> {
        self.get(name).map(|c| c.rank)
    }

    /// Channel names in rank order.
    pub fn ranked_names(&self) -> Vec<&str> {
        let mut v: Vec<&ChannelScore> = self.channels.iter().collect();
        v.sort_by_key(|c| c.rank);
        v.into_iter().map(|c| c.name.as_str()).collect()
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("report serializes")
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Ranking(format!("malformed report: {e}")))
    }

    /// Flat score table in rank order.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("rank,name,mdl_bits,mdl_normalized,gain_bits,bins\n");
        let mut v: Vec<&ChannelScore> = self.channels.iter().collect();
        v.sort_by_key(|c| c.rank);
        for c in v {
            let _ = writeln!(s, "{},{},{},{},{},{}", c.rank, c.name, c.mdl_bits, c.mdl_normalized, c.gain_bits, c.bins);
        }
        s
    }
}

/// Score one column against binary HIF labels.
pub fn score_column(column: &[f64], classes: &[usize], config: &DiscretizeConfig) -> Result<(f64, f64, usize)> {
    let d = discretize(column, classes, 2, config)?;
    let table = ContingencyTable::from_pairs(classes, &d.bins, 2, d.n_bins())?;
    Ok((mdl_score(&table)?, info_gain(&table), d.n_bins()))
}

fn class_indices(matrix: &FeatureMatrix, rows: &[usize]) -> Vec<usize> {
    rows.iter().map(|&r| usize::from(matrix.labels[r].is_hif())).collect()
}

/// Score and rank every channel over `rows`. Ranks follow descending MDL,
/// ties broken by channel name.
fn rank_rows(matrix: &FeatureMatrix, rows: &[usize], config: &RankConfig) -> Result<Vec<ChannelScore>> {
    let classes = class_indices(matrix, rows);
    let hif = classes.iter().filter(|&&c| c == 1).count();
    if hif == 0 || hif == classes.len() {
        return Err(Error::Ranking(format!(
            "need both classes, got {hif} HIF of {} instances",
            classes.len()
        )));
    }
    let scored: Vec<(f64, f64, usize)> = (0..matrix.channels.len())
        .into_par_iter()
        .map(|j| {
            let col: Vec<f64> = rows.iter().map(|&r| matrix.rows[r][j]).collect();
            score_column(&col, &classes, &config.discretize)
        })
        .collect::<Result<_>>()?;

    let mut order: Vec<usize> = (0..scored.len()).collect();
    order.sort_by(|&a, &b| {
        scored[b].0.total_cmp(&scored[a].0).then_with(|| matrix.channels[a].name.cmp(&matrix.channels[b].name))
    });
    let mut rank = vec![0; scored.len()];
    for (pos, &j) in order.iter().enumerate() {
        rank[j] = pos + 1;
    }
    let lo = scored.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
    let hi = scored.iter().map(|s| s.0).fold(f64::NEG_INFINITY, f64::max);
    Ok(scored
        .iter()
        .enumerate()
        .map(|(j, &(mdl_bits, gain_bits, bins))| ChannelScore {
            name: matrix.channels[j].name.clone(),
            mdl_bits,
            mdl_normalized: if hi > lo { (mdl_bits - lo) / (hi - lo) } else { 0.0 },
            gain_bits,
            rank: rank[j],
            bins,
        })
        .collect())
}

/// Rank every channel over the whole matrix, then build each group's
/// effective feature set from the per-stratum rankings by mean rank.
pub fn rank_and_select(matrix: &FeatureMatrix, strata: &[Stratum], config: &RankConfig) -> Result<MdlReport> {
    if config.efs_size == 0 {
        return Err(Error::Config("efs_size must be at least 1".into()));
    }
    let all: Vec<usize> = (0..matrix.len()).collect();
    let channels = rank_rows(matrix, &all, config)?;

    let mut per_group: BTreeMap<FaultGroup, Vec<Vec<ChannelScore>>> = BTreeMap::new();
    for s in strata {
        if let Some(&r) = s.rows.iter().find(|&&r| r >= matrix.len()) {
            return Err(Error::Ranking(format!("stratum {}/{} references row {r}", s.group, s.system)));
        }
        let ranked = rank_rows(matrix, &s.rows, config)
            .map_err(|e| Error::Ranking(format!("stratum {}/{}: {e}", s.group, s.system)))?;
        per_group.entry(s.group).or_default().push(ranked);
    }
    let mut efs = BTreeMap::new();
    for (group, rankings) in per_group {
        let mut mean: Vec<(f64, &str)> = (0..matrix.channels.len())
            .map(|j| {
                let m = rankings.iter().map(|r| r[j].rank as f64).sum::<f64>() / rankings.len() as f64;
                (m, matrix.channels[j].name.as_str())
            })
            .collect();
        mean.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(b.1)));
        efs.insert(group, mean.iter().take(config.efs_size).map(|(_, n)| n.to_string()).collect());
    }
    Ok(MdlReport { instances: matrix.len(), channels, efs })
}
