//! Scale presets and the combined settings every pipeline stage reads.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::detector::DetectorConfig;
use crate::error::{Error, Result};
use crate::evaluation::{Aggregation, ClassifierKind, CorpusConfig, CvConfig, SweepConfig};
use crate::extraction::ExtractionConfig;
use crate::ranking::RankConfig;
use crate::signalgen::{build_catalog, CatalogConfig, GridConfig};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    /// Scaled catalog and corpus sizes that finish in seconds.
    #[default]
    Desk,
    /// Full catalog cardinalities and the large train/test splits.
    Paper,
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Preset::Desk => "desk",
            Preset::Paper => "paper",
        })
    }
}

impl std::str::FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "desk" => Ok(Preset::Desk),
            "paper" => Ok(Preset::Paper),
            other => Err(Error::Config(format!("unknown preset `{other}` (expected desk or paper)"))),
        }
    }
}

/// Size of the held-out test corpus.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HoldoutConfig {
    pub faults: usize,
    pub non_faults: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    pub preset: Preset,
    /// Root seed; catalog seeds follow it.
    pub seed: u64,
    pub grid: GridConfig,
    pub extraction: ExtractionConfig,
    pub corpus: CorpusConfig,
    pub holdout: HoldoutConfig,
    pub aggregation: Aggregation,
    pub rank: RankConfig,
    pub detector: DetectorConfig,
    pub cv: CvConfig,
    /// Cross-validation repeats, each with its own fold seed.
    pub cv_seeds: usize,
    pub classifiers: Vec<ClassifierKind>,
    pub sweep: SweepConfig,
}

impl Default for Settings {
    fn default() -> Self {
        Self::preset(Preset::Desk)
    }
}

impl Settings {
    pub fn preset(preset: Preset) -> Self {
        let (catalog, train, test, per_point) = match preset {
            Preset::Desk => (CatalogConfig::desk(), (200, 200), (100, 100), (60, 60)),
            Preset::Paper => (CatalogConfig::full(), (1944, 1944), (972, 972), (324, 216)),
        };
        let sweep = SweepConfig {
            catalog: catalog.clone(),
            faults_per_point: per_point.0,
            non_faults: per_point.1,
            ..SweepConfig::default()
        };
        Self {
            preset,
            seed: 0,
            grid: GridConfig::default(),
            extraction: ExtractionConfig::default(),
            corpus: CorpusConfig { catalog, faults: train.0, non_faults: train.1, include_three_phase: false },
            holdout: HoldoutConfig { faults: test.0, non_faults: test.1 },
            aggregation: Aggregation::default(),
            rank: RankConfig::default(),
            detector: DetectorConfig::default(),
            cv: CvConfig::default(),
            cv_seeds: 5,
            classifiers: ClassifierKind::ALL.to_vec(),
            sweep,
        }
    }

    /// Set the root seed and carry it into every catalog.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self.corpus.catalog.seed = seed;
        self.sweep.catalog.seed = seed;
        self
    }

    /// Corpus drawn from the held-out catalog.
    pub fn holdout_corpus(&self) -> CorpusConfig {
        CorpusConfig {
            catalog: self.corpus.catalog.holdout(),
            faults: self.holdout.faults,
            non_faults: self.holdout.non_faults,
            include_three_phase: self.corpus.include_three_phase,
        }
    }

    /// Cross-field checks across every section.
    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        self.extraction.validate()?;
        self.detector.validate()?;
        build_catalog(&self.corpus.catalog)?;
        build_catalog(&self.sweep.catalog)?;
        if self.cv.folds < 2 {
            return Err(Error::Config(format!("cv.folds must be at least 2, got {}", self.cv.folds)));
        }
        if self.cv_seeds == 0 || self.classifiers.is_empty() {
            return Err(Error::Config("cv_seeds and classifiers must be non-empty".into()));
        }
        if self.corpus.faults == 0 || self.corpus.non_faults == 0 {
            return Err(Error::Config("the training corpus needs both classes".into()));
        }
        if self.rank.efs_size == 0 {
            return Err(Error::Config("rank.efs_size must be positive".into()));
        }
        Ok(())
    }

    pub fn digest(&self) -> String {
        crate::digest::of_json(self)
    }
}
