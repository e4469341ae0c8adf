//! Scenario catalogs: the cartesian product of the event dimensions.

use serde::{Deserialize, Serialize};
use std::io::{BufRead, Write};
use std::path::Path;

use super::scenario::{DerTech, EventClass, FaultParams, Location, ScenarioSpec};
use crate::error::{Error, Result};
use crate::seed;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatalogConfig {
    pub loadings: Vec<u32>,
    pub der_techs: Vec<DerTech>,
    pub fault_cases: Vec<EventClass>,
    pub impedances: Vec<f64>,
    pub inception_angles: Vec<u32>,
    pub locations: Vec<Location>,
    /// Load-switching step sizes; each yields one add and one shed event.
    pub load_steps_pct: Vec<u32>,
    pub x_over_r: f64,
    pub duration: f64,
    pub event_time: f64,
    pub seed: u64,
}

impl CatalogConfig {
    /// Every dimension at its full cardinality: 8 loadings, 3 DER technologies,
    /// 13 fault cases, 6 impedances, 4 inception angles, 3 locations.
    pub fn full() -> Self {
        Self {
            loadings: (3..=10).map(|k| k * 10).collect(),
            der_techs: DerTech::ALL.to_vec(),
            fault_cases: EventClass::fault_cases(),
            impedances: vec![30.0, 100.0, 200.0, 300.0, 400.0, 500.0],
            inception_angles: vec![0, 30, 60, 90],
            locations: Location::ALL.to_vec(),
            load_steps_pct: vec![5, 10, 15],
            x_over_r: 10.0,
            duration: 2.0,
            event_time: 1.0,
            seed: 0,
        }
    }

    /// Scaled catalog: 2 loadings, 1 DER technology, 13 fault cases,
    /// 2 impedances, 2 angles, 1 location.
    pub fn desk() -> Self {
        Self {
            loadings: vec![50, 100],
            der_techs: vec![DerTech::Synchronous],
            impedances: vec![100.0, 300.0],
            inception_angles: vec![0, 90],
            locations: vec![Location::Bus19],
            ..Self::full()
        }
    }

    /// Test catalog for held-out scoring: a disjoint seed stream, fault
    /// impedances scaled by 0.9, and each inception angle moved one
    /// 30-degree step (up, or down from 90).
    pub fn holdout(&self) -> Self {
        let mut angles: Vec<u32> = self.inception_angles.iter().map(|&a| if a + 30 <= 90 { a + 30 } else { a - 30 }).collect();
        angles.sort_unstable();
        angles.dedup();
        Self {
            impedances: self.impedances.iter().map(|z| z * 0.9).collect(),
            inception_angles: angles,
            seed: seed::derive_str(self.seed, "holdout"),
            ..self.clone()
        }
    }

    fn check(&self) -> Result<()> {
        let dims = [
            ("loadings", self.loadings.len()),
            ("der_techs", self.der_techs.len()),
            ("fault_cases", self.fault_cases.len()),
            ("impedances", self.impedances.len()),
            ("inception_angles", self.inception_angles.len()),
            ("locations", self.locations.len()),
            ("load_steps_pct", self.load_steps_pct.len()),
        ];
        for (name, n) in dims {
            if n == 0 {
                return Err(Error::Config(format!("catalog dimension `{name}` is empty")));
            }
        }
        if let Some(c) = self.fault_cases.iter().find(|c| !c.is_fault()) {
            return Err(Error::Config(format!("`{c}` listed as a fault case")));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Catalog {
    pub faults: Vec<ScenarioSpec>,
    pub non_faults: Vec<ScenarioSpec>,
}

impl Catalog {
    pub fn len(&self) -> usize {
        self.faults.len() + self.non_faults.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = &ScenarioSpec> {
        self.faults.iter().chain(self.non_faults.iter())
    }

    /// One JSON object per line; `#` lines are skipped on reading.
    pub fn write_jsonl(&self, w: &mut impl Write) -> std::io::Result<()> {
        for spec in self.iter() {
            serde_json::to_writer(&mut *w, spec)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn read_jsonl(path: &Path) -> Result<Self> {
        let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let mut cat = Catalog::default();
        for (n, line) in std::io::BufReader::new(f).lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let spec: ScenarioSpec =
                serde_json::from_str(&line).map_err(|e| Error::parse(path, format!("line {}: {e}", n + 1)))?;
            spec.validate()?;
            if spec.is_fault() {
                cat.faults.push(spec);
            } else {
                cat.non_faults.push(spec);
            }
        }
        Ok(cat)
    }
}

/// Enumerate every fault and non-fault scenario of the configured dimensions.
pub fn build_catalog(config: &CatalogConfig) -> Result<Catalog> {
    config.check()?;
    let mut faults = Vec::new();
    for &der_tech in &config.der_techs {
        for &loading_pct in &config.loadings {
            for &event_class in &config.fault_cases {
                for &impedance in &config.impedances {
                    for &inception_angle in &config.inception_angles {
                        for &location in &config.locations {
                            faults.push(ScenarioSpec {
                                event_class,
                                loading_pct,
                                der_tech,
                                fault: Some(FaultParams { impedance, inception_angle, location }),
                                x_over_r: config.x_over_r,
                                duration: config.duration,
                                event_time: config.event_time,
                                seed: 0,
                            });
                        }
                    }
                }
            }
        }
    }
    let mut non_faults = Vec::new();
    for &der_tech in &config.der_techs {
        for &loading_pct in &config.loadings {
            for event_class in EventClass::non_fault_cases(&config.load_steps_pct) {
                non_faults.push(ScenarioSpec {
                    event_class,
                    loading_pct,
                    der_tech,
                    fault: None,
                    x_over_r: config.x_over_r,
                    duration: config.duration,
                    event_time: config.event_time,
                    seed: 0,
                });
            }
        }
    }
    for spec in faults.iter_mut().chain(non_faults.iter_mut()) {
        spec.seed = seed::derive_str(config.seed, &spec.tag());
        spec.validate()?;
    }
    Ok(Catalog { faults, non_faults })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn full_catalog_counts() {
        let cat = build_catalog(&CatalogConfig::full()).unwrap();
        assert_eq!(cat.faults.len(), 22_464);
        assert_eq!(cat.non_faults.len(), 216);
    }

    #[test]
    fn desk_catalog_counts() {
        let cat = build_catalog(&CatalogConfig::desk()).unwrap();
        assert_eq!(cat.faults.len(), 104);
        assert_eq!(cat.non_faults.len(), 18);
    }

    #[test]
    fn seeds_are_distinct() {
        let cat = build_catalog(&CatalogConfig::full()).unwrap();
        let seeds: HashSet<u64> = cat.iter().map(|s| s.seed).collect();
        assert_eq!(seeds.len(), cat.len());
    }

    #[test]
    fn empty_dimension_is_config_error() {
        let cfg = CatalogConfig { impedances: vec![], ..CatalogConfig::desk() };
        assert!(matches!(build_catalog(&cfg), Err(Error::Config(_))));
        let cfg = CatalogConfig { loadings: vec![], ..CatalogConfig::desk() };
        assert!(matches!(build_catalog(&cfg), Err(Error::Config(_))));
    }

    #[test]
    fn holdout_is_disjoint() {
        let train = build_catalog(&CatalogConfig::desk()).unwrap();
        let test = build_catalog(&CatalogConfig::desk().holdout()).unwrap();
        assert_eq!(test.faults.len(), train.faults.len());
        let seeds: HashSet<u64> = train.iter().map(|s| s.seed).collect();
        assert!(test.iter().all(|s| !seeds.contains(&s.seed)));
        let params: HashSet<String> = train.faults.iter().map(|s| s.tag()).collect();
        assert!(test.faults.iter().all(|s| !params.contains(&s.tag())));
        assert_eq!(CatalogConfig::full().holdout().inception_angles, vec![30, 60, 90]);
    }

    #[test]
    fn jsonl_roundtrip() {
        let cat = build_catalog(&CatalogConfig::desk()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("catalog.jsonl");
        let mut f = std::fs::File::create(&path).unwrap();
        cat.write_jsonl(&mut f).unwrap();
        drop(f);
        assert_eq!(Catalog::read_jsonl(&path).unwrap(), cat);
    }
}
