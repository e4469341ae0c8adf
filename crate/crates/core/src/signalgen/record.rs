//! Labeled waveform records and their on-disk form: a `t,va,vb,vc,ia,ib,ic`
//! table plus a TOML sidecar with the metadata.

use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::scenario::ScenarioSpec;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Label {
    #[serde(rename = "HIF")]
    Hif,
    #[serde(rename = "non-HIF")]
    NonHif,
}

impl Label {
    pub fn is_hif(self) -> bool {
        self == Label::Hif
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Hif => "HIF",
            Label::NonHif => "non-HIF",
        }
    }
}

/// Three-phase voltage and current samples of one event, in volts and amperes.
#[derive(Clone, Debug, PartialEq)]
pub struct SignalRecord {
    pub sample_rate: f64,
    pub nominal_freq: f64,
    /// Per-unit bases (peak phase voltage, peak rated current).
    pub v_base: f64,
    pub i_base: f64,
    pub voltages: [Vec<f64>; 3],
    pub currents: [Vec<f64>; 3],
    pub label: Label,
    pub spec: ScenarioSpec,
    /// Time at which the event actually started, seconds.
    pub onset: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Sidecar {
    sample_rate: f64,
    nominal_freq: f64,
    v_base: f64,
    i_base: f64,
    samples: usize,
    label: Label,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    onset: Option<f64>,
    spec: ScenarioSpec,
}

pub const RECORD_HEADER: &str = "t,va,vb,vc,ia,ib,ic";

impl SignalRecord {
    pub fn len(&self) -> usize {
        self.voltages[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dt(&self) -> f64 {
        1.0 / self.sample_rate
    }

    pub fn duration(&self) -> f64 {
        self.len() as f64 / self.sample_rate
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 / self.sample_rate
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.len();
        if self.voltages.iter().chain(self.currents.iter()).any(|c| c.len() != n) {
            return Err(Error::Record("channel lengths differ".into()));
        }
        if !(self.nominal_freq > 0.0 && self.sample_rate >= 12.0 * self.nominal_freq) {
            return Err(Error::Record(format!(
                "sample rate {} Hz cannot resolve harmonic order 6 of {} Hz",
                self.sample_rate, self.nominal_freq
            )));
        }
        if !(self.v_base > 0.0 && self.i_base > 0.0) {
            return Err(Error::Record("per-unit bases must be positive".into()));
        }
        if self.voltages.iter().chain(self.currents.iter()).flatten().any(|x| !x.is_finite()) {
            return Err(Error::Record("non-finite sample".into()));
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(self.len() * 96);
        s.push_str(RECORD_HEADER);
        s.push('\n');
        for k in 0..self.len() {
            let _ = write!(s, "{}", self.time(k));
            for ch in self.voltages.iter().chain(self.currents.iter()) {
                let _ = write!(s, ",{}", ch[k]);
            }
            s.push('\n');
        }
        s
    }

    pub fn sidecar_toml(&self) -> Result<String> {
        let meta = Sidecar {
            sample_rate: self.sample_rate,
            nominal_freq: self.nominal_freq,
            v_base: self.v_base,
            i_base: self.i_base,
            samples: self.len(),
            label: self.label,
            onset: self.onset,
            spec: self.spec.clone(),
        };
        toml::to_string(&meta).map_err(|e| Error::Record(format!("sidecar: {e}")))
    }

    /// Sidecar path belonging to a record table path.
    pub fn sidecar_path(csv: &Path) -> PathBuf {
        csv.with_extension("toml")
    }

    pub fn read(csv: &Path) -> Result<Self> {
        let side = Self::sidecar_path(csv);
        let meta_text = fs::read_to_string(&side).map_err(|e| Error::io(&side, e))?;
        let meta: Sidecar = toml::from_str(&meta_text).map_err(|e| Error::parse(&side, e))?;
        let text = fs::read_to_string(csv).map_err(|e| Error::io(csv, e))?;
        let mut lines = text.lines().filter(|l| !l.starts_with('#'));
        match lines.next() {
            Some(h) if h.trim() == RECORD_HEADER => {}
            other => {
                return Err(Error::parse(csv, format!("expected header `{RECORD_HEADER}`, found {other:?}")));
            }
        }
        let mut cols: [Vec<f64>; 6] = Default::default();
        for (i, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 7 {
                return Err(Error::parse(csv, format!("line {}: expected 7 fields", i + 2)));
            }
            for (c, f) in cols.iter_mut().zip(&fields[1..]) {
                let x: f64 = f
                    .trim()
                    .parse()
                    .map_err(|e| Error::parse(csv, format!("line {}: {e}", i + 2)))?;
                c.push(x);
            }
        }
        let [va, vb, vc, ia, ib, ic] = cols;
        let rec = SignalRecord {
            sample_rate: meta.sample_rate,
            nominal_freq: meta.nominal_freq,
            v_base: meta.v_base,
            i_base: meta.i_base,
            voltages: [va, vb, vc],
            currents: [ia, ib, ic],
            label: meta.label,
            spec: meta.spec,
            onset: meta.onset,
        };
        if rec.len() != meta.samples {
            return Err(Error::parse(csv, format!("sidecar declares {} samples, table has {}", meta.samples, rec.len())));
        }
        rec.validate()?;
        Ok(rec)
    }
}
