//! Streaming detector and the per-record driver.

use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

use super::averager::AveragerState;
use super::config::{DetectorConfig, ANGLE_SIGNALS, N_SIGNALS, SIGNALS};
use super::logic::{compare_step, decision_step, AssertionBits, DelayTimer};
use crate::error::{Error, Result};
use crate::extraction::{assemble_features, FeatureMatrix};
use crate::signalgen::SignalRecord;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceRow {
    pub t: f64,
    pub bits: AssertionBits,
    pub raw: bool,
    pub trip: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DetectionResult {
    pub tripped: bool,
    /// Trip time minus event onset, seconds.
    pub detection_time: Option<f64>,
    /// Absolute time of the trip, seconds.
    pub trip_time: Option<f64>,
    pub bit_trace: Vec<TraceRow>,
    pub skipped_samples: usize,
}

/// The per-record file form of a result.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectionSummary {
    pub tripped: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub detection_time: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub trip_time: Option<f64>,
    pub time_scale: f64,
    pub config_digest: String,
}

impl DetectionResult {
    pub fn summary(&self, config: &DetectorConfig, config_digest: &str) -> DetectionSummary {
        DetectionSummary {
            tripped: self.tripped,
            detection_time: self.detection_time,
            trip_time: self.trip_time,
            time_scale: config.time_scale,
            config_digest: config_digest.to_string(),
        }
    }

    /// `t,b1..b10,b_block,raw,trip` table.
    pub fn trace_csv(&self) -> String {
        let mut s = String::from("t");
        for i in 1..=N_SIGNALS {
            let _ = write!(s, ",b{i}");
        }
        s.push_str(",b_block,raw,trip\n");
        for r in &self.bit_trace {
            let _ = write!(s, "{}", r.t);
            for b in r.bits.b {
                let _ = write!(s, ",{}", u8::from(b));
            }
            let _ = writeln!(s, ",{},{},{}", u8::from(r.bits.block), u8::from(r.raw), u8::from(r.trip));
        }
        s
    }
}

/// Averagers, comparators, gate and delay for one stream.
#[derive(Clone, Debug)]
pub struct Detector {
    config: DetectorConfig,
    averagers: Vec<AveragerState>,
    timer: DelayTimer,
    raw_prev: bool,
    warm_up: f64,
    t0: Option<f64>,
}

impl Detector {
    pub fn new(config: DetectorConfig) -> Result<Self> {
        config.validate()?;
        let spans = config.spans();
        let averagers = (0..N_SIGNALS).map(|i| AveragerState::new(spans[i], config.limiter[i], ANGLE_SIGNALS[i])).collect();
        let timer = DelayTimer::new(config.t_delay);
        let warm_up = config.warm_up();
        Ok(Self { config, averagers, timer, raw_prev: false, warm_up, t0: None })
    }

    pub fn skipped(&self) -> usize {
        self.averagers.iter().map(|a| a.skipped).sum()
    }

    /// Process one window of signal values at time `t`.
    pub fn step(&mut self, t: f64, s: &[f64; N_SIGNALS], block: bool) -> Result<TraceRow> {
        if let Some(last) = self.averagers[0].last_t {
            if t < last {
                return Err(Error::InvalidInput(format!("time went backwards: {t} after {last}")));
            }
        }
        let t0 = *self.t0.get_or_insert(t);
        let warm = t - t0 >= self.warm_up;
        let mut bits = AssertionBits { block, ..Default::default() };
        for i in 0..N_SIGNALS {
            let r = self.averagers[i].step(s[i], t, self.raw_prev);
            bits.b[i] = match r {
                Some(r) if s[i].is_finite() => compare_step(
                    s[i].clamp(self.config.limiter[i].0, self.config.limiter[i].1),
                    r,
                    self.config.gains[i],
                    self.config.mode,
                    self.config.floors[i],
                    ANGLE_SIGNALS[i],
                ),
                _ => false,
            };
        }
        let raw = warm && decision_step(&bits);
        let trip = self.timer.step(raw, t);
        self.raw_prev = raw;
        Ok(TraceRow { t, bits, raw, trip })
    }
}

/// Pull s1..s10 out of a feature matrix, one array per window.
pub fn detector_signals(m: &FeatureMatrix) -> Result<Vec<[f64; N_SIGNALS]>> {
    let idx: Vec<usize> = SIGNALS
        .iter()
        .map(|n| m.channel_index(n).ok_or_else(|| Error::InvalidInput(format!("feature matrix lacks {n}"))))
        .collect::<Result<_>>()?;
    Ok(m.rows.iter().map(|r| std::array::from_fn(|i| r[idx[i]])).collect())
}

/// Run the detector over a windowed signal stream.
pub fn run_on_stream(times: &[f64], signals: &[[f64; N_SIGNALS]], onset: Option<f64>, config: &DetectorConfig) -> Result<DetectionResult> {
    let needed = config.warm_up() + config.t_delay;
    let span = match (times.first(), times.last()) {
        (Some(a), Some(b)) => b - a,
        _ => 0.0,
    };
    if span < needed {
        return Err(Error::InsufficientData(format!(
            "stream covers {span:.3} s, warm-up plus delay needs {needed:.3} s"
        )));
    }
    let mut det = Detector::new(config.clone())?;
    let mut trace = Vec::with_capacity(times.len());
    let mut trip_time = None;
    for (t, s) in times.iter().zip(signals) {
        let row = det.step(*t, s, config.is_blocked(*t))?;
        if row.trip && trip_time.is_none() {
            trip_time = Some(*t);
        }
        trace.push(row);
    }
    Ok(DetectionResult {
        tripped: trip_time.is_some(),
        detection_time: trip_time.map(|t| t - onset.unwrap_or(times[0])),
        trip_time,
        bit_trace: trace,
        skipped_samples: det.skipped(),
    })
}

/// Extract the detector signals from `record` and run the logic over them.
pub fn run_detector(record: &SignalRecord, config: &DetectorConfig) -> Result<DetectionResult> {
    config.validate()?;
    let needed = config.warm_up() + config.t_delay;
    if record.duration() < needed {
        return Err(Error::InsufficientData(format!(
            "record lasts {:.3} s, warm-up plus delay needs {needed:.3} s",
            record.duration()
        )));
    }
    let m = assemble_features(record, &config.extraction)?;
    let s = detector_signals(&m)?;
    run_on_stream(&m.times, &s, record.onset, config)
}
