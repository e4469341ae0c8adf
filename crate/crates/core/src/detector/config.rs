//! Detector settings.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extraction::ExtractionConfig;

pub const N_SIGNALS: usize = 10;

/// Feature channels feeding s1..s10.
pub const SIGNALS: [&str; N_SIGNALS] = [
    "V2",
    "I2",
    "theta_V2_minus_V0",
    "theta_I2_minus_I0",
    "KF_Va_cos_H3",
    "KF_Vb_cos_H3",
    "KF_Vc_cos_H3",
    "KF_Va_sin_H3",
    "KF_Vb_sin_H3",
    "KF_Vc_sin_H3",
];

/// Signals whose reference is a circular mean and whose deviations wrap.
pub const ANGLE_SIGNALS: [bool; N_SIGNALS] = [false, false, true, true, false, false, false, false, false, false];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CompareMode {
    /// Assert iff `s − k·s_ref > 0`.
    LiteralSign,
    /// Assert iff `|s − s_ref| > (k − 1)·|s_ref| + ε`.
    AbsoluteDeviation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DetectorConfig {
    /// Reference averaging spans before time scaling, seconds.
    pub time_constants: [f64; N_SIGNALS],
    /// Factor applied to `time_constants`; 1/600 turns five minutes into half a second.
    pub time_scale: f64,
    pub gains: [f64; N_SIGNALS],
    pub t_delay: f64,
    /// Per-signal (min, max) clamp applied before averaging.
    pub limiter: [(f64, f64); N_SIGNALS],
    /// Per-signal deviation floor ε for near-zero references.
    pub floors: [f64; N_SIGNALS],
    pub mode: CompareMode,
    /// Intervals (start, end) in seconds during which the blocking input is high.
    pub block_intervals: Vec<(f64, f64)>,
    pub extraction: ExtractionConfig,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        let pi = std::f64::consts::PI;
        Self {
            time_constants: [300.0; N_SIGNALS],
            time_scale: 1.0 / 600.0,
            gains: [1.2; N_SIGNALS],
            t_delay: 0.1,
            limiter: [
                (0.0, 1.0),
                (0.0, 5.0),
                (-pi, pi),
                (-pi, pi),
                (-0.5, 0.5),
                (-0.5, 0.5),
                (-0.5, 0.5),
                (-0.5, 0.5),
                (-0.5, 0.5),
                (-0.5, 0.5),
            ],
            floors: [2e-4, 5e-4, 0.15, 0.15, 1.5e-4, 1.5e-4, 1.5e-4, 1.5e-4, 1.5e-4, 1.5e-4],
            mode: CompareMode::AbsoluteDeviation,
            block_intervals: vec![],
            extraction: ExtractionConfig::default(),
        }
    }
}

impl DetectorConfig {
    /// Averaging span of each signal in simulated seconds.
    pub fn spans(&self) -> [f64; N_SIGNALS] {
        self.time_constants.map(|t| t * self.time_scale)
    }

    /// Leading stretch of every record excluded from trip evaluation.
    pub fn warm_up(&self) -> f64 {
        self.spans().into_iter().fold(0.0, f64::max)
    }

    pub fn is_blocked(&self, t: f64) -> bool {
        self.block_intervals.iter().any(|&(a, b)| t >= a && t <= b)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.time_scale > 0.0) {
            return Err(Error::Config("time_scale must be > 0".into()));
        }
        for i in 0..N_SIGNALS {
            if !(self.time_constants[i] > 0.0) {
                return Err(Error::Config(format!("time constant t{} must be > 0", i + 1)));
            }
            if !(self.gains[i] > 0.0) {
                return Err(Error::Config(format!("gain k{} must be > 0", i + 1)));
            }
            let (lo, hi) = self.limiter[i];
            if !(lo < hi) {
                return Err(Error::Config(format!("limiter {} must have min < max", i + 1)));
            }
            if !(self.floors[i] >= 0.0) {
                return Err(Error::Config(format!("floor {} must be >= 0", i + 1)));
            }
        }
        if !(self.t_delay >= 0.0) {
            return Err(Error::Config("t_delay must be >= 0".into()));
        }
        self.extraction.validate()
    }
}
