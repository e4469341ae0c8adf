//! Comparison and gate logic.

use super::config::{CompareMode, N_SIGNALS};
use crate::extraction::phasor::wrap;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct AssertionBits {
    pub b: [bool; N_SIGNALS],
    pub block: bool,
}

/// Comparison bit for one signal. `angle` selects shortest-arc deviation.
pub fn compare_step(s: f64, s_ref: f64, k: f64, mode: CompareMode, floor: f64, angle: bool) -> bool {
    match mode {
        CompareMode::LiteralSign => s - k * s_ref > 0.0,
        CompareMode::AbsoluteDeviation => {
            let dev = if angle { wrap(s - s_ref) } else { s - s_ref };
            dev.abs() > (k - 1.0) * s_ref.abs() + floor
        }
    }
}

/// All four sequence bits, any in-phase KF bit, any quadrature KF bit, and
/// no blocking.
pub fn decision_step(bits: &AssertionBits) -> bool {
    let b = &bits.b;
    let group1 = b[0] && b[1] && b[2] && b[3];
    let group2 = b[4] || b[5] || b[6];
    let group3 = b[7] || b[8] || b[9];
    group1 && group2 && group3 && !bits.block
}

/// Trip timer: output goes high once its input has stayed high for `t_delay`.
#[derive(Clone, Debug)]
pub struct DelayTimer {
    t_delay: f64,
    since: Option<f64>,
}

impl DelayTimer {
    pub fn new(t_delay: f64) -> Self {
        Self { t_delay, since: None }
    }

    pub fn step(&mut self, raw: bool, t: f64) -> bool {
        if !raw {
            self.since = None;
            return false;
        }
        let start = *self.since.get_or_insert(t);
        t - start >= self.t_delay - 1e-12
    }
}
