//! Sliding-mean reference for one signal.

use std::collections::VecDeque;

use crate::extraction::phasor::wrap;

#[derive(Clone, Debug)]
pub struct AveragerState {
    span: f64,
    limiter: (f64, f64),
    angle: bool,
    buf: VecDeque<(f64, f64)>,
    sum: f64,
    sum_sin: f64,
    sum_cos: f64,
    pub last_t: Option<f64>,
    /// Non-finite inputs ignored so far.
    pub skipped: usize,
}

impl AveragerState {
    pub fn new(span: f64, limiter: (f64, f64), angle: bool) -> Self {
        Self { span, limiter, angle, buf: VecDeque::new(), sum: 0.0, sum_sin: 0.0, sum_cos: 0.0, last_t: None, skipped: 0 }
    }

    /// Current reference, or `None` before any sample.
    pub fn reference(&self) -> Option<f64> {
        if self.buf.is_empty() {
            None
        } else if self.angle {
            Some(wrap(self.sum_sin.atan2(self.sum_cos)))
        } else {
            Some(self.sum / self.buf.len() as f64)
        }
    }

    /// Time covered by the buffered samples.
    pub fn filled(&self) -> f64 {
        match (self.buf.front(), self.buf.back()) {
            (Some(a), Some(b)) => b.0 - a.0,
            _ => 0.0,
        }
    }

    /// Fold `s` in at time `t` unless `frozen`; returns the reference in
    /// effect before this sample.
    pub fn step(&mut self, s: f64, t: f64, frozen: bool) -> Option<f64> {
        let r = self.reference();
        self.last_t = Some(t);
        if !s.is_finite() {
            self.skipped += 1;
            return r;
        }
        if frozen {
            return r;
        }
        let x = s.clamp(self.limiter.0, self.limiter.1);
        self.buf.push_back((t, x));
        self.add(x, 1.0);
        while let Some(&(t0, x0)) = self.buf.front() {
            if t - t0 < self.span {
                break;
            }
            self.buf.pop_front();
            self.add(x0, -1.0);
        }
        r
    }

    fn add(&mut self, x: f64, sign: f64) {
        if self.angle {
            self.sum_sin += sign * x.sin();
            self.sum_cos += sign * x.cos();
        } else {
            self.sum += sign * x;
        }
    }
}
