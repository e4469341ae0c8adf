//! Kalman-filter tracker for harmonic coefficients.
//!
//! The state holds in-phase and quadrature coefficients of orders 1..6 plus a
//! DC offset; a sample at time `t` is observed through
//! `h(t) = [cos ωt, sin ωt, …, cos 6ωt, sin 6ωt, 1]`. Coefficients follow a
//! random walk.

use nalgebra::{SMatrix, SVector};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::error::{Error, Result};

pub const KF_ORDERS: usize = 6;
pub const KF_DIM: usize = 2 * KF_ORDERS + 1;

pub type KfVector = SVector<f64, KF_DIM>;
pub type KfMatrix = SMatrix<f64, KF_DIM, KF_DIM>;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KfConfig {
    /// Process-noise variance per step.
    pub q: f64,
    /// Measurement-noise variance.
    pub r: f64,
    /// Initial covariance diagonal.
    pub p0: f64,
}

impl Default for KfConfig {
    fn default() -> Self {
        Self { q: 1e-4, r: 1e-2, p0: 1.0 }
    }
}

impl KfConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.q >= 0.0 && self.r > 0.0 && self.p0 > 0.0) {
            return Err(Error::Config("kalman: need q >= 0, r > 0, p0 > 0".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct KfState {
    pub x: KfVector,
    pub p: KfMatrix,
    pub q: f64,
    pub r: f64,
    pub t: f64,
}

pub fn observation_row(t: f64, nominal_freq: f64) -> KfVector {
    let w = TAU * nominal_freq * t;
    let mut h = KfVector::zeros();
    for n in 0..KF_ORDERS {
        let (s, c) = ((n + 1) as f64 * w).sin_cos();
        h[2 * n] = c;
        h[2 * n + 1] = s;
    }
    h[KF_DIM - 1] = 1.0;
    h
}

impl KfState {
    pub fn new(config: &KfConfig) -> Self {
        Self { x: KfVector::zeros(), p: KfMatrix::identity() * config.p0, q: config.q, r: config.r, t: 0.0 }
    }

    /// In-phase coefficient of order `n` (1-based).
    pub fn cos_coef(&self, n: usize) -> f64 {
        self.x[2 * (n - 1)]
    }

    /// Quadrature coefficient of order `n` (1-based).
    pub fn sin_coef(&self, n: usize) -> f64 {
        self.x[2 * (n - 1) + 1]
    }

    pub fn dc(&self) -> f64 {
        self.x[KF_DIM - 1]
    }

    /// Predict and update with one sample taken at time `t`.
    pub fn update(&mut self, sample: f64, t: f64, nominal_freq: f64) -> Result<()> {
        if !sample.is_finite() {
            return Err(Error::InvalidInput(format!("non-finite sample {sample} at t = {t}")));
        }
        if self.q > 0.0 {
            for d in 0..KF_DIM {
                self.p[(d, d)] += self.q;
            }
        }
        let h = observation_row(t, nominal_freq);
        let ph = self.p * h;
        let s = h.dot(&ph) + self.r;
        let k = ph / s;
        let innovation = sample - h.dot(&self.x);
        self.x += k * innovation;
        self.p -= k * ph.transpose();
        self.p = (self.p + self.p.transpose()) * 0.5;
        self.t = t;
        Ok(())
    }
}

/// Functional form of [`KfState::update`].
pub fn kf_step(state: &KfState, sample: f64, t: f64, nominal_freq: f64) -> Result<KfState> {
    let mut next = state.clone();
    next.update(sample, t, nominal_freq)?;
    Ok(next)
}
