//! Anti-parallel DC-source arc model with controlled resistors.
//!
//! Two DC sources (`vp`, `vn`) behind diodes set the ignition thresholds of the
//! positive and negative half-cycles; each conducts through its own controlled
//! resistor. A controlled resistor is a randomizer (uniform draw inside the
//! configured range), a moisture integrator that slowly scales the draw, and a
//! first-order filter that shapes how fast the resistance follows the draw.
//! Between the two thresholds the arc is extinct and no current flows.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;

/// Direction in which accumulated moisture moves the arc resistance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MoistureEffect {
    /// Resistance falls as the contact point wets.
    Wetting,
    /// Resistance rises as the contact point dries out.
    Drying,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HifModelParams {
    /// Positive-half ignition voltage range, volts.
    pub vp_range: (f64, f64),
    /// Negative-half ignition voltage magnitude range, volts.
    pub vn_range: (f64, f64),
    pub rp_range: (f64, f64),
    pub rn_range: (f64, f64),
    /// Sources and resistor draws are refreshed on this period, seconds.
    pub update_interval: f64,
    /// Moisture integrator rate, 1/s. Moisture saturates at 1.
    pub moisture_rate: f64,
    /// Fractional resistance change at full moisture.
    pub moisture_depth: f64,
    pub moisture_effect: MoistureEffect,
    /// Time constant of the resistor response filter, seconds.
    pub response_tau: f64,
}

impl Default for HifModelParams {
    fn default() -> Self {
        Self {
            vp_range: (5_000.0, 6_000.0),
            vn_range: (7_000.0, 8_000.0),
            rp_range: (200.0, 1_500.0),
            rn_range: (200.0, 1_500.0),
            update_interval: 1e-4,
            moisture_rate: 0.2,
            moisture_depth: 0.3,
            moisture_effect: MoistureEffect::Wetting,
            response_tau: 5e-3,
        }
    }
}

impl HifModelParams {
    pub fn validate(&self) -> Result<()> {
        for (name, (lo, hi)) in [
            ("vp_range", self.vp_range),
            ("vn_range", self.vn_range),
            ("rp_range", self.rp_range),
            ("rn_range", self.rn_range),
        ] {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::Config(format!("{name}: low must be below high")));
            }
        }
        if self.vp_range.0 < 0.0 || self.vn_range.0 < 0.0 {
            return Err(Error::Config("arc source voltages are magnitudes and must be >= 0".into()));
        }
        if self.rp_range.0 <= 0.0 || self.rn_range.0 <= 0.0 {
            return Err(Error::Config("arc resistances must be positive".into()));
        }
        if !(self.update_interval > 0.0) {
            return Err(Error::Config("update_interval must be > 0".into()));
        }
        if !(self.response_tau > 0.0) {
            return Err(Error::Config("response_tau must be > 0".into()));
        }
        if !(self.moisture_rate >= 0.0) {
            return Err(Error::Config("moisture_rate must be >= 0".into()));
        }
        if !(0.0..1.0).contains(&self.moisture_depth) {
            return Err(Error::Config("moisture_depth must lie in [0, 1)".into()));
        }
        Ok(())
    }
}

/// Evolving state of one arc model.
#[derive(Clone, Debug)]
pub struct HifModelState {
    pub vp: f64,
    /// Stored as a positive magnitude.
    pub vn: f64,
    /// Current raw (randomized, moisture-scaled) resistor targets.
    pub rp: f64,
    pub rn: f64,
    pub moisture: f64,
    pub rp_filtered: f64,
    pub rn_filtered: f64,
    pub rng: ChaCha8Rng,
    pub t: f64,
    pub t_last_update: f64,
}

/// An arc model bound to its parameters.
#[derive(Clone, Debug)]
pub struct HifModel {
    params: HifModelParams,
    state: HifModelState,
}

fn uniform(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

impl HifModel {
    pub fn new(params: HifModelParams, seed: u64) -> Result<Self> {
        params.validate()?;
        let mut rng = seed::rng(seed);
        let vp = uniform(&mut rng, params.vp_range);
        let vn = uniform(&mut rng, params.vn_range);
        let rp = uniform(&mut rng, params.rp_range);
        let rn = uniform(&mut rng, params.rn_range);
        let state = HifModelState {
            vp,
            vn,
            rp,
            rn,
            moisture: 0.0,
            rp_filtered: rp,
            rn_filtered: rn,
            rng,
            t: 0.0,
            t_last_update: 0.0,
        };
        Ok(Self { params, state })
    }

    pub fn params(&self) -> &HifModelParams {
        &self.params
    }

    pub fn state(&self) -> &HifModelState {
        &self.state
    }

    pub fn state_mut(&mut self) -> &mut HifModelState {
        &mut self.state
    }

    /// Advance the model by `dt` and return the branch current for the
    /// applied voltage `v_ph`.
    pub fn step(&mut self, v_ph: f64, dt: f64) -> Result<f64> {
        self.step_series(v_ph, dt, 0.0)
    }

    /// Like [`HifModel::step`] with an extra linear resistance in series with
    /// the arc (fault impedance).
    pub fn step_series(&mut self, v_ph: f64, dt: f64, r_series: f64) -> Result<f64> {
        if !v_ph.is_finite() {
            return Err(Error::InvalidInput(format!("non-finite arc voltage {v_ph}")));
        }
        if !(dt > 0.0) {
            return Err(Error::InvalidInput(format!("time step must be positive, got {dt}")));
        }
        self.advance(dt);
        Ok(self.current(v_ph, r_series))
    }

    /// Branch current at the present state, without advancing time.
    pub fn current(&self, v_ph: f64, r_series: f64) -> f64 {
        let s = &self.state;
        if v_ph > s.vp {
            (v_ph - s.vp) / (s.rp_filtered + r_series)
        } else if v_ph < -s.vn {
            (v_ph + s.vn) / (s.rn_filtered + r_series)
        } else {
            0.0
        }
    }

    /// Incremental conductance di/dv at the present state.
    pub fn slope(&self, v_ph: f64, r_series: f64) -> f64 {
        let s = &self.state;
        if v_ph > s.vp {
            1.0 / (s.rp_filtered + r_series)
        } else if v_ph < -s.vn {
            1.0 / (s.rn_filtered + r_series)
        } else {
            0.0
        }
    }

    /// Advance time, refreshing the random draws at every update boundary
    /// crossed on the way.
    pub fn advance(&mut self, dt: f64) {
        let interval = self.params.update_interval;
        let mut remaining = dt;
        while remaining > 0.0 {
            let next = self.state.t_last_update + interval;
            let to_boundary = next - self.state.t;
            if to_boundary <= remaining {
                self.relax(to_boundary.max(0.0));
                self.state.t = next;
                self.state.t_last_update = next;
                remaining -= to_boundary.max(0.0);
                self.redraw();
            } else {
                self.relax(remaining);
                self.state.t += remaining;
                remaining = 0.0;
            }
        }
    }

    /// Redraw the sources and resistor targets, then relax over `dt`.
    pub fn resistance_update(&mut self, dt: f64) {
        self.redraw();
        self.relax(dt);
    }

    fn redraw(&mut self) {
        let p = &self.params;
        let s = &mut self.state;
        s.vp = uniform(&mut s.rng, p.vp_range);
        s.vn = uniform(&mut s.rng, p.vn_range);
        let scale = match p.moisture_effect {
            MoistureEffect::Wetting => 1.0 - p.moisture_depth * s.moisture,
            MoistureEffect::Drying => 1.0 + p.moisture_depth * s.moisture,
        };
        s.rp = (uniform(&mut s.rng, p.rp_range) * scale).clamp(p.rp_range.0, p.rp_range.1);
        s.rn = (uniform(&mut s.rng, p.rn_range) * scale).clamp(p.rn_range.0, p.rn_range.1);
    }

    /// Integrate moisture and move the filtered resistances toward their
    /// targets over `dt` (exact first-order step response).
    pub fn relax(&mut self, dt: f64) {
        if dt <= 0.0 {
            return;
        }
        let p = &self.params;
        let s = &mut self.state;
        s.moisture = (s.moisture + p.moisture_rate * dt).min(1.0);
        let alpha = 1.0 - (-dt / p.response_tau).exp();
        s.rp_filtered += (s.rp - s.rp_filtered) * alpha;
        s.rn_filtered += (s.rn - s.rn_filtered) * alpha;
        s.rp_filtered = s.rp_filtered.clamp(p.rp_range.0, p.rp_range.1);
        s.rn_filtered = s.rn_filtered.clamp(p.rn_range.0, p.rn_range.1);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pinned(vp: f64, vn: f64, rp: f64, rn: f64) -> HifModel {
        let mut m = HifModel::new(HifModelParams::default(), 1).unwrap();
        let s = m.state_mut();
        s.vp = vp;
        s.vn = vn;
        s.rp_filtered = rp;
        s.rn_filtered = rn;
        m
    }

    #[test]
    fn positive_conduction() {
        let m = pinned(6000.0, 7500.0, 1000.0, 1500.0);
        assert!((m.current(6500.0, 0.0) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn extinction_between_thresholds() {
        let m = pinned(6000.0, 7500.0, 1000.0, 1500.0);
        assert_eq!(m.current(1000.0, 0.0), 0.0);
        assert_eq!(m.current(-7500.0, 0.0), 0.0);
        assert_eq!(m.current(6000.0, 0.0), 0.0);
    }

    #[test]
    fn negative_conduction() {
        let m = pinned(6000.0, 7500.0, 1000.0, 1500.0);
        assert!((m.current(-9000.0, 0.0) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_finite_voltage() {
        let mut m = HifModel::new(HifModelParams::default(), 3).unwrap();
        assert!(matches!(m.step(f64::NAN, 1e-4), Err(Error::InvalidInput(_))));
        assert!(matches!(m.step(f64::INFINITY, 1e-4), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn bounds_hold_over_long_runs() {
        let params = HifModelParams::default();
        let mut m = HifModel::new(params.clone(), 11).unwrap();
        for k in 0..200_000 {
            let v = 20_000.0 * (k as f64 * 0.01).sin();
            m.step(v, 3.7e-5).unwrap();
            let s = m.state();
            assert!(s.vp >= params.vp_range.0 && s.vp <= params.vp_range.1);
            assert!(s.vn >= params.vn_range.0 && s.vn <= params.vn_range.1);
            assert!(s.rp >= 200.0 && s.rp <= 1500.0);
            assert!(s.rn >= 200.0 && s.rn <= 1500.0);
            assert!(s.rp_filtered >= 200.0 && s.rp_filtered <= 1500.0);
            assert!(s.rn_filtered > 0.0);
        }
    }

    #[test]
    fn filter_step_response_reaches_63_percent_at_tau() {
        let mut m = HifModel::new(HifModelParams { moisture_rate: 0.0, ..Default::default() }, 5).unwrap();
        let tau = m.params().response_tau;
        {
            let s = m.state_mut();
            s.rp_filtered = 200.0;
            s.rp = 1200.0;
        }
        // Relax in many small pieces: the discrete update composes exactly.
        for _ in 0..100 {
            m.relax(tau / 100.0);
        }
        let covered = (m.state().rp_filtered - 200.0) / 1000.0;
        assert!((covered - (1.0 - (-1.0f64).exp())).abs() < 1e-12, "covered {covered}");
    }

    #[test]
    fn zero_moisture_rate_leaves_draws_unscaled() {
        let params = HifModelParams { moisture_rate: 0.0, ..Default::default() };
        let mut a = HifModel::new(params.clone(), 9).unwrap();
        let mut b = HifModel::new(HifModelParams { moisture_depth: 0.0, ..params }, 9).unwrap();
        for _ in 0..5_000 {
            a.advance(1e-4);
            b.advance(1e-4);
            assert_eq!(a.state().moisture, 0.0);
            assert_eq!(a.state().rp, b.state().rp);
            assert_eq!(a.state().rn_filtered, b.state().rn_filtered);
        }
    }

    #[test]
    fn invalid_params_rejected() {
        let bad = HifModelParams { rp_range: (1500.0, 200.0), ..Default::default() };
        assert!(HifModel::new(bad, 0).is_err());
        let bad = HifModelParams { update_interval: 0.0, ..Default::default() };
        assert!(HifModel::new(bad, 0).is_err());
    }
}
