//! Thevenin-equivalent feeder: a source behind its short-circuit impedance,
//! a three-phase line with sequence impedances, and a lumped grounded-wye load
//! (plus an optional capacitor bank) at the feeder end. Steady states are
//! solved as phasors per harmonic order; see `synth` for how events are
//! stitched into waveforms.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::arc::HifModelParams;
use super::scenario::{DerTech, Location, Phase};
use crate::error::{Error, Result};

pub type CMat3 = Matrix3<Complex64>;
pub type CVec3 = Vector3<Complex64>;

/// Where the voltage transformers sit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VoltagePoint {
    Substation,
    /// Remote voltage measurement at the end of the feeder; currents are always
    /// measured at the substation.
    FeederEnd,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocationTable {
    pub bus3: f64,
    pub bus11: f64,
    pub bus19: f64,
}

impl LocationTable {
    pub fn km(&self, loc: Location) -> f64 {
        match loc {
            Location::Bus3 => self.bus3,
            Location::Bus11 => self.bus11,
            Location::Bus19 => self.bus19,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub nominal_freq: f64,
    pub sample_rate: f64,
    pub nominal_ll_kv: f64,
    /// Three-phase short-circuit level at the source, MVA.
    pub source_sc_mva: f64,
    pub source_z0_over_z1: f64,
    /// Negative-sequence content of the source EMF, percent of positive.
    pub source_unbalance_pct: f64,
    pub source_unbalance_deg: f64,
    /// Line (r, x) per km, positive sequence.
    pub line_z1_per_km: (f64, f64),
    /// Line (r, x) per km, zero sequence.
    pub line_z0_per_km: (f64, f64),
    pub locations_km: LocationTable,
    pub feeder_km: f64,
    pub load_rated_mva: f64,
    pub load_pf: f64,
    /// Per-phase deviation of the load admittance from balanced, percent.
    pub load_unbalance_pct: [f64; 3],
    pub capacitor_mvar: f64,
    /// Decay constant of the capacitor energizing oscillation, seconds.
    pub capacitor_damping_tau: f64,
    /// Background (order, percent) harmonic EMF for an inverter-based system;
    /// a hybrid system carries half of it, a synchronous one none.
    pub inverter_harmonics: Vec<(u32, f64)>,
    /// Third-harmonic current drawn by nonlinear load, percent of the
    /// fundamental load current of each phase.
    pub load_h3_pct: f64,
    /// Gaussian measurement noise, per unit of the channel base.
    pub noise_pu: f64,
    pub voltage_point: VoltagePoint,
    pub hif: HifModelParams,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            nominal_freq: 60.0,
            sample_rate: 2000.0,
            nominal_ll_kv: 34.5,
            source_sc_mva: 250.0,
            source_z0_over_z1: 1.0,
            source_unbalance_pct: 0.03,
            source_unbalance_deg: 120.0,
            line_z1_per_km: (0.19, 0.40),
            line_z0_per_km: (0.45, 1.25),
            locations_km: LocationTable { bus3: 2.0, bus11: 7.0, bus19: 12.0 },
            feeder_km: 14.0,
            load_rated_mva: 10.0,
            load_pf: 0.9,
            load_unbalance_pct: [0.0, -0.7, 0.7],
            capacitor_mvar: 1.2,
            capacitor_damping_tau: 6e-3,
            inverter_harmonics: vec![(5, 1.0), (7, 0.6)],
            load_h3_pct: 1.0,
            noise_pu: 3e-4,
            voltage_point: VoltagePoint::FeederEnd,
            hif: HifModelParams::default(),
        }
    }
}

/// Knobs of the network that events change.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NetworkCondition {
    /// Multiplier on the rated load admittance.
    pub load_scale: f64,
    pub capacitor_on: bool,
    /// Phase severed between the fault point and the load.
    pub open_phase: Option<Phase>,
    pub x_over_r: f64,
    pub der_tech: DerTech,
}

/// Steady-state phasors (peak convention) at one harmonic order.
#[derive(Clone, Debug)]
pub struct HarmonicSolution {
    pub order: u32,
    pub v_meas: CVec3,
    pub i_meas: CVec3,
    /// Voltage at every candidate fault point, indexed like `Location::ALL`.
    pub v_fault_point: [CVec3; 3],
}

#[derive(Clone, Debug)]
pub struct SteadyState {
    pub harmonics: Vec<HarmonicSolution>,
    pub open_phase: Option<Phase>,
}

impl SteadyState {
    fn eval(&self, t: f64, omega: f64, pick: impl Fn(&HarmonicSolution) -> &CVec3) -> [f64; 3] {
        let mut out = [0.0; 3];
        for h in &self.harmonics {
            let rot = Complex64::from_polar(1.0, f64::from(h.order) * omega * t);
            let x = pick(h);
            for p in 0..3 {
                out[p] += (x[p] * rot).re;
            }
        }
        out
    }

    fn eval_rate(&self, t: f64, omega: f64, pick: impl Fn(&HarmonicSolution) -> &CVec3) -> [f64; 3] {
        let mut out = [0.0; 3];
        for h in &self.harmonics {
            let w = f64::from(h.order) * omega;
            let rot = Complex64::new(0.0, w) * Complex64::from_polar(1.0, w * t);
            let x = pick(h);
            for p in 0..3 {
                out[p] += (x[p] * rot).re;
            }
        }
        out
    }

    pub fn v_meas(&self, t: f64, omega: f64) -> [f64; 3] {
        self.eval(t, omega, |h| &h.v_meas)
    }

    pub fn i_meas(&self, t: f64, omega: f64) -> [f64; 3] {
        self.eval(t, omega, |h| &h.i_meas)
    }

    pub fn v_fault(&self, loc: Location, t: f64, omega: f64) -> [f64; 3] {
        self.eval(t, omega, |h| &h.v_fault_point[loc as usize])
    }

    pub fn v_fault_rate(&self, loc: Location, t: f64, omega: f64) -> [f64; 3] {
        self.eval_rate(t, omega, |h| &h.v_fault_point[loc as usize])
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Phase-frame impedance matrix of a transposed element from its sequence impedances.
pub fn phase_matrix(z1: Complex64, z0: Complex64) -> CMat3 {
    let zs = (z0 + z1 * 2.0) / 3.0;
    let zm = (z0 - z1) / 3.0;
    CMat3::new(zs, zm, zm, zm, zs, zm, zm, zm, zs)
}

impl GridConfig {
    pub fn omega(&self) -> f64 {
        2.0 * PI * self.nominal_freq
    }

    /// Peak line-to-neutral nominal voltage, the voltage per-unit base.
    pub fn v_base(&self) -> f64 {
        self.nominal_ll_kv * 1e3 / 3f64.sqrt() * 2f64.sqrt()
    }

    /// Peak rated feeder current, the current per-unit base.
    pub fn i_base(&self) -> f64 {
        let v_ln_rms = self.nominal_ll_kv * 1e3 / 3f64.sqrt();
        self.load_rated_mva * 1e6 / (3.0 * v_ln_rms) * 2f64.sqrt()
    }

    /// A perfectly balanced, noise-free variant at an exact 32 samples/cycle.
    pub fn balanced() -> Self {
        Self {
            sample_rate: 1920.0,
            source_unbalance_pct: 0.0,
            load_unbalance_pct: [0.0; 3],
            inverter_harmonics: vec![],
            load_h3_pct: 0.0,
            noise_pu: 0.0,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("nominal_freq", self.nominal_freq),
            ("sample_rate", self.sample_rate),
            ("nominal_ll_kv", self.nominal_ll_kv),
            ("source_sc_mva", self.source_sc_mva),
            ("source_z0_over_z1", self.source_z0_over_z1),
            ("feeder_km", self.feeder_km),
            ("load_rated_mva", self.load_rated_mva),
            ("capacitor_damping_tau", self.capacitor_damping_tau),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if self.sample_rate < 12.0 * self.nominal_freq {
            return Err(Error::Config(format!(
                "sample_rate {} Hz cannot resolve harmonic order 6 of {} Hz (need >= {} Hz)",
                self.sample_rate,
                self.nominal_freq,
                12.0 * self.nominal_freq
            )));
        }
        if !(self.load_pf > 0.0 && self.load_pf <= 1.0) {
            return Err(Error::Config("load_pf must lie in (0, 1]".into()));
        }
        let l = &self.locations_km;
        if !(0.0 < l.bus3 && l.bus3 < l.bus11 && l.bus11 < l.bus19 && l.bus19 <= self.feeder_km) {
            return Err(Error::Config("locations must increase along the feeder and fit inside it".into()));
        }
        if self.noise_pu < 0.0 || self.capacitor_mvar < 0.0 || self.load_h3_pct < 0.0 {
            return Err(Error::Config("noise, capacitor size and load harmonics must be non-negative".into()));
        }
        self.hif.validate()
    }

    fn source_z1(&self, x_over_r: f64, order: u32) -> Complex64 {
        let zmag = self.nominal_ll_kv.powi(2) / self.source_sc_mva;
        let r = zmag / (1.0 + x_over_r * x_over_r).sqrt();
        c(r, r * x_over_r * f64::from(order))
    }

    pub fn source_matrix(&self, x_over_r: f64, order: u32) -> CMat3 {
        let z1 = self.source_z1(x_over_r, order);
        phase_matrix(z1, z1 * self.source_z0_over_z1)
    }

    pub fn line_matrix(&self, km: f64, order: u32) -> CMat3 {
        let h = f64::from(order);
        let z1 = c(self.line_z1_per_km.0, self.line_z1_per_km.1 * h) * km;
        let z0 = c(self.line_z0_per_km.0, self.line_z0_per_km.1 * h) * km;
        phase_matrix(z1, z0)
    }

    /// Series impedance from the source EMF to a fault location.
    pub fn upstream_matrix(&self, x_over_r: f64, loc: Location, order: u32) -> CMat3 {
        self.source_matrix(x_over_r, order) + self.line_matrix(self.locations_km.km(loc), order)
    }

    /// Capacitance per phase of the switched bank, farads.
    pub fn capacitance(&self) -> f64 {
        let v_ln_rms = self.nominal_ll_kv * 1e3 / 3f64.sqrt();
        self.capacitor_mvar * 1e6 / (3.0 * self.omega() * v_ln_rms * v_ln_rms)
    }

    fn emf(&self, order: u32, der: DerTech) -> Option<CVec3> {
        let vpk = self.v_base();
        let shift = |k: usize, h: f64| -2.0 * PI / 3.0 * k as f64 * h;
        if order == 1 {
            let u = self.source_unbalance_pct / 100.0;
            let th = self.source_unbalance_deg.to_radians();
            let e = CVec3::from_fn(|k, _| {
                Complex64::from_polar(vpk, shift(k, 1.0)) + Complex64::from_polar(vpk * u, th - shift(k, 1.0))
            });
            return Some(e);
        }
        let weight = match der {
            DerTech::Synchronous => 0.0,
            DerTech::Inverter => 1.0,
            DerTech::Hybrid => 0.5,
        };
        let pct = self.inverter_harmonics.iter().find(|(h, _)| *h == order).map(|(_, p)| *p)?;
        if weight == 0.0 || pct == 0.0 {
            return None;
        }
        let mag = vpk * pct / 100.0 * weight;
        Some(CVec3::from_fn(|k, _| Complex64::from_polar(mag, shift(k, f64::from(order)))))
    }

    fn load_admittance(&self, cond: &NetworkCondition, order: u32) -> CMat3 {
        let h = f64::from(order);
        let v_ln_rms = self.nominal_ll_kv * 1e3 / 3f64.sqrt();
        let zmag = v_ln_rms * v_ln_rms / (self.load_rated_mva * 1e6 / 3.0);
        let r = zmag * self.load_pf;
        let x = zmag * (1.0 - self.load_pf * self.load_pf).sqrt();
        let y_unit = c(r, x * h).inv();
        let y_cap = if cond.capacitor_on { c(0.0, h * self.omega() * self.capacitance()) } else { c(0.0, 0.0) };
        let mut y = CMat3::zeros();
        for p in 0..3 {
            if cond.open_phase.map(Phase::index) == Some(p) {
                continue;
            }
            let scale = cond.load_scale * (1.0 + self.load_unbalance_pct[p] / 100.0);
            y[(p, p)] = y_unit * scale + y_cap;
        }
        y
    }

    /// Harmonic orders that carry EMF or load injection under the given DER technology.
    fn orders(&self, der: DerTech) -> Vec<u32> {
        let mut v = vec![1];
        if self.load_h3_pct > 0.0 {
            v.push(3);
        }
        for &(h, _) in &self.inverter_harmonics {
            if h > 1 && self.emf(h, der).is_some() && !v.contains(&h) {
                v.push(h);
            }
        }
        v
    }

    pub fn solve(&self, cond: &NetworkCondition) -> Result<SteadyState> {
        let mut harmonics: Vec<HarmonicSolution> = Vec::new();
        for order in self.orders(cond.der_tech) {
            let e = self.emf(order, cond.der_tech).unwrap_or_else(CVec3::zeros);
            let zs = self.source_matrix(cond.x_over_r, order);
            let z_series = zs + self.line_matrix(self.feeder_km, order);
            let y = self.load_admittance(cond, order);
            // Nonlinear load current locked to the fundamental load current.
            let j = match (order, harmonics.first()) {
                (3, Some(f)) => f.i_meas.map(|i1| Complex64::from_polar(i1.norm() * self.load_h3_pct / 100.0, 3.0 * i1.arg())),
                _ => CVec3::zeros(),
            };
            let m = CMat3::identity() + z_series * y;
            let m_inv = m
                .try_inverse()
                .ok_or_else(|| Error::Spec("network matrix is singular".into()))?;
            let mut v_end = m_inv * (e - z_series * j);
            let i = y * v_end + j;
            if let Some(p) = cond.open_phase {
                // Downstream of the break the phase is held at ground by the load.
                v_end[p.index()] = c(0.0, 0.0);
            }
            let v_meas = match self.voltage_point {
                VoltagePoint::FeederEnd => v_end,
                VoltagePoint::Substation => e - zs * i,
            };
            let v_fault_point = Location::ALL.map(|loc| e - (zs + self.line_matrix(self.locations_km.km(loc), order)) * i);
            harmonics.push(HarmonicSolution { order, v_meas, i_meas: i, v_fault_point });
        }
        Ok(SteadyState { harmonics, open_phase: cond.open_phase })
    }

    /// Electrical time constant L/R of the loaded feeder at fundamental.
    pub fn load_time_constant(&self, cond: &NetworkCondition) -> f64 {
        let zs = self.source_z1(cond.x_over_r, 1);
        let zl = c(self.line_z1_per_km.0, self.line_z1_per_km.1) * self.feeder_km;
        let v_ln_rms = self.nominal_ll_kv * 1e3 / 3f64.sqrt();
        let zmag = v_ln_rms * v_ln_rms / (self.load_rated_mva * 1e6 / 3.0) / cond.load_scale.max(1e-6);
        let zload = c(zmag * self.load_pf, zmag * (1.0 - self.load_pf * self.load_pf).sqrt());
        let z = zs + zl + zload;
        z.im / (self.omega() * z.re)
    }

    /// Natural angular frequency of the capacitor bank against the series inductance.
    pub fn capacitor_ring_omega(&self, x_over_r: f64) -> f64 {
        let x = self.source_z1(x_over_r, 1).im + self.line_z1_per_km.1 * self.feeder_km;
        let l = x / self.omega();
        1.0 / (l * self.capacitance()).sqrt()
    }
}
