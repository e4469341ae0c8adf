//! Event synthesis on the Thevenin feeder.
//!
//! Each record is a pre-event steady state, a post-event steady state, and
//! the transient that joins them. Shunt fault currents come from arc models
//! driven by the open-circuit voltage at the fault point; their effect on
//! the measured voltages is the drop they cause across the upstream
//! impedance.

use rand_distr::{Distribution, Normal};
use rand::Rng;
use std::f64::consts::{PI, TAU};

use super::arc::HifModel;
use super::grid::{GridConfig, NetworkCondition, SteadyState, VoltagePoint};
use super::record::{Label, SignalRecord};
use super::scenario::{EventClass, Phase, ScenarioSpec, ShuntFault};
use crate::error::{Error, Result};
use crate::seed;

/// One arc branch: which phases it connects and what it drives with.
struct ArcBranch {
    from: usize,
    /// `None` for a branch to ground.
    to: Option<usize>,
    model: HifModel,
    r_series: f64,
}

fn conditions(spec: &ScenarioSpec) -> (NetworkCondition, NetworkCondition) {
    let pre = NetworkCondition {
        load_scale: f64::from(spec.loading_pct) / 100.0,
        capacitor_on: false,
        open_phase: None,
        x_over_r: spec.x_over_r,
        der_tech: spec.der_tech,
    };
    let mut pre = pre;
    let mut post = pre;
    match spec.event_class {
        EventClass::Normal | EventClass::FaultType1 { .. } => {}
        EventClass::LoadSwitchAdd { step_pct } => post.load_scale *= 1.0 + f64::from(step_pct) / 100.0,
        EventClass::LoadSwitchShed { step_pct } => post.load_scale *= 1.0 - f64::from(step_pct) / 100.0,
        EventClass::CapacitorSwitch { energize } => {
            pre.capacitor_on = !energize;
            post.capacitor_on = energize;
        }
        EventClass::FaultType2Downed { phase } => post.open_phase = Some(phase),
    }
    (pre, post)
}

/// First instant at or after `t0` where phase a sits `angle` radians past
/// its positive-going zero crossing.
fn point_on_wave(t0: f64, angle: f64, phase_a: f64, omega: f64) -> f64 {
    let target = angle - PI / 2.0 - phase_a;
    let delta = (target - omega * t0).rem_euclid(TAU);
    t0 + delta / omega
}

fn arc_branches(spec: &ScenarioSpec, grid: &GridConfig) -> Result<Vec<ArcBranch>> {
    let r = spec.fault.map(|f| f.impedance).unwrap_or(0.0);
    let links: Vec<(Phase, Option<Phase>)> = match spec.event_class {
        EventClass::FaultType1 { fault } => match fault {
            ShuntFault::Slg { phase } => vec![(phase, None)],
            ShuntFault::Ll { from, to } => vec![(from, Some(to))],
            ShuntFault::Llg { from, to } => vec![(from, None), (to, None)],
            ShuntFault::Lllg => Phase::ALL.iter().map(|&p| (p, None)).collect(),
        },
        EventClass::FaultType2Downed { phase } => vec![(phase, None)],
        _ => vec![],
    };
    links
        .into_iter()
        .enumerate()
        .map(|(i, (from, to))| {
            Ok(ArcBranch {
                from: from.index(),
                to: to.map(Phase::index),
                model: HifModel::new(grid.hif.clone(), seed::derive(spec.seed, 100 + i as u64))?,
                r_series: r,
            })
        })
        .collect()
}

/// Generate the waveform record described by `spec` on `grid`.
pub fn synth_event(spec: &ScenarioSpec, grid: &GridConfig) -> Result<SignalRecord> {
    spec.validate()?;
    grid.validate()?;
    let fs = grid.sample_rate;
    let dt = 1.0 / fs;
    let omega = grid.omega();
    let n = (spec.duration * fs).round() as usize;
    if n < 2 {
        return Err(Error::Spec("record would hold fewer than two samples".into()));
    }

    let (pre_c, post_c) = conditions(spec);
    let pre = grid.solve(&pre_c)?;
    let post = grid.solve(&post_c)?;

    let phase_a = pre.harmonics[0].v_meas[0].arg();
    let angle = match spec.fault {
        Some(fp) => f64::from(fp.inception_angle).to_radians(),
        None => seed::rng(seed::derive(spec.seed, 1)).random::<f64>() * TAU,
    };
    let onset = point_on_wave(spec.event_time, angle, phase_a, omega);

    let mut branches = arc_branches(spec, grid)?;
    let location = spec.fault.map(|f| f.location);
    let (r_up, l_up) = match (location, grid.voltage_point) {
        (Some(loc), VoltagePoint::FeederEnd) => {
            let z = grid.upstream_matrix(spec.x_over_r, loc, 1);
            (z.map(|c| c.re), z.map(|c| c.im / omega))
        }
        (Some(_), VoltagePoint::Substation) => {
            let z = grid.source_matrix(spec.x_over_r, 1);
            (z.map(|c| c.re), z.map(|c| c.im / omega))
        }
        (None, _) => Default::default(),
    };

    let tau_load = grid.load_time_constant(&post_c).max(dt);
    let ring = match spec.event_class {
        EventClass::CapacitorSwitch { energize: true } => Some(CapRing::new(grid, spec, &post, onset, omega)),
        _ => None,
    };
    let blend = matches!(
        spec.event_class,
        EventClass::LoadSwitchAdd { .. } | EventClass::LoadSwitchShed { .. } | EventClass::CapacitorSwitch { energize: false }
    );

    let mut v: [Vec<f64>; 3] = std::array::from_fn(|_| Vec::with_capacity(n));
    let mut i: [Vec<f64>; 3] = std::array::from_fn(|_| Vec::with_capacity(n));
    let mut i_f_prev = [0.0; 3];
    for k in 0..n {
        let t = k as f64 * dt;
        let (mut vs, mut is) = if t < onset {
            (pre.v_meas(t, omega), pre.i_meas(t, omega))
        } else if blend {
            let w = 1.0 - (-(t - onset) / tau_load).exp();
            let (v0, i0) = (pre.v_meas(t, omega), pre.i_meas(t, omega));
            let (v1, i1) = (post.v_meas(t, omega), post.i_meas(t, omega));
            (
                std::array::from_fn(|p| v0[p] + w * (v1[p] - v0[p])),
                std::array::from_fn(|p| i0[p] + w * (i1[p] - i0[p])),
            )
        } else {
            (post.v_meas(t, omega), post.i_meas(t, omega))
        };

        if let Some(r) = &ring {
            if t >= onset {
                let (dv, di) = r.at(t - onset);
                for p in 0..3 {
                    vs[p] += dv[p];
                    is[p] += di[p];
                }
            }
        }

        if let (Some(loc), true) = (location, t >= onset) {
            let vf = post.v_fault(loc, t, omega);
            let mut i_f = [0.0; 3];
            for b in &mut branches {
                let drive = match b.to {
                    Some(q) => vf[b.from] - vf[q],
                    None => vf[b.from],
                };
                let c = b.model.step_series(drive, dt, b.r_series)?;
                i_f[b.from] += c;
                if let Some(q) = b.to {
                    i_f[q] -= c;
                }
            }
            let di: [f64; 3] = std::array::from_fn(|p| (i_f[p] - i_f_prev[p]) / dt);
            for p in 0..3 {
                let mut drop = 0.0;
                for q in 0..3 {
                    drop += r_up[(p, q)] * i_f[q] + l_up[(p, q)] * di[q];
                }
                if post.open_phase.map(Phase::index) != Some(p) || grid.voltage_point == VoltagePoint::Substation {
                    vs[p] -= drop;
                }
                is[p] += i_f[p];
            }
            i_f_prev = i_f;
        }

        for p in 0..3 {
            v[p].push(vs[p]);
            i[p].push(is[p]);
        }
    }

    if grid.noise_pu > 0.0 {
        let mut rng = seed::rng(seed::derive(spec.seed, 2));
        let vn = Normal::new(0.0, grid.noise_pu * grid.v_base()).map_err(|e| Error::Config(e.to_string()))?;
        let inn = Normal::new(0.0, grid.noise_pu * grid.i_base()).map_err(|e| Error::Config(e.to_string()))?;
        for ch in &mut v {
            ch.iter_mut().for_each(|x| *x += vn.sample(&mut rng));
        }
        for ch in &mut i {
            ch.iter_mut().for_each(|x| *x += inn.sample(&mut rng));
        }
    }

    Ok(SignalRecord {
        sample_rate: fs,
        nominal_freq: grid.nominal_freq,
        v_base: grid.v_base(),
        i_base: grid.i_base(),
        voltages: v,
        currents: i,
        label: if spec.is_fault() { Label::Hif } else { Label::NonHif },
        spec: spec.clone(),
        onset: Some(onset),
    })
}

/// Damped oscillation that follows energizing a discharged capacitor bank:
/// the bank voltage starts at zero and rings about the new steady state.
struct CapRing {
    amp: [f64; 3],
    omega_n: f64,
    tau: f64,
    capacitance: f64,
    /// Fraction of the ringing seen at the voltage measurement point.
    v_share: f64,
}

impl CapRing {
    fn new(grid: &GridConfig, spec: &ScenarioSpec, post: &SteadyState, onset: f64, omega: f64) -> Self {
        let v_end = post.v_meas(onset, omega);
        let v_share = match grid.voltage_point {
            VoltagePoint::FeederEnd => 1.0,
            VoltagePoint::Substation => {
                let xs = grid.source_matrix(spec.x_over_r, 1);
                let xl = grid.line_matrix(grid.feeder_km, 1);
                let s = (xs[(0, 0)] - xs[(0, 1)]).im;
                let l = (xl[(0, 0)] - xl[(0, 1)]).im;
                s / (s + l)
            }
        };
        Self {
            amp: v_end,
            omega_n: grid.capacitor_ring_omega(spec.x_over_r),
            tau: grid.capacitor_damping_tau,
            capacitance: grid.capacitance(),
            v_share,
        }
    }

    /// Voltage and current offsets `s` seconds after switching.
    fn at(&self, s: f64) -> ([f64; 3], [f64; 3]) {
        let env = (-s / self.tau).exp();
        let (sin, cos) = (self.omega_n * s).sin_cos();
        let shape = env * cos;
        let rate = env * (self.omega_n * sin + cos / self.tau);
        let dv = self.amp.map(|a| -a * shape * self.v_share);
        let di = self.amp.map(|a| a * rate * self.capacitance);
        (dv, di)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signalgen::scenario::{DerTech, FaultParams, Location};

    fn spec(event_class: EventClass, fault: Option<FaultParams>) -> ScenarioSpec {
        ScenarioSpec {
            event_class,
            loading_pct: 80,
            der_tech: DerTech::Synchronous,
            fault,
            x_over_r: 10.0,
            duration: 1.0,
            event_time: 0.4,
            seed: 11,
        }
    }

    fn slg(r: f64, angle: u32) -> ScenarioSpec {
        spec(
            EventClass::FaultType1 { fault: ShuntFault::Slg { phase: Phase::A } },
            Some(FaultParams { impedance: r, inception_angle: angle, location: Location::Bus19 }),
        )
    }

    fn rms(x: &[f64]) -> f64 {
        (x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64).sqrt()
    }

    #[test]
    fn inception_lands_on_requested_angle() {
        let g = GridConfig::balanced();
        for angle in [0, 30, 60, 90] {
            let rec = synth_event(&slg(100.0, angle), &g).unwrap();
            let onset = rec.onset.unwrap();
            assert!((0.4..0.4 + 1.0 / 60.0).contains(&onset));
            let pre = g.solve(&conditions(&rec.spec).0).unwrap();
            let ph = pre.harmonics[0].v_meas[0].arg() + g.omega() * onset;
            let want = f64::from(angle).to_radians() - PI / 2.0;
            let err = (ph - want + PI).rem_euclid(TAU) - PI;
            assert!(err.abs() < 1e-9, "angle {angle}: err {err}");
        }
    }

    #[test]
    fn fault_current_only_after_onset_and_with_extinction() {
        let g = GridConfig::balanced();
        let s = slg(1.0, 0);
        let rec = synth_event(&s, &g).unwrap();
        let base = synth_event(&spec(EventClass::Normal, None), &g).unwrap();
        let onset = rec.onset.unwrap();
        let mut zeros = 0;
        for k in 0..rec.len() {
            let d = rec.currents[0][k] - base.currents[0][k];
            if rec.time(k) < onset {
                assert_eq!(d, 0.0);
            } else if d == 0.0 {
                zeros += 1;
            }
        }
        assert!(zeros > 0, "arc never extinguished");
    }

    #[test]
    fn hif_rms_current_in_expected_band() {
        let g = GridConfig::balanced();
        let rec = synth_event(&slg(1.0, 0), &g).unwrap();
        let base = synth_event(&spec(EventClass::Normal, None), &g).unwrap();
        let start = (rec.onset.unwrap() * g.sample_rate).ceil() as usize;
        let d: Vec<f64> = (start..rec.len()).map(|k| rec.currents[0][k] - base.currents[0][k]).collect();
        let r = rms(&d);
        assert!((10.0..=100.0).contains(&r), "rms {r}");
    }

    #[test]
    fn identical_inputs_identical_records() {
        let g = GridConfig::default();
        let a = synth_event(&slg(300.0, 30), &g).unwrap();
        let b = synth_event(&slg(300.0, 30), &g).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn downed_conductor_opens_the_phase() {
        let g = GridConfig { noise_pu: 0.0, ..GridConfig::default() };
        let s = spec(
            EventClass::FaultType2Downed { phase: Phase::B },
            Some(FaultParams { impedance: 100.0, inception_angle: 0, location: Location::Bus11 }),
        );
        let rec = synth_event(&s, &g).unwrap();
        let tail = rec.len() - 200..rec.len();
        assert!(rms(&rec.voltages[1][tail.clone()]) < 1e-9);
        // Remaining phase-b current is the arc alone.
        assert!(rms(&rec.currents[1][tail]) < 100.0);
    }

    #[test]
    fn capacitor_energizing_rings() {
        let g = GridConfig::balanced();
        let rec = synth_event(&spec(EventClass::CapacitorSwitch { energize: true }, None), &g).unwrap();
        let k0 = (rec.onset.unwrap() * g.sample_rate).ceil() as usize;
        let steady = rec.currents.iter().map(|c| c[k0 - 40..k0].iter().fold(0f64, |m, x| m.max(x.abs()))).fold(0.0, f64::max);
        let burst = rec.currents.iter().map(|c| c[k0..k0 + 10].iter().fold(0f64, |m, x| m.max(x.abs()))).fold(0.0, f64::max);
        assert!(burst > 1.2 * steady, "burst {burst} steady {steady}");
    }

    #[test]
    fn record_length_matches_duration() {
        let g = GridConfig::default();
        let rec = synth_event(&spec(EventClass::Normal, None), &g).unwrap();
        assert_eq!(rec.len(), 2000);
        rec.validate().unwrap();
    }
}
