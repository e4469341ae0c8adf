//! Per-window feature assembly.
//!
//! Signals are taken to per-unit, brought to an integer number of samples
//! per cycle if needed, and analysed over one-cycle windows that advance by
//! a fraction of a cycle. Each window is stamped with the time of its last
//! sample. Windows with any undefined channel (the first windows lack rates,
//! a zero phasor has no power factor) are dropped and counted.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, TAU};

use super::kalman::{KfConfig, KfState, KF_DIM, KF_ORDERS};
use super::matrix::{Channel, FeatureMatrix};
use super::phasor::{angle_of, integer_cycle, wrap, Twiddles, ANGLE_FLOOR};
use super::rates::{angle_rate, composite_rate, rate_of_change, DEFAULT_DEADBAND};
use super::resample::{resample, STENCIL};
use super::sequence::sequence_components;
use crate::error::{Error, Result};
use crate::signalgen::SignalRecord;

pub const MAX_ORDER: u32 = 6;
const PHASES: [&str; 3] = ["a", "b", "c"];
const PAIRS: [(usize, usize, &str); 3] = [(0, 1, "ab"), (1, 2, "bc"), (2, 0, "ca")];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExtractionConfig {
    /// Analysis grid used when the record's cycle is not a whole number of samples.
    pub samples_per_cycle: usize,
    /// Window advance as a fraction of a cycle.
    pub stride_fraction: f64,
    pub kf: KfConfig,
    /// Denominator deadband of the composite rates, per unit.
    pub deadband: f64,
    /// Look-back span of the voltage-deviation baseline, seconds.
    pub dv_baseline: f64,
    pub include_dft: bool,
    pub include_kf: bool,
}

impl Default for ExtractionConfig {
    fn default() -> Self {
        Self {
            samples_per_cycle: 32,
            stride_fraction: 0.25,
            kf: KfConfig::default(),
            deadband: DEFAULT_DEADBAND,
            dv_baseline: 1.0,
            include_dft: true,
            include_kf: true,
        }
    }
}

impl ExtractionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples_per_cycle < 2 * MAX_ORDER as usize + 1 {
            return Err(Error::Config(format!(
                "samples_per_cycle {} cannot resolve order {MAX_ORDER}",
                self.samples_per_cycle
            )));
        }
        if !(self.stride_fraction > 0.0 && self.stride_fraction <= 1.0) {
            return Err(Error::Config("stride_fraction must lie in (0, 1]".into()));
        }
        if !(self.deadband >= 0.0 && self.dv_baseline > 0.0) {
            return Err(Error::Config("deadband must be >= 0 and dv_baseline > 0".into()));
        }
        if !(self.include_dft || self.include_kf) {
            return Err(Error::Config("at least one of the DFT and KF channel groups must be enabled".into()));
        }
        self.kf.validate()
    }
}

/// Every channel `assemble_features` emits under `config`, in column order.
pub fn channel_manifest(config: &ExtractionConfig) -> Vec<Channel> {
    fn p(name: impl Into<String>) -> Channel {
        Channel::plain(name)
    }
    fn a(name: impl Into<String>) -> Channel {
        Channel::angle(name)
    }
    let mut m = Vec::new();
    if config.include_dft {
        m.push(p("df"));
        m.push(p("dfdt"));
        for ph in PHASES {
            m.push(p(format!("P_{ph}")));
            m.push(p(format!("Q_{ph}")));
            m.push(p(format!("pf_{ph}")));
            m.push(a(format!("phi_{ph}")));
        }
        for ph in PHASES {
            m.push(p(format!("dP_{ph}_dt")));
            m.push(p(format!("dQ_{ph}_dt")));
            m.push(p(format!("dpf_{ph}_dt")));
            m.push(p(format!("dphi_{ph}_dt")));
        }
        for name in ["P_3ph", "Q_3ph", "pf_3ph", "dP_3ph_dt", "dQ_3ph_dt", "dpf_3ph_dt"] {
            m.push(p(name));
        }
        for q in ["V", "I"] {
            for ph in PHASES {
                m.push(p(format!("{q}_ph_{ph}")));
            }
        }
        for (_, _, pair) in PAIRS {
            m.push(p(format!("V_ll_{pair}")));
        }
        for q in ["V", "I"] {
            for ph in PHASES {
                m.push(p(format!("{q}_rms_{ph}")));
            }
        }
        for q in ["V", "I"] {
            for s in 0..3 {
                m.push(p(format!("{q}{s}")));
            }
        }
        for q in ["V", "I"] {
            for s in 0..3 {
                m.push(a(format!("theta_{q}{s}")));
            }
        }
        m.push(a("theta_V2_minus_V0"));
        m.push(a("theta_I2_minus_I0"));
        for q in ["V", "I"] {
            for ph in PHASES {
                for n in 2..=MAX_ORDER {
                    m.push(p(format!("H_{q}{ph}_{n}")));
                }
            }
        }
        for q in ["V", "I"] {
            for ph in PHASES {
                for n in 2..=MAX_ORDER {
                    m.push(a(format!("theta_H{q}{ph}_{n}")));
                }
            }
        }
        for q in ["V", "I"] {
            for ph in PHASES {
                m.push(p(format!("d{q}_{ph}_dt")));
            }
        }
        for ph in PHASES {
            for n in 2..=MAX_ORDER {
                m.push(p(format!("dH_V{ph}_{n}_dt")));
            }
        }
        for name in ["df_dP", "df_dQ", "dV_dP", "dV_dQ"] {
            m.push(p(name));
        }
        for ph in PHASES {
            m.push(p(format!("dV_{ph}")));
        }
    }
    if config.include_kf {
        for q in ["V", "I"] {
            for ph in PHASES {
                for n in 1..=KF_ORDERS {
                    m.push(p(format!("KF_{q}{ph}_cos_H{n}")));
                    m.push(p(format!("KF_{q}{ph}_sin_H{n}")));
                }
            }
        }
        for ph in PHASES {
            m.push(p(format!("KF_V{ph}_DC")));
        }
    }
    m
}

/// Per-unit signals on an integer-cycle grid.
struct Prepared {
    fs: f64,
    n_cycle: usize,
    v: [Vec<f64>; 3],
    i: [Vec<f64>; 3],
}

fn prepare(record: &SignalRecord, config: &ExtractionConfig) -> Prepared {
    let f0 = record.nominal_freq;
    let pu = |ch: &Vec<f64>, base: f64| ch.iter().map(|x| x / base).collect::<Vec<f64>>();
    let v = record.voltages.clone().map(|c| pu(&c, record.v_base));
    let i = record.currents.clone().map(|c| pu(&c, record.i_base));
    match integer_cycle(f0, record.sample_rate) {
        Some(n) => Prepared { fs: record.sample_rate, n_cycle: n, v, i },
        None => {
            let fs = config.samples_per_cycle as f64 * f0;
            let rs = |c: Vec<f64>| resample(&c, record.sample_rate, fs, STENCIL);
            Prepared { fs, n_cycle: config.samples_per_cycle, v: v.map(rs), i: i.map(rs) }
        }
    }
}

/// Column builder; undefined entries are NaN until rows are filtered.
struct Columns {
    channels: Vec<Channel>,
    data: Vec<Vec<f64>>,
}

impl Columns {
    fn push(&mut self, ch: Channel, col: Vec<f64>) {
        self.channels.push(ch);
        self.data.push(col);
    }

    fn push_opt(&mut self, ch: Channel, col: Vec<Option<f64>>) {
        self.push(ch, col.into_iter().map(|x| x.unwrap_or(f64::NAN)).collect());
    }
}

fn opt_to_nan(v: Vec<Option<f64>>) -> Vec<f64> {
    v.into_iter().map(|x| x.unwrap_or(f64::NAN)).collect()
}

/// Angle from the positive-going zero crossing of the fundamental reference
/// to the next positive-going zero crossing of the order-`n` component, in
/// radians of the harmonic.
pub fn harmonic_angle(reference: Complex64, harmonic: Complex64, n: u32) -> f64 {
    if harmonic.norm() < ANGLE_FLOOR {
        return 0.0;
    }
    let nf = f64::from(n);
    wrap(-FRAC_PI_2 * (1.0 - nf) + nf * angle_of(reference) - angle_of(harmonic))
}

/// Turn a record into its windowed feature matrix.
pub fn assemble_features(record: &SignalRecord, config: &ExtractionConfig) -> Result<FeatureMatrix> {
    record.validate()?;
    config.validate()?;
    let prep = prepare(record, config);
    let n = prep.n_cycle;
    let len = prep.v[0].len();
    if len < n {
        return Err(Error::Record(format!("record holds {len} samples, one window needs {n}")));
    }
    let stride = ((n as f64 * config.stride_fraction).round() as usize).max(1);
    let ends: Vec<usize> = (n - 1..len).step_by(stride).collect();
    let nw = ends.len();
    let times: Vec<f64> = ends.iter().map(|&e| e as f64 / prep.fs).collect();
    let dt_w = stride as f64 / prep.fs;

    let mut cols = Columns { channels: vec![], data: vec![] };

    if config.include_dft {
        dft_columns(&mut cols, &prep, &ends, &times, dt_w, config);
    }
    if config.include_kf {
        kf_columns(&mut cols, &prep, &ends, config)?;
    }

    let manifest = channel_manifest(config);
    if cols.channels != manifest {
        return Err(Error::Record("internal: emitted channels differ from the manifest".into()));
    }

    let mut m = FeatureMatrix { channels: cols.channels, times: vec![], rows: vec![], labels: vec![], dropped: 0 };
    for w in 0..nw {
        let row: Vec<f64> = cols.data.iter().map(|c| c[w]).collect();
        if row.iter().all(|x| x.is_finite()) {
            m.times.push(times[w]);
            m.rows.push(row);
            m.labels.push(record.label);
        } else {
            m.dropped += 1;
        }
    }
    Ok(m)
}

fn dft_columns(cols: &mut Columns, prep: &Prepared, ends: &[usize], times: &[f64], dt_w: f64, config: &ExtractionConfig) {
    let n = prep.n_cycle;
    let tw = Twiddles::new(n, MAX_ORDER);
    let nw = ends.len();
    // [window][phase][order-1]
    let phasors = |sig: &[Vec<f64>; 3]| -> Vec<[[Complex64; MAX_ORDER as usize]; 3]> {
        ends.iter()
            .map(|&e| std::array::from_fn(|p| std::array::from_fn(|h| tw.at(&sig[p], e + 1 - n, h as u32 + 1))))
            .collect()
    };
    let rms = |sig: &[Vec<f64>; 3]| -> Vec<[f64; 3]> {
        ends.iter()
            .map(|&e| std::array::from_fn(|p| (sig[p][e + 1 - n..=e].iter().map(|x| x * x).sum::<f64>() / n as f64).sqrt()))
            .collect()
    };
    let vh = phasors(&prep.v);
    let ih = phasors(&prep.i);
    let vr = rms(&prep.v);
    let ir = rms(&prep.i);
    let fund = |h: &Vec<[[Complex64; MAX_ORDER as usize]; 3]>, w: usize| -> [Complex64; 3] { std::array::from_fn(|p| h[w][p][0]) };
    let vseq: Vec<_> = (0..nw).map(|w| {
        let f = fund(&vh, w);
        sequence_components(f[0], f[1], f[2])
    }).collect();
    let iseq: Vec<_> = (0..nw).map(|w| {
        let f = fund(&ih, w);
        sequence_components(f[0], f[1], f[2])
    }).collect();

    // Frequency from the rotation of the positive-sequence voltage.
    let th_v1: Vec<f64> = vseq.iter().map(|s| angle_of(s.positive)).collect();
    let df = opt_to_nan(angle_rate(&th_v1, dt_w)).into_iter().map(|x| x / TAU).collect::<Vec<_>>();
    let dfdt = opt_to_nan(rate_of_change(&df, dt_w));
    cols.push(Channel::plain("df"), df.clone());
    cols.push(Channel::plain("dfdt"), dfdt);

    let mut pw = [[vec![0.0; nw], vec![0.0; nw], vec![0.0; nw], vec![0.0; nw]], [vec![0.0; nw], vec![0.0; nw], vec![0.0; nw], vec![0.0; nw]], [vec![0.0; nw], vec![0.0; nw], vec![0.0; nw], vec![0.0; nw]]];
    for w in 0..nw {
        for p in 0..3 {
            let v = vh[w][p][0];
            let i = ih[w][p][0];
            let s = v.norm() * i.norm();
            let (pp, qq, pf, phi) = if s > 0.0 {
                let phi = wrap(angle_of(v) - angle_of(i));
                (s * phi.cos(), s * phi.sin(), phi.cos(), phi)
            } else {
                (0.0, 0.0, f64::NAN, f64::NAN)
            };
            pw[p][0][w] = pp;
            pw[p][1][w] = qq;
            pw[p][2][w] = pf;
            pw[p][3][w] = phi;
        }
    }
    for (p, ph) in PHASES.iter().enumerate() {
        cols.push(Channel::plain(format!("P_{ph}")), pw[p][0].clone());
        cols.push(Channel::plain(format!("Q_{ph}")), pw[p][1].clone());
        cols.push(Channel::plain(format!("pf_{ph}")), pw[p][2].clone());
        cols.push(Channel::angle(format!("phi_{ph}")), pw[p][3].clone());
    }
    for (p, ph) in PHASES.iter().enumerate() {
        cols.push_opt(Channel::plain(format!("dP_{ph}_dt")), rate_of_change(&pw[p][0], dt_w));
        cols.push_opt(Channel::plain(format!("dQ_{ph}_dt")), rate_of_change(&pw[p][1], dt_w));
        cols.push_opt(Channel::plain(format!("dpf_{ph}_dt")), rate_of_change(&pw[p][2], dt_w));
        cols.push_opt(Channel::plain(format!("dphi_{ph}_dt")), angle_rate(&pw[p][3], dt_w));
    }
    let p3: Vec<f64> = (0..nw).map(|w| (0..3).map(|p| pw[p][0][w]).sum()).collect();
    let q3: Vec<f64> = (0..nw).map(|w| (0..3).map(|p| pw[p][1][w]).sum()).collect();
    let pf3: Vec<f64> = p3
        .iter()
        .zip(&q3)
        .map(|(p, q)| {
            let s = p.hypot(*q);
            if s > 0.0 { p / s } else { f64::NAN }
        })
        .collect();
    cols.push(Channel::plain("P_3ph"), p3.clone());
    cols.push(Channel::plain("Q_3ph"), q3.clone());
    cols.push(Channel::plain("pf_3ph"), pf3.clone());
    cols.push_opt(Channel::plain("dP_3ph_dt"), rate_of_change(&p3, dt_w));
    cols.push_opt(Channel::plain("dQ_3ph_dt"), rate_of_change(&q3, dt_w));
    cols.push_opt(Channel::plain("dpf_3ph_dt"), rate_of_change(&pf3, dt_w));

    let mag = |h: &Vec<[[Complex64; MAX_ORDER as usize]; 3]>, p: usize, order: usize| -> Vec<f64> {
        (0..nw).map(|w| h[w][p][order - 1].norm()).collect()
    };
    let vph: [Vec<f64>; 3] = std::array::from_fn(|p| mag(&vh, p, 1));
    let iph: [Vec<f64>; 3] = std::array::from_fn(|p| mag(&ih, p, 1));
    for (p, ph) in PHASES.iter().enumerate() {
        cols.push(Channel::plain(format!("V_ph_{ph}")), vph[p].clone());
    }
    for (p, ph) in PHASES.iter().enumerate() {
        cols.push(Channel::plain(format!("I_ph_{ph}")), iph[p].clone());
    }
    for (x, y, pair) in PAIRS {
        cols.push(Channel::plain(format!("V_ll_{pair}")), (0..nw).map(|w| (vh[w][x][0] - vh[w][y][0]).norm()).collect());
    }
    for (p, ph) in PHASES.iter().enumerate() {
        cols.push(Channel::plain(format!("V_rms_{ph}")), vr.iter().map(|r| r[p]).collect());
    }
    for (p, ph) in PHASES.iter().enumerate() {
        cols.push(Channel::plain(format!("I_rms_{ph}")), ir.iter().map(|r| r[p]).collect());
    }
    for (q, seq) in [("V", &vseq), ("I", &iseq)] {
        cols.push(Channel::plain(format!("{q}0")), seq.iter().map(|s| s.zero.norm()).collect());
        cols.push(Channel::plain(format!("{q}1")), seq.iter().map(|s| s.positive.norm()).collect());
        cols.push(Channel::plain(format!("{q}2")), seq.iter().map(|s| s.negative.norm()).collect());
    }
    for (q, seq) in [("V", &vseq), ("I", &iseq)] {
        cols.push(Channel::angle(format!("theta_{q}0")), seq.iter().map(|s| angle_of(s.zero)).collect());
        cols.push(Channel::angle(format!("theta_{q}1")), seq.iter().map(|s| angle_of(s.positive)).collect());
        cols.push(Channel::angle(format!("theta_{q}2")), seq.iter().map(|s| angle_of(s.negative)).collect());
    }
    for (q, seq) in [("V", &vseq), ("I", &iseq)] {
        cols.push(
            Channel::angle(format!("theta_{q}2_minus_{q}0")),
            seq.iter().map(|s| wrap(angle_of(s.negative) - angle_of(s.zero))).collect(),
        );
    }
    for (q, h) in [("V", &vh), ("I", &ih)] {
        for (p, ph) in PHASES.iter().enumerate() {
            for n in 2..=MAX_ORDER as usize {
                cols.push(Channel::plain(format!("H_{q}{ph}_{n}")), mag(h, p, n));
            }
        }
    }
    for (q, h) in [("V", &vh), ("I", &ih)] {
        for (p, ph) in PHASES.iter().enumerate() {
            for n in 2..=MAX_ORDER {
                cols.push(
                    Channel::angle(format!("theta_H{q}{ph}_{n}")),
                    (0..nw).map(|w| harmonic_angle(vh[w][0][0], h[w][p][n as usize - 1], n)).collect(),
                );
            }
        }
    }
    for (q, m) in [("V", &vph), ("I", &iph)] {
        for (p, ph) in PHASES.iter().enumerate() {
            cols.push_opt(Channel::plain(format!("d{q}_{ph}_dt")), rate_of_change(&m[p], dt_w));
        }
    }
    for (p, ph) in PHASES.iter().enumerate() {
        for n in 2..=MAX_ORDER as usize {
            cols.push_opt(Channel::plain(format!("dH_V{ph}_{n}_dt")), rate_of_change(&mag(&vh, p, n), dt_w));
        }
    }
    let v1: Vec<f64> = vseq.iter().map(|s| s.positive.norm()).collect();
    let db = config.deadband;
    cols.push_opt(Channel::plain("df_dP"), composite_rate(&df, &p3, db));
    cols.push_opt(Channel::plain("df_dQ"), composite_rate(&df, &q3, db));
    cols.push_opt(Channel::plain("dV_dP"), composite_rate(&v1, &p3, db));
    cols.push_opt(Channel::plain("dV_dQ"), composite_rate(&v1, &q3, db));
    for (p, ph) in PHASES.iter().enumerate() {
        cols.push(Channel::plain(format!("dV_{ph}")), deviation_from_baseline(&vph[p], times, config.dv_baseline));
    }
}

/// `x[w]` minus the mean of the earlier points within `span` seconds.
fn deviation_from_baseline(x: &[f64], times: &[f64], span: f64) -> Vec<f64> {
    let mut prefix = vec![0.0; x.len() + 1];
    for (k, v) in x.iter().enumerate() {
        prefix[k + 1] = prefix[k] + v;
    }
    let mut lo = 0;
    (0..x.len())
        .map(|w| {
            while lo < w && times[lo] < times[w] - span - 1e-12 {
                lo += 1;
            }
            if lo == w {
                f64::NAN
            } else {
                x[w] - (prefix[w] - prefix[lo]) / (w - lo) as f64
            }
        })
        .collect()
}

fn kf_columns(cols: &mut Columns, prep: &Prepared, ends: &[usize], config: &ExtractionConfig) -> Result<()> {
    let f0 = prep.fs / prep.n_cycle as f64;
    let track = |sig: &[f64]| -> Result<Vec<[f64; KF_DIM]>> {
        let mut st = KfState::new(&config.kf);
        let mut out = Vec::with_capacity(ends.len());
        let mut next = 0;
        for (k, &x) in sig.iter().enumerate() {
            st.update(x, k as f64 / prep.fs, f0)?;
            if next < ends.len() && ends[next] == k {
                let mut snap = [0.0; KF_DIM];
                snap.copy_from_slice(st.x.as_slice());
                out.push(snap);
                next += 1;
            }
        }
        Ok(out)
    };
    let v: Vec<Vec<[f64; KF_DIM]>> = prep.v.iter().map(|s| track(s)).collect::<Result<_>>()?;
    let i: Vec<Vec<[f64; KF_DIM]>> = prep.i.iter().map(|s| track(s)).collect::<Result<_>>()?;
    for (q, tr) in [("V", &v), ("I", &i)] {
        for (p, ph) in PHASES.iter().enumerate() {
            for n in 1..=KF_ORDERS {
                cols.push(Channel::plain(format!("KF_{q}{ph}_cos_H{n}")), tr[p].iter().map(|s| s[2 * (n - 1)]).collect());
                cols.push(Channel::plain(format!("KF_{q}{ph}_sin_H{n}")), tr[p].iter().map(|s| s[2 * (n - 1) + 1]).collect());
            }
        }
    }
    for (p, ph) in PHASES.iter().enumerate() {
        cols.push(Channel::plain(format!("KF_V{ph}_DC")), v[p].iter().map(|s| s[KF_DIM - 1]).collect());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signalgen::{synth_event, DerTech, EventClass, FaultParams, GridConfig, Location, Phase, ScenarioSpec, ShuntFault};

    fn spec(event_class: EventClass, fault: Option<FaultParams>) -> ScenarioSpec {
        ScenarioSpec { event_class, loading_pct: 70, der_tech: DerTech::Synchronous, fault, x_over_r: 10.0, duration: 1.0, event_time: 0.5, seed: 5 }
    }

    #[test]
    fn manifest_matches_emitted_columns() {
        let cfg = ExtractionConfig::default();
        let rec = synth_event(&spec(EventClass::Normal, None), &GridConfig::default()).unwrap();
        let m = assemble_features(&rec, &cfg).unwrap();
        assert_eq!(m.channels, channel_manifest(&cfg));
        assert_eq!(m.channels.len(), 224);
        let mut names: Vec<_> = m.channels.iter().map(|c| c.name.clone()).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), 224, "duplicate channel names");
    }

    #[test]
    fn balanced_normal_has_no_unbalance() {
        let rec = synth_event(&spec(EventClass::Normal, None), &GridConfig::balanced()).unwrap();
        let m = assemble_features(&rec, &ExtractionConfig::default()).unwrap();
        for name in ["V2", "V0", "theta_V2_minus_V0"] {
            let col = m.series(name).unwrap();
            assert!(col.iter().all(|x| x.abs() < 1e-6), "{name}");
        }
        assert_eq!(m.dropped, 2);
    }

    #[test]
    fn slg_raises_negative_sequence_current() {
        let s = spec(
            EventClass::FaultType1 { fault: ShuntFault::Slg { phase: Phase::A } },
            Some(FaultParams { impedance: 300.0, inception_angle: 0, location: Location::Bus19 }),
        );
        let rec = synth_event(&s, &GridConfig::default()).unwrap();
        let onset = rec.onset.unwrap();
        let m = assemble_features(&rec, &ExtractionConfig::default()).unwrap();
        let i2 = m.series("I2").unwrap();
        let mean = |f: &dyn Fn(f64) -> bool| {
            let v: Vec<f64> = m.times.iter().zip(&i2).filter(|(t, _)| f(**t)).map(|(_, x)| *x).collect();
            v.iter().sum::<f64>() / v.len() as f64
        };
        let before = mean(&|t| t < onset);
        let after = mean(&|t| t > onset + 1.0 / 60.0);
        assert!(after > before, "before {before} after {after}");
    }

    #[test]
    fn fractional_rate_is_resampled() {
        let g = GridConfig { noise_pu: 0.0, ..GridConfig::default() };
        assert!(integer_cycle(60.0, g.sample_rate).is_none());
        let rec = synth_event(&spec(EventClass::Normal, None), &g).unwrap();
        let m = assemble_features(&rec, &ExtractionConfig::default()).unwrap();
        let v1 = m.series("V1").unwrap();
        let spread = v1.iter().cloned().fold(f64::MIN, f64::max) - v1.iter().cloned().fold(f64::MAX, f64::min);
        assert!(spread < 1e-4, "spread {spread}");
    }

    #[test]
    fn harmonic_angle_of_aligned_harmonic_is_zero() {
        // cos(ωt) and cos(3ωt) cross zero upward together at ωt = −π/2 only
        // after a third-harmonic shift of π, i.e. sin(3ωt)-like alignment.
        let r = Complex64::from_polar(1.0, 0.0);
        let h = Complex64::from_polar(1.0, -FRAC_PI_2 * 2.0);
        assert!(harmonic_angle(r, h, 3).abs() < 1e-12);
        assert_eq!(harmonic_angle(r, Complex64::new(0.0, 0.0), 3), 0.0);
    }

    #[test]
    fn baseline_deviation() {
        let x = [1.0, 1.0, 4.0];
        let t = [0.0, 0.5, 1.0];
        let d = deviation_from_baseline(&x, &t, 1.0);
        assert!(d[0].is_nan());
        assert_eq!(d[1], 0.0);
        assert_eq!(d[2], 3.0);
    }
}
