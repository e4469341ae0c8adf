//! Full-cycle DFT phasor estimation.
//!
//! Phasors are peak-valued: a window of `A·cos(nωt + φ)` yields `A∠φ` at
//! order `n`, with `t` measured from the first sample of the window.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

use super::resample::{lagrange_at, STENCIL};
use crate::error::{Error, Result};

/// Magnitudes below this carry no meaningful angle; their angle reads 0.
pub const ANGLE_FLOOR: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Phasor {
    pub magnitude: f64,
    /// Radians in (−π, π].
    pub angle: f64,
}

impl Phasor {
    pub fn from_complex(z: Complex64) -> Self {
        Self { magnitude: z.norm(), angle: angle_of(z) }
    }

    pub fn from_polar(magnitude: f64, angle: f64) -> Self {
        Self::from_complex(Complex64::from_polar(magnitude, angle))
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::from_polar(self.magnitude, self.angle)
    }
}

/// Wrap an angle into (−π, π].
pub fn wrap(a: f64) -> f64 {
    let w = (a + PI).rem_euclid(TAU) - PI;
    if w <= -PI {
        w + TAU
    } else {
        w
    }
}

pub fn angle_of(z: Complex64) -> f64 {
    if z.norm() < ANGLE_FLOOR {
        0.0
    } else {
        wrap(z.arg())
    }
}

/// Samples per nominal cycle, if that number is an integer.
pub fn integer_cycle(nominal_freq: f64, sample_rate: f64) -> Option<usize> {
    let n = sample_rate / nominal_freq;
    let r = n.round();
    ((n - r).abs() < 1e-9 * n && r >= 1.0).then_some(r as usize)
}

/// Order-`order` Fourier coefficient of one nominal cycle starting at
/// `window[0]`. When a cycle is not a whole number of samples the cycle is
/// re-sampled onto the nearest integer grid first.
pub fn full_cycle_dft(window: &[f64], order: u32, nominal_freq: f64, sample_rate: f64) -> Result<Phasor> {
    Ok(Phasor::from_complex(full_cycle_dft_complex(window, order, nominal_freq, sample_rate)?))
}

pub fn full_cycle_dft_complex(window: &[f64], order: u32, nominal_freq: f64, sample_rate: f64) -> Result<Complex64> {
    if order == 0 {
        return Err(Error::InvalidInput("harmonic order must be >= 1".into()));
    }
    if !(nominal_freq > 0.0 && sample_rate > 0.0) {
        return Err(Error::InvalidInput("frequencies must be positive".into()));
    }
    let span = sample_rate / nominal_freq;
    let needed = span.ceil() as usize;
    if window.len() < needed {
        return Err(Error::Window { needed, got: window.len() });
    }
    match integer_cycle(nominal_freq, sample_rate) {
        Some(n) => Ok(dft(&window[..n], order)),
        None => {
            let m = span.round().max(1.0) as usize;
            let step = span / m as f64;
            let grid: Vec<f64> = (0..m).map(|j| lagrange_at(window, j as f64 * step, STENCIL)).collect();
            Ok(dft(&grid, order))
        }
    }
}

/// DFT of exactly one period held in `x`.
pub fn dft(x: &[f64], order: u32) -> Complex64 {
    let n = x.len();
    let w = -TAU * f64::from(order) / n as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, &v) in x.iter().enumerate() {
        acc += Complex64::from_polar(v, w * k as f64);
    }
    acc * (2.0 / n as f64)
}

/// Twiddle factors for sliding evaluation with absolute-time reference.
pub(crate) struct Twiddles {
    n: usize,
    table: Vec<Vec<Complex64>>,
}

impl Twiddles {
    pub(crate) fn new(n: usize, max_order: u32) -> Self {
        let table = (1..=max_order)
            .map(|h| {
                (0..n)
                    .map(|k| Complex64::from_polar(2.0 / n as f64, -TAU * f64::from(h) * k as f64 / n as f64))
                    .collect()
            })
            .collect();
        Self { n, table }
    }

    /// Coefficient of order `h` over `x[start..start + n]`, referenced to
    /// sample 0 of `x` rather than to the window start.
    pub(crate) fn at(&self, x: &[f64], start: usize, h: u32) -> Complex64 {
        let tw = &self.table[h as usize - 1];
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, &v) in x[start..start + self.n].iter().enumerate() {
            acc += tw[(start + k) % self.n] * v;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tone(n: usize, fs: f64, f: impl Fn(f64) -> f64) -> Vec<f64> {
        (0..n).map(|k| f(k as f64 / fs)).collect()
    }

    #[test]
    fn single_tone() {
        let x = tone(32, 1920.0, |t| (TAU * 60.0 * t).cos());
        let p = full_cycle_dft(&x, 1, 60.0, 1920.0).unwrap();
        assert!((p.magnitude - 1.0).abs() < 1e-9);
        assert!(p.angle.abs() < 1e-9);
    }

    #[test]
    fn zeros_give_zero_at_every_order() {
        let x = vec![0.0; 32];
        for h in 1..=6 {
            assert_eq!(full_cycle_dft(&x, h, 60.0, 1920.0).unwrap().magnitude, 0.0);
        }
    }

    #[test]
    fn third_harmonic_sine() {
        let x = tone(32, 1920.0, |t| (TAU * 60.0 * t).cos() + 0.1 * (TAU * 180.0 * t).sin());
        let p = full_cycle_dft(&x, 3, 60.0, 1920.0).unwrap();
        assert!((p.magnitude - 0.1).abs() < 1e-9);
        assert!((p.angle + PI / 2.0).abs() < 1e-9);
    }

    #[test]
    fn short_window_is_rejected() {
        let x = vec![0.0; 31];
        assert!(matches!(full_cycle_dft(&x, 1, 60.0, 1920.0), Err(Error::Window { needed: 32, got: 31 })));
    }

    #[test]
    fn fractional_cycle_is_close() {
        let x = tone(40, 2000.0, |t| 0.8 * (TAU * 60.0 * t + 0.4).cos());
        let p = full_cycle_dft(&x, 1, 60.0, 2000.0).unwrap();
        assert!((p.magnitude - 0.8).abs() < 1e-8, "{p:?}");
        assert!((p.angle - 0.4).abs() < 1e-8, "{p:?}");
    }

    #[test]
    fn wrap_range() {
        assert_eq!(wrap(-PI), PI);
        assert_eq!(wrap(PI), PI);
        assert!((wrap(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn sliding_matches_direct_on_shifted_reference() {
        let fs = 1920.0;
        let x = tone(96, fs, |t| (TAU * 60.0 * t + 0.3).cos() + 0.2 * (TAU * 300.0 * t - 1.0).cos());
        let tw = Twiddles::new(32, 6);
        for start in [0, 5, 17, 64] {
            let z1 = tw.at(&x, start, 1);
            let z5 = tw.at(&x, start, 5);
            assert!((z1 - Complex64::from_polar(1.0, 0.3)).norm() < 1e-12);
            assert!((z5 - Complex64::from_polar(0.2, -1.0)).norm() < 1e-12);
        }
    }
}
