//! Single-phase power quantities from fundamental phasors.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::phasor::{angle_of, wrap};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerQuantities {
    pub p: f64,
    pub q: f64,
    pub pf: f64,
    /// Voltage angle minus current angle, radians in (−π, π].
    pub phi: f64,
}

/// `P = |v||i|cos φ`, `Q = |v||i|sin φ` on the phasors as given (peak
/// phasors yield twice the average power).
pub fn power_quantities(v: Complex64, i: Complex64) -> Result<PowerQuantities> {
    let s = v.norm() * i.norm();
    if !(s > 0.0) {
        return Err(Error::Domain("power factor undefined for a zero phasor".into()));
    }
    let phi = wrap(angle_of(v) - angle_of(i));
    Ok(PowerQuantities { p: s * phi.cos(), q: s * phi.sin(), pf: phi.cos(), phi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn p(m: f64, deg: f64) -> Complex64 {
        Complex64::from_polar(m, deg.to_radians())
    }

    #[test]
    fn lagging_thirty_degrees() {
        let r = power_quantities(p(1.0, 0.0), p(1.0, -30.0)).unwrap();
        assert!((r.p - 0.866_025_403_784_438_6).abs() < 1e-12);
        assert!((r.q - 0.5).abs() < 1e-12);
        assert!((r.pf - r.p).abs() < 1e-12);
        assert!((r.phi - 30f64.to_radians()).abs() < 1e-12);
    }

    #[test]
    fn in_phase() {
        let r = power_quantities(p(1.0, 0.0), p(1.0, 0.0)).unwrap();
        assert!((r.p - 1.0).abs() < 1e-12 && r.q.abs() < 1e-12);
    }

    #[test]
    fn leading_quadrature() {
        let r = power_quantities(p(1.0, 0.0), p(1.0, 90.0)).unwrap();
        assert!(r.p.abs() < 1e-12 && (r.q + 1.0).abs() < 1e-12);
        assert!((r.phi + FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn zero_current_is_undefined() {
        assert!(matches!(power_quantities(p(1.0, 0.0), Complex64::new(0.0, 0.0)), Err(Error::Domain(_))));
    }
}
