//! First-difference rates between consecutive windows.

use super::phasor::wrap;

/// Composite-rate denominators smaller than this emit 0.
pub const DEFAULT_DEADBAND: f64 = 1e-6;

/// `(x[k] − x[k−1]) / dt`, aligned to the later point. The first element is
/// absent.
pub fn rate_of_change(series: &[f64], dt: f64) -> Vec<Option<f64>> {
    let mut out = Vec::with_capacity(series.len());
    if !series.is_empty() {
        out.push(None);
    }
    out.extend(series.windows(2).map(|w| Some((w[1] - w[0]) / dt)));
    out
}

/// Like [`rate_of_change`] on an angle series, taking the shortest arc.
pub fn angle_rate(series: &[f64], dt: f64) -> Vec<Option<f64>> {
    let mut out = Vec::with_capacity(series.len());
    if !series.is_empty() {
        out.push(None);
    }
    out.extend(series.windows(2).map(|w| Some(wrap(w[1] - w[0]) / dt)));
    out
}

/// `Δnum / Δden` between consecutive points, 0 when `|Δden| < deadband`.
pub fn composite_rate(num: &[f64], den: &[f64], deadband: f64) -> Vec<Option<f64>> {
    let mut out = Vec::with_capacity(num.len());
    if !num.is_empty() {
        out.push(None);
    }
    for k in 1..num.len().min(den.len()) {
        let dd = den[k] - den[k - 1];
        let dn = num[k] - num[k - 1];
        out.push(if !(dn.is_finite() && dd.is_finite()) {
            None
        } else if dd.abs() < deadband {
            Some(0.0)
        } else {
            Some(dn / dd)
        });
    }
    out
}
