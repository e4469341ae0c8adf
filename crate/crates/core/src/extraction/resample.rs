//! Local polynomial interpolation for records whose cycle is not a whole
//! number of samples.

/// Interpolation stencil width used by the extraction pipeline.
pub const STENCIL: usize = 10;

/// Value of `x` at fractional sample position `u` from the Lagrange
/// polynomial through `points` neighbouring samples. Near the ends the
/// stencil slides inward rather than padding.
pub fn lagrange_at(x: &[f64], u: f64, points: usize) -> f64 {
    let n = x.len();
    let m = points.min(n).max(1);
    let base = u.floor() as isize;
    if u == base as f64 && (0..n as isize).contains(&base) {
        return x[base as usize];
    }
    let lo = (base - m as isize / 2 + 1).clamp(0, (n - m) as isize) as usize;
    let mut acc = 0.0;
    for k in lo..lo + m {
        let mut w = 1.0;
        for j in lo..lo + m {
            if j != k {
                w *= (u - j as f64) / (k as f64 - j as f64);
            }
        }
        acc += w * x[k];
    }
    acc
}

/// Resample a uniformly sampled signal from `fs_in` to `fs_out`.
pub fn resample(x: &[f64], fs_in: f64, fs_out: f64, points: usize) -> Vec<f64> {
    let m = ((x.len() as f64) * fs_out / fs_in).floor() as usize;
    let ratio = fs_in / fs_out;
    (0..m).map(|j| lagrange_at(x, j as f64 * ratio, points)).collect()
}
