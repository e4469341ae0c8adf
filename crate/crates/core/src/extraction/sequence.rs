//! Symmetrical components.

use num_complex::Complex64;
use std::f64::consts::TAU;

fn alpha() -> Complex64 {
    Complex64::from_polar(1.0, TAU / 3.0)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SequenceTriple {
    pub zero: Complex64,
    pub positive: Complex64,
    pub negative: Complex64,
}

pub fn sequence_components(a: Complex64, b: Complex64, c: Complex64) -> SequenceTriple {
    let al = alpha();
    let al2 = al * al;
    SequenceTriple {
        zero: (a + b + c) / 3.0,
        positive: (a + al * b + al2 * c) / 3.0,
        negative: (a + al2 * b + al * c) / 3.0,
    }
}

impl SequenceTriple {
    /// Phase quantities (a, b, c) that produce this triple.
    pub fn to_phases(&self) -> [Complex64; 3] {
        let al = alpha();
        let al2 = al * al;
        [
            self.zero + self.positive + self.negative,
            self.zero + al2 * self.positive + al * self.negative,
            self.zero + al * self.positive + al2 * self.negative,
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(m: f64, deg: f64) -> Complex64 {
        Complex64::from_polar(m, deg.to_radians())
    }

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn balanced_is_pure_positive() {
        let s = sequence_components(p(1.0, 0.0), p(1.0, -120.0), p(1.0, 120.0));
        assert!(close(s.positive, p(1.0, 0.0)));
        assert!(s.zero.norm() < 1e-12 && s.negative.norm() < 1e-12);
    }

    #[test]
    fn single_phase_splits_equally() {
        let z = Complex64::new(0.0, 0.0);
        let s = sequence_components(p(1.0, 0.0), z, z);
        for x in [s.zero, s.positive, s.negative] {
            assert!(close(x, p(1.0 / 3.0, 0.0)));
        }
    }

    #[test]
    fn reversed_rotation_is_pure_negative() {
        let s = sequence_components(p(1.0, 0.0), p(1.0, 120.0), p(1.0, -120.0));
        assert!(close(s.negative, p(1.0, 0.0)));
        assert!(s.zero.norm() < 1e-12 && s.positive.norm() < 1e-12);
    }
}
