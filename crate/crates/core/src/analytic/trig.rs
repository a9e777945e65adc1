//! Trigonometric functions of `pi * x` with exact zeros at integers and
//! half-integers, plus principal-branch real-base powers.

use crate::ComplexValue;

/// sin(pi x) with argument reduction in units of pi/2.
pub fn sin_pi(x: f64) -> f64 {
    let n = (2.0 * x).round();
    let f = std::f64::consts::PI * (x - 0.5 * n);
    match (n as i64).rem_euclid(4) {
        0 => f.sin(),
        1 => f.cos(),
        2 => -f.sin(),
        _ => -f.cos(),
    }
}

/// cos(pi x) with argument reduction in units of pi/2.
pub fn cos_pi(x: f64) -> f64 {
    let n = (2.0 * x).round();
    let f = std::f64::consts::PI * (x - 0.5 * n);
    match (n as i64).rem_euclid(4) {
        0 => f.cos(),
        1 => -f.sin(),
        2 => -f.cos(),
        _ => f.sin(),
    }
}

pub fn csin_pi(z: ComplexValue) -> ComplexValue {
    let y = std::f64::consts::PI * z.im;
    ComplexValue::new(sin_pi(z.re) * y.cosh(), cos_pi(z.re) * y.sinh())
}

pub fn ccos_pi(z: ComplexValue) -> ComplexValue {
    let y = std::f64::consts::PI * z.im;
    ComplexValue::new(cos_pi(z.re) * y.cosh(), -sin_pi(z.re) * y.sinh())
}

/// e^{2 pi i x}, exact for x in (1/4) Z.
pub fn unit_turn(x: f64) -> ComplexValue {
    ComplexValue::new(cos_pi(2.0 * x), sin_pi(2.0 * x))
}

/// base^s = exp(s ln base) for a positive real base.
pub fn real_pow(base: f64, s: ComplexValue) -> ComplexValue {
    debug_assert!(base > 0.0);
    (s * base.ln()).exp()
}

/// i^{-k} exactly.
pub fn i_pow_neg(k: i64) -> ComplexValue {
    match k.rem_euclid(4) {
        0 => ComplexValue::new(1.0, 0.0),
        1 => ComplexValue::new(0.0, -1.0),
        2 => ComplexValue::new(-1.0, 0.0),
        _ => ComplexValue::new(0.0, 1.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_zeros() {
        for k in -6..=6 {
            assert_eq!(sin_pi(k as f64), 0.0);
            assert_eq!(cos_pi(k as f64 + 0.5), 0.0);
        }
    }

    #[test]
    fn agrees_with_std() {
        for i in -200..200 {
            let x = i as f64 * 0.0371;
            assert!((sin_pi(x) - (std::f64::consts::PI * x).sin()).abs() < 1e-13);
            assert!((cos_pi(x) - (std::f64::consts::PI * x).cos()).abs() < 1e-13);
        }
        let z = ComplexValue::new(0.3, -1.7);
        let pz = z * std::f64::consts::PI;
        assert!((csin_pi(z) - pz.sin()).norm() < 1e-12);
        assert!((ccos_pi(z) - pz.cos()).norm() < 1e-12);
    }

    #[test]
    fn unit_turn_quarter_points() {
        assert_eq!(unit_turn(0.25), ComplexValue::new(0.0, 1.0));
        assert_eq!(unit_turn(0.5), ComplexValue::new(-1.0, 0.0));
        assert_eq!(i_pow_neg(1), ComplexValue::new(0.0, -1.0));
    }
}
