use std::f64::consts::PI;

use super::bernoulli::bernoulli_2k;
use crate::error::{finite, Error, Result};
use crate::ComplexValue;

/// Distance below which an argument counts as sitting on a pole.
pub(crate) const POLE_SNAP: f64 = 1e-12;

/// True when `z` is within [`POLE_SNAP`] of a non-positive integer.
pub fn is_gamma_pole(z: ComplexValue) -> bool {
    z.im.abs() <= POLE_SNAP && z.re <= POLE_SNAP && (z.re - z.re.round()).abs() <= POLE_SNAP
}

/// Distance from `z` to the nearest pole of the Euler gamma function.
pub fn gamma_pole_distance(z: ComplexValue) -> f64 {
    let n = z.re.round().min(0.0);
    (z - n).norm()
}

/// Principal branch of log Γ(z).
///
/// The argument is shifted to `Re z >= 10` with the recurrence
/// log Γ(z) = log Γ(z + n) − Σ log(z + k), then Stirling's series with ten
/// Bernoulli corrections is applied. Off the negative real axis the result is
/// the analytic continuation from the positive reals; on the negative real
/// axis the imaginary part is the limit from above.
pub fn log_gamma(z: ComplexValue) -> Result<ComplexValue> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::NonFinite("log_gamma argument".into()));
    }
    if is_gamma_pole(z) {
        return Err(Error::PoleAtNonPositiveInteger(z));
    }
    let mut w = z;
    let mut shift = ComplexValue::new(0.0, 0.0);
    while w.re < 10.0 {
        shift += w.ln();
        w += 1.0;
    }
    finite(stirling(w) - shift, "log_gamma")
}

fn stirling(w: ComplexValue) -> ComplexValue {
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = ComplexValue::new(0.0, 0.0);
    let mut power = inv;
    for k in 1..=10 {
        let kk = (2 * k) as f64;
        series += power * (bernoulli_2k(k) / (kk * (kk - 1.0)));
        power *= inv2;
    }
    (w - 0.5) * w.ln() - w + 0.5 * (2.0 * PI).ln() + series
}

/// Euler Γ(z).
pub fn gamma(z: ComplexValue) -> Result<ComplexValue> {
    finite(log_gamma(z)?.exp(), "gamma")
}

/// Entire reciprocal 1/Γ(z), exactly zero on the poles of Γ.
pub fn rgamma(z: ComplexValue) -> Result<ComplexValue> {
    if is_gamma_pole(z) {
        return Ok(ComplexValue::new(0.0, 0.0));
    }
    finite((-log_gamma(z)?).exp(), "rgamma")
}
