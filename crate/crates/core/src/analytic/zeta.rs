use std::f64::consts::PI;

use super::bernoulli::em_coefficient;
use super::gamma::{gamma, rgamma};
use super::trig::real_pow;
use crate::error::{finite, Error, Result};
use crate::policy::PrecisionPolicy;
use crate::ComplexValue;

const MAX_IM: f64 = 30.0;
const MAX_RE: f64 = 10.0;
const MAX_SERIES_DOUBLINGS: u32 = 14;
/// One less than the Bernoulli table size: the remainder bound needs `B_{2K+2}`.
const MAX_BERNOULLI_TERMS: usize = 15;

pub(crate) fn check_window(s: ComplexValue) -> Result<()> {
    if !(s.re.is_finite() && s.im.is_finite()) {
        return Err(Error::NonFinite("zeta argument".into()));
    }
    if s.im.abs() > MAX_IM || s.re.abs() > MAX_RE {
        return Err(Error::AccuracyNotReachable {
            s,
            detail: format!("outside the accuracy window |Re s| <= {MAX_RE}, |Im s| <= {MAX_IM}"),
        });
    }
    Ok(())
}

/// expm1(w) / w, continuous through w = 0.
fn exprel(w: ComplexValue) -> ComplexValue {
    if w.norm() < 0.5 {
        let mut term = ComplexValue::new(1.0, 0.0);
        let mut sum = term;
        for k in 2..=24 {
            term = term * w / k as f64;
            sum += term;
        }
        sum
    } else {
        (w.exp() - 1.0) / w
    }
}

/// One shifted Hurwitz sum `weight * zeta(s, shift)` in a weighted combination.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Shift {
    pub weight: ComplexValue,
    pub a: f64,
}

/// Evaluates `sum_j w_j zeta(s, a_j)` by Euler–Maclaurin with a common cut `M`.
///
/// The pole term `x^{1-s}/(s-1)` is split as `1/(s-1) + (x^{1-s}-1)/(s-1)`;
/// when `weights_cancel` is set the caller guarantees `sum_j w_j = 0` and the
/// `1/(s-1)` part is dropped, so `s = 1` is regular.
pub(crate) fn weighted_hurwitz(
    s: ComplexValue,
    shifts: &[Shift],
    weights_cancel: bool,
    policy: &PrecisionPolicy,
) -> Result<ComplexValue> {
    check_window(s)?;
    weighted_hurwitz_unchecked(s, shifts, weights_cancel, policy)
}

/// [`weighted_hurwitz`] without the window check, for reflected arguments.
pub(crate) fn weighted_hurwitz_unchecked(
    s: ComplexValue,
    shifts: &[Shift],
    weights_cancel: bool,
    policy: &PrecisionPolicy,
) -> Result<ComplexValue> {
    let at_one = (s - 1.0).norm() < 1e-15;
    if at_one && !weights_cancel {
        return Err(Error::PoleAtOne);
    }
    let a_min = shifts.iter().map(|sh| sh.a).fold(1.0, f64::min);
    let (m, k_terms) = choose_cut(s, a_min, policy);

    let mut total = ComplexValue::new(0.0, 0.0);
    let mut magnitude = 0.0;
    let mut truncation = 0.0;
    for sh in shifts {
        if sh.weight.norm() == 0.0 {
            continue;
        }
        let (v, mag, tr) = single(s, sh.a, m, k_terms);
        total += sh.weight * v;
        magnitude += sh.weight.norm() * mag;
        truncation += sh.weight.norm() * tr;
    }
    if !weights_cancel {
        let w: ComplexValue = shifts.iter().map(|sh| sh.weight).sum();
        total += w / (s - 1.0);
        magnitude += (w / (s - 1.0)).norm();
    }
    let err = truncation + 4.0 * f64::EPSILON * magnitude;
    let value = finite(total, "hurwitz_zeta")?;
    if err > policy.target_abs_err * value.norm().max(1.0) {
        return Err(Error::AccuracyNotReachable {
            s,
            detail: format!("estimated error {err:e} with M = {m}, K = {k_terms}"),
        });
    }
    Ok(value)
}

/// Euler–Maclaurin pieces for one shift `a` without the bare `1/(s-1)`.
/// Returns (value, sum of term magnitudes, truncation bound).
fn single(s: ComplexValue, a: f64, m: usize, k_terms: usize) -> (ComplexValue, f64, f64) {
    let mut value = ComplexValue::new(0.0, 0.0);
    let mut magnitude = 0.0;
    for n in 0..m {
        let t = (-s * (n as f64 + a).ln()).exp();
        value += t;
        magnitude += t.norm();
    }
    let x = m as f64 + a;
    let lx = x.ln();
    // (x^{1-s} - 1)/(s - 1) = -ln x * exprel((1-s) ln x)
    let tail = -lx * exprel((1.0 - s) * lx);
    let x_minus_s = (-s * lx).exp();
    value += tail + 0.5 * x_minus_s;
    magnitude += tail.norm() + 0.5 * x_minus_s.norm();

    // sum_k B_2k/(2k)! (s)_{2k-1} x^{-s-2k+1}
    let mut rising = s; // (s)_{1}
    let mut power = x_minus_s / x; // x^{-s-1}
    let inv_x2 = 1.0 / (x * x);
    for k in 1..=k_terms {
        let term = rising * power * em_coefficient(k);
        value += term;
        magnitude += term.norm();
        rising = rising * (s + (2 * k - 1) as f64) * (s + (2 * k) as f64);
        power *= inv_x2;
    }
    // rising now holds (s)_{2K+1}, power x^{-s-2K-1}
    let denom = s.re + (2 * k_terms + 1) as f64;
    let truncation = em_coefficient(k_terms + 1).abs() * rising.norm() * power.norm() * x
        / denom.max(1.0);
    (value, magnitude, truncation)
}

/// Chooses the cut `M` and the number of Bernoulli corrections `K`.
///
/// `K` starts at the policy value and is raised (up to the table size) only
/// when no cut meets the target; for each `K` the cut starts at the policy
/// value and doubles, and for `Re s < 0` it may also shrink because the
/// direct sum then dominates rounding.
fn choose_cut(s: ComplexValue, a: f64, policy: &PrecisionPolicy) -> (usize, usize) {
    let predicted = |m: usize, k_terms: usize| -> f64 {
        let x = m as f64 + a;
        let mut rising = 1.0;
        for j in 0..(2 * k_terms + 1) {
            rising *= (s + j as f64).norm();
        }
        let denom = (s.re + (2 * k_terms + 1) as f64).max(1.0);
        let trunc = em_coefficient(k_terms + 1).abs() * rising * x.powf(-s.re - 2.0 * k_terms as f64)
            / denom;
        let biggest = a.powf(-s.re).max(x.powf(-s.re));
        trunc + 4.0 * f64::EPSILON * m as f64 * biggest
    };
    let base = policy.series_terms;
    let mut candidates = vec![base];
    let mut up = base;
    for _ in 0..MAX_SERIES_DOUBLINGS {
        up *= 2;
        candidates.push(up);
    }
    if s.re < 0.0 {
        // direct sums of growing terms cancel against the tail, so short cuts win
        let mut down = base;
        while down > 10 {
            down = (down / 2).max(10);
            candidates.push(down);
        }
        candidates.extend(2..10);
    }
    // smallest cut meeting the target, else the best available
    candidates.sort_unstable();
    let target = policy.target_abs_err * 1e-2;
    let mut best = (f64::INFINITY, base, policy.bernoulli_terms);
    for k_terms in policy.bernoulli_terms..=MAX_BERNOULLI_TERMS.max(policy.bernoulli_terms) {
        for &m in &candidates {
            let e = predicted(m, k_terms);
            if e <= target {
                return (m, k_terms);
            }
            if e < best.0 {
                best = (e, m, k_terms);
            }
        }
    }
    (best.1, best.2)
}

/// Hurwitz zeta `zeta(s, a) = sum_{n>=0} (n+a)^{-s}` for `0 < a <= 1`.
pub fn hurwitz_zeta_with(s: ComplexValue, a: f64, policy: &PrecisionPolicy) -> Result<ComplexValue> {
    if !(a > 0.0 && a <= 1.0) {
        return Err(Error::ConstraintViolation(format!(
            "hurwitz shift a = {a} outside (0, 1]"
        )));
    }
    weighted_hurwitz(s, &[Shift { weight: ComplexValue::new(1.0, 0.0), a }], false, policy)
}

pub fn hurwitz_zeta(s: ComplexValue, a: f64) -> Result<ComplexValue> {
    hurwitz_zeta_with(s, a, &PrecisionPolicy::default())
}

/// For `Re s < 0` through `ζ(s) = π^{s-1/2} Γ((1-s)/2)/Γ(s/2) ζ(1-s)`.
pub fn riemann_zeta_with(s: ComplexValue, policy: &PrecisionPolicy) -> Result<ComplexValue> {
    check_window(s)?;
    let one = [Shift { weight: ComplexValue::new(1.0, 0.0), a: 1.0 }];
    if s.re < 0.0 {
        let reflected = weighted_hurwitz_unchecked(1.0 - s, &one, false, policy)?;
        let factor = real_pow(PI, s - 0.5) * gamma((1.0 - s) / 2.0)? * rgamma(s / 2.0)?;
        return finite(factor * reflected, "riemann_zeta");
    }
    weighted_hurwitz(s, &one, false, policy)
}

pub fn riemann_zeta(s: ComplexValue) -> Result<ComplexValue> {
    riemann_zeta_with(s, &PrecisionPolicy::default())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> ComplexValue {
        ComplexValue::new(re, im)
    }

    // Oracle: direct summation of 10^6 terms plus the tail integral.
    #[test]
    fn zeta_two_against_direct_sum() {
        let n = 1_000_000u64;
        let mut direct = 0.0;
        for k in (1..=n).rev() {
            direct += 1.0 / (k as f64 * k as f64);
        }
        direct += 1.0 / (n as f64 + 0.5);
        let z = riemann_zeta(c(2.0, 0.0)).unwrap();
        assert!((z.re - direct).abs() < 1e-11);
        assert!((z.re - PI * PI / 6.0).abs() < 1e-12);
        assert!(z.im.abs() < 1e-15);
    }

    #[test]
    fn special_values() {
        assert!((riemann_zeta(c(0.0, 0.0)).unwrap() - c(-0.5, 0.0)).norm() < 1e-13);
        assert!((riemann_zeta(c(-1.0, 0.0)).unwrap() - c(-1.0 / 12.0, 0.0)).norm() < 1e-12);
        assert!((riemann_zeta(c(-3.0, 0.0)).unwrap() - c(1.0 / 120.0, 0.0)).norm() < 1e-12);
        assert!((hurwitz_zeta(c(0.0, 0.0), 0.25).unwrap() - c(0.25, 0.0)).norm() < 1e-13);
        // zeta(s, 1/2) = (2^s - 1) zeta(s)
        let s = c(0.7, 4.0);
        let lhs = hurwitz_zeta(s, 0.5).unwrap();
        let rhs = ((s * 2f64.ln()).exp() - 1.0) * riemann_zeta(s).unwrap();
        assert!((lhs - rhs).norm() < 1e-12);
    }

    // Oracle for zeta(-1): functional equation zeta(1-s) = 2 (2 pi)^{-s} cos(pi s/2) Gamma(s) zeta(s) at s = 2.
    #[test]
    fn functional_equation_path() {
        for &s in &[c(2.0, 0.0), c(3.5, 1.0), c(0.3, 7.0), c(0.8, -12.0)] {
            let lhs = riemann_zeta(1.0 - s).unwrap();
            let rhs = 2.0 * (-s * (2.0 * PI).ln()).exp() * (s * PI / 2.0).cos() * gamma(s).unwrap()
                * riemann_zeta(s).unwrap();
            assert!((lhs - rhs).norm() < 1e-10 * rhs.norm().max(1.0), "s={s}");
        }
    }

    // The reflected and the direct Euler–Maclaurin paths agree where both work.
    #[test]
    fn reflection_matches_direct_sum() {
        for &s in &[c(-0.5, 3.0), c(-1.5, 0.0), c(-0.2, -8.0), c(-2.5, 1.0)] {
            let direct = hurwitz_zeta(s, 1.0).unwrap();
            let reflected = riemann_zeta(s).unwrap();
            assert!((direct - reflected).norm() < 1e-11 * direct.norm().max(1.0), "s={s}");
        }
        // trivial zeros
        assert_eq!(riemann_zeta(c(-4.0, 0.0)).unwrap(), c(0.0, 0.0));
        let z = riemann_zeta(c(-9.5, 0.0)).unwrap();
        assert!(z.re.is_finite());
    }

    #[test]
    fn first_zero() {
        let z = riemann_zeta(c(0.5, 14.134_725_141_734_693)).unwrap();
        assert!(z.norm() < 1e-12);
    }

    #[test]
    fn pole_and_window() {
        assert!(matches!(riemann_zeta(c(1.0, 0.0)), Err(Error::PoleAtOne)));
        assert!(riemann_zeta(c(1.0 + 1e-9, 0.0)).is_ok());
        assert!(matches!(
            riemann_zeta(c(0.5, 40.0)),
            Err(Error::AccuracyNotReachable { .. })
        ));
        assert!(hurwitz_zeta(c(2.0, 0.0), 0.0).is_err());
    }

    #[test]
    fn window_corners_are_reachable_or_loud() {
        for &s in &[c(10.0, 30.0), c(-1.0, 30.0), c(0.5, -30.0), c(-2.0, 0.0)] {
            match riemann_zeta(s) {
                Ok(v) => assert!(v.re.is_finite()),
                Err(e) => assert!(matches!(e, Error::AccuracyNotReachable { .. })),
            }
        }
    }
}
