use serde::{Deserialize, Serialize};

use super::kronecker::is_fundamental_discriminant;
use std::f64::consts::PI;

use super::gamma::{gamma, rgamma};
use super::trig::{i_pow_neg, real_pow, unit_turn};
use super::zeta::{check_window, riemann_zeta_with, weighted_hurwitz_unchecked, Shift};
use crate::arith::{factorize, gcd, primes_up_to};
use crate::characters::DirichletCharacterSpec;
use crate::error::{finite, Error, Result};
use crate::policy::PrecisionPolicy;
use crate::ComplexValue;

/// Names an L-function the adelic verifiers regularize with.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LFunctionId {
    Riemann,
    Dirichlet { chi: DirichletCharacterSpec },
    DedekindQuadratic { disc: i64 },
    /// `L(s, χ∘N)` over the quadratic field of discriminant `disc`.
    NormInduced { chi: DirichletCharacterSpec, disc: i64 },
}

impl LFunctionId {
    /// The principal character modulo 1 is represented as `Riemann`.
    pub fn dirichlet(chi: DirichletCharacterSpec) -> Self {
        if chi.modulus() == 1 {
            LFunctionId::Riemann
        } else {
            LFunctionId::Dirichlet { chi }
        }
    }

    pub fn evaluate(&self, s: ComplexValue, policy: &PrecisionPolicy) -> Result<ComplexValue> {
        match self {
            LFunctionId::Riemann => riemann_zeta_with(s, policy),
            LFunctionId::Dirichlet { chi } => dirichlet_l_with(s, chi, policy),
            LFunctionId::DedekindQuadratic { disc } => dedekind_zeta_quadratic_with(s, *disc, policy),
            LFunctionId::NormInduced { chi, disc } => norm_induced_l_with(s, chi, *disc, policy),
        }
    }
}

/// `L(s, χ) = N^{-s} sum_{a=1}^{N} χ(a) ζ(s, a/N)`; for `Re s < 0` the
/// functional equation of the primitive character is used instead.
pub fn dirichlet_l_with(s: ComplexValue, chi: &DirichletCharacterSpec, policy: &PrecisionPolicy) -> Result<ComplexValue> {
    let n = chi.modulus();
    if n == 1 {
        return riemann_zeta_with(s, policy);
    }
    if chi.is_principal() {
        let zeta = riemann_zeta_with(s, policy)?;
        return Ok(factorize(n)
            .iter()
            .fold(zeta, |acc, &(p, _)| acc * (1.0 - real_pow(p as f64, -s))));
    }
    check_window(s)?;
    if s.re < 0.0 {
        let primitive = chi.primitive();
        let value = reflected_l(s, &primitive, policy)?;
        return Ok(factorize(n)
            .iter()
            .fold(value, |acc, &(p, _)| acc * (1.0 - primitive.eval(p as i64) * real_pow(p as f64, -s))));
    }
    hurwitz_combination(s, chi, policy)
}

fn hurwitz_combination(s: ComplexValue, chi: &DirichletCharacterSpec, policy: &PrecisionPolicy) -> Result<ComplexValue> {
    let n = chi.modulus();
    let scale = real_pow(n as f64, -s);
    let shifts: Vec<Shift> = (1..=n)
        .filter(|&a| gcd(a, n) == 1)
        .map(|a| Shift {
            weight: chi.eval(a as i64) * scale,
            a: a as f64 / n as f64,
        })
        .collect();
    weighted_hurwitz_unchecked(s, &shifts, true, policy)
}

/// `L(s, χ) = W(χ) (N/π)^{1/2-s} Γ((1-s+a)/2)/Γ((s+a)/2) L(1-s, χ̄)` for
/// primitive non-principal `χ` of parity `a`, `W(χ) = τ(χ)/(i^a √N)`.
fn reflected_l(s: ComplexValue, chi: &DirichletCharacterSpec, policy: &PrecisionPolicy) -> Result<ComplexValue> {
    let n = chi.modulus();
    let a = chi.parity() as f64;
    let tau: ComplexValue = (1..n).map(|k| chi.eval(k as i64) * unit_turn(k as f64 / n as f64)).sum();
    let root_number = tau * i_pow_neg(chi.parity() as i64) / (n as f64).sqrt();
    let factor = root_number
        * real_pow(n as f64 / PI, 0.5 - s)
        * gamma((1.0 - s + a) / 2.0)?
        * rgamma((s + a) / 2.0)?;
    finite(factor * hurwitz_combination(1.0 - s, &chi.conj(), policy)?, "dirichlet_l")
}

pub fn dirichlet_l(s: ComplexValue, chi: &DirichletCharacterSpec) -> Result<ComplexValue> {
    dirichlet_l_with(s, chi, &PrecisionPolicy::default())
}

/// `ζ_K(s) = ζ(s) L(s, χ_D)`.
pub fn dedekind_zeta_quadratic_with(s: ComplexValue, disc: i64, policy: &PrecisionPolicy) -> Result<ComplexValue> {
    let chi = DirichletCharacterSpec::kronecker(disc)?;
    if (s - 1.0).norm() < 1e-15 {
        return Err(Error::PoleAtOne);
    }
    Ok(riemann_zeta_with(s, policy)? * dirichlet_l_with(s, &chi, policy)?)
}

pub fn dedekind_zeta_quadratic(s: ComplexValue, disc: i64) -> Result<ComplexValue> {
    dedekind_zeta_quadratic_with(s, disc, &PrecisionPolicy::default())
}

/// `L(s, χ∘N) = L(s, χ') L(s, (χ χ_D)')` with primitive characters.
pub fn norm_induced_l_with(
    s: ComplexValue,
    chi: &DirichletCharacterSpec,
    disc: i64,
    policy: &PrecisionPolicy,
) -> Result<ComplexValue> {
    if !is_fundamental_discriminant(disc) {
        return Err(Error::InvalidCharacter(format!("{disc} is not a fundamental discriminant")));
    }
    let first = chi.primitive();
    let second = chi.mul(&DirichletCharacterSpec::kronecker(disc)?).primitive();
    Ok(dirichlet_l_with(s, &first, policy)? * dirichlet_l_with(s, &second, policy)?)
}

/// `prod_{p <= cutoff} (1 - χ(p) p^{-s})^{-1}`.
pub fn euler_product(s: ComplexValue, chi: &DirichletCharacterSpec, cutoff: u64) -> ComplexValue {
    primes_up_to(cutoff)
        .into_iter()
        .map(|p| (1.0 - chi.eval(p as i64) * real_pow(p as f64, -s)).inv())
        .product()
}
