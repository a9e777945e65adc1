//! Gamma and beta functions of the local fields R, C and the p-adic fields.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::analytic::gamma::{gamma, is_gamma_pole, rgamma};
use crate::analytic::trig::{i_pow_neg, real_pow, unit_turn};
use crate::arith::{factorize, gcd};
use crate::characters::DirichletCharacterSpec;
use crate::error::{finite, Error, Result};
use crate::ComplexValue;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealGammaArgs {
    pub alpha: ComplexValue,
    pub nu: u8,
}

impl RealGammaArgs {
    pub fn new(alpha: ComplexValue, nu: i64) -> Self {
        RealGammaArgs {
            alpha,
            nu: nu.rem_euclid(2) as u8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexGammaArgs {
    pub alpha: ComplexValue,
    pub nu: i64,
}

impl ComplexGammaArgs {
    pub fn new(alpha: ComplexValue, nu: i64) -> Self {
        ComplexGammaArgs { alpha, nu }
    }
}

/// Residue field data of a p-adic field of degree `f <= 2` over `Q_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PAdicPlace {
    pub p: u64,
    pub f: u32,
    pub q: u64,
}

impl PAdicPlace {
    pub fn from_module(q: u64) -> Result<Self> {
        match factorize(q).as_slice() {
            [(p, f)] if *f <= 2 => Ok(PAdicPlace { p: *p, f: *f, q }),
            _ => Err(Error::ConstraintViolation(format!(
                "module {q} is not p or p^2"
            ))),
        }
    }
}

/// Local component of a character at `p`: a primitive character modulo
/// `p^rank` and the rank `r` of the additive character (0 over `Q_p`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalCharacter {
    pub p: u64,
    pub rank: u32,
    pub chi: DirichletCharacterSpec,
    pub r: u32,
}

/// How a Dirichlet character is read as a local character on `Z_p^×` when
/// forming the Gauss sum of `κ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KappaConvention {
    /// `θ_p(u) = χ_p(u)^{-1}`, the component of the idele class character.
    #[default]
    Idelic,
    /// `θ_p(u) = χ_p(u)`, the Dirichlet component taken literally.
    Dirichlet,
}

fn pole(what: &str, at: ComplexValue) -> Error {
    Error::Pole {
        what: what.to_string(),
        at,
    }
}

/// `Γ_∞(α;ν) = 2 i^{-ν} (2π)^{-α} Γ(α) cos(π(α-ν)/2)`, evaluated as
/// `i^{-ν} π^{1/2-α} Γ((α+ν)/2) / Γ((1-α+ν)/2)` so that the removable
/// points `α ≡ ν + 1 (mod 2)` come out finite.
pub fn gamma_real(alpha: ComplexValue, nu: i64) -> Result<ComplexValue> {
    let nu = nu.rem_euclid(2);
    let top = (alpha + nu as f64) / 2.0;
    if is_gamma_pole(top) {
        return Err(pole("gamma_real", alpha));
    }
    let value = i_pow_neg(nu) * real_pow(PI, 0.5 - alpha) * gamma(top)? * rgamma((1.0 - alpha + nu as f64) / 2.0)?;
    finite(value, "gamma_real")
}

/// `Γ_ω(α;ν) = i^{-ν} 2 (2π)^{-2α} Γ(α+ν/2) Γ(α-ν/2) sin(π(2α-ν)/2)`, evaluated
/// as `± i^{-ν} (2π)^{1-2α} Γ(α+|ν|/2) / Γ(1-α+|ν|/2)`.
pub fn gamma_complex(alpha: ComplexValue, nu: i64) -> Result<ComplexValue> {
    let half = nu.unsigned_abs() as f64 / 2.0;
    if is_gamma_pole(alpha + half) {
        return Err(pole("gamma_complex", alpha));
    }
    let sign = if nu < 0 && nu % 2 != 0 { -1.0 } else { 1.0 };
    let value = sign
        * i_pow_neg(nu)
        * real_pow(2.0 * PI, 1.0 - 2.0 * alpha)
        * gamma(alpha + half)?
        * rgamma(1.0 - alpha + half)?;
    finite(value, "gamma_complex")
}

/// `G_q(x) = (1 - x/q) / (1 - 1/x)`.
pub fn reduced_gamma(x: ComplexValue, q: u64) -> Result<ComplexValue> {
    PAdicPlace::from_module(q)?;
    if x.norm() == 0.0 {
        return Err(Error::ConstraintViolation("G_q at x = 0".into()));
    }
    if (x - 1.0).norm() < 1e-14 {
        return Err(pole("reduced_gamma", x));
    }
    finite((1.0 - x / q as f64) / (1.0 - x.inv()), "reduced_gamma")
}

/// `Γ_q(α) = G_q(q^α)` with the principal branch `q^α = e^{α ln q}`.
pub fn gamma_q(alpha: ComplexValue, q: u64) -> Result<ComplexValue> {
    reduced_gamma(real_pow(q as f64, alpha), q).map_err(|e| match e {
        Error::Pole { .. } => pole("gamma_q", alpha),
        other => other,
    })
}

/// `G_q(x)` in exact rational arithmetic.
pub fn reduced_gamma_exact(x: &BigRational, q: u64) -> Result<BigRational> {
    PAdicPlace::from_module(q)?;
    if x.is_zero() {
        return Err(Error::ConstraintViolation("G_q at x = 0".into()));
    }
    if x.is_one() {
        return Err(Error::Pole {
            what: "reduced_gamma".into(),
            at: ComplexValue::new(1.0, 0.0),
        });
    }
    let one = BigRational::one();
    let q = BigRational::from_integer(BigInt::from(q));
    Ok((&one - x / q) / (&one - x.recip()))
}

/// `Γ_q(k)` for integer `k`, exactly.
pub fn gamma_q_exact(k: i64, q: u64) -> Result<BigRational> {
    let base = BigRational::from_integer(BigInt::from(q));
    let x = if k >= 0 {
        num_traits::pow(base, k as usize)
    } else {
        num_traits::pow(base, (-k) as usize).recip()
    };
    reduced_gamma_exact(&x, q)
}

/// `κ(θ) = p^{-ρ/2} sum_{u mod p^ρ} θ_p(u) e^{2πi u/p^{ρ+r}}`.
pub fn kappa_local(chi: &LocalCharacter) -> ComplexValue {
    kappa_local_with(chi, KappaConvention::default())
}

pub fn kappa_local_with(chi: &LocalCharacter, convention: KappaConvention) -> ComplexValue {
    let m = chi.p.pow(chi.rank);
    let denom = chi.p.pow(chi.rank + chi.r);
    let sum: ComplexValue = (1..m)
        .filter(|&u| gcd(u, chi.p) == 1)
        .map(|u| {
            let value = match convention {
                KappaConvention::Idelic => chi.chi.eval(u as i64).conj(),
                KappaConvention::Dirichlet => chi.chi.eval(u as i64),
            };
            value * unit_turn((u % denom) as f64 / denom as f64)
        })
        .sum();
    sum / (m as f64).sqrt()
}

/// `κ(θ) q^{(α-1/2)(r+ρ)}` for a ramified local character (`q = p`).
pub fn local_gamma_ramified(alpha: ComplexValue, chi: &LocalCharacter) -> Result<ComplexValue> {
    local_gamma_ramified_with(alpha, chi, KappaConvention::default())
}

pub fn local_gamma_ramified_with(
    alpha: ComplexValue,
    chi: &LocalCharacter,
    convention: KappaConvention,
) -> Result<ComplexValue> {
    if chi.rank == 0 {
        return Err(Error::ConstraintViolation(
            "unramified local character: use gamma_q".into(),
        ));
    }
    let exponent = (alpha - 0.5) * (chi.r + chi.rank) as f64;
    finite(kappa_local_with(chi, convention) * real_pow(chi.p as f64, exponent), "local_gamma_ramified")
}

fn check_sum(alphas: [ComplexValue; 3], expected: f64) -> Result<()> {
    let sum: ComplexValue = alphas.iter().sum();
    let scale = alphas.iter().map(|a| a.norm()).sum::<f64>().max(1.0);
    if (sum - expected).norm() > 1e-12 * scale {
        return Err(Error::ConstraintViolation(format!(
            "arguments sum to {sum}, expected {expected}"
        )));
    }
    Ok(())
}

/// `B_∞ = Γ_∞(α;ν) Γ_∞(β;μ) Γ_∞(γ;η)` with `α+β+γ = 1`, `ν+μ+η ≡ 0`.
pub fn beta_real(a: RealGammaArgs, b: RealGammaArgs, c: RealGammaArgs) -> Result<ComplexValue> {
    check_sum([a.alpha, b.alpha, c.alpha], 1.0)?;
    if (a.nu + b.nu + c.nu) % 2 != 0 {
        return Err(Error::ConstraintViolation("ν+μ+η must be 0 in F_2".into()));
    }
    real_product(a, b, c)
}

fn real_product(a: RealGammaArgs, b: RealGammaArgs, c: RealGammaArgs) -> Result<ComplexValue> {
    Ok(gamma_real(a.alpha, a.nu as i64)? * gamma_real(b.alpha, b.nu as i64)? * gamma_real(c.alpha, c.nu as i64)?)
}

/// `B_∞(α,β,γ)`, all signs zero.
pub fn beta_real_reduced(alpha: ComplexValue, beta: ComplexValue, gamma: ComplexValue) -> Result<ComplexValue> {
    beta_real(
        RealGammaArgs::new(alpha, 0),
        RealGammaArgs::new(beta, 0),
        RealGammaArgs::new(gamma, 0),
    )
}

/// `B_ω = Γ_ω(α;ν) Γ_ω(β;μ) Γ_ω(γ;η)` with `α+β+γ = 1`, `ν+μ+η = 0`.
pub fn beta_complex(a: ComplexGammaArgs, b: ComplexGammaArgs, c: ComplexGammaArgs) -> Result<ComplexValue> {
    check_sum([a.alpha, b.alpha, c.alpha], 1.0)?;
    if a.nu + b.nu + c.nu != 0 {
        return Err(Error::ConstraintViolation("ν+μ+η must be 0 in Z".into()));
    }
    Ok(gamma_complex(a.alpha, a.nu)? * gamma_complex(b.alpha, b.nu)? * gamma_complex(c.alpha, c.nu)?)
}

/// `B_ω(α,β,γ)`, all signs zero.
pub fn beta_complex_reduced(alpha: ComplexValue, beta: ComplexValue, gamma: ComplexValue) -> Result<ComplexValue> {
    beta_complex(
        ComplexGammaArgs::new(alpha, 0),
        ComplexGammaArgs::new(beta, 0),
        ComplexGammaArgs::new(gamma, 0),
    )
}

/// `B_q(α,β,γ) = Γ_q(α) Γ_q(β) Γ_q(γ)` with `α+β+γ = 1`.
pub fn beta_padic(alpha: ComplexValue, beta: ComplexValue, gamma: ComplexValue, q: u64) -> Result<ComplexValue> {
    check_sum([alpha, beta, gamma], 1.0)?;
    Ok(gamma_q(alpha, q)? * gamma_q(beta, q)? * gamma_q(gamma, q)?)
}

/// `B_q` at integer arguments in exact arithmetic.
pub fn beta_padic_exact(alpha: i64, beta: i64, gamma: i64, q: u64) -> Result<BigRational> {
    if alpha + beta + gamma != 1 {
        return Err(Error::ConstraintViolation(format!(
            "arguments sum to {}, expected 1",
            alpha + beta + gamma
        )));
    }
    Ok(gamma_q_exact(alpha, q)? * gamma_q_exact(beta, q)? * gamma_q_exact(gamma, q)?)
}

/// `B'_∞ = Γ_∞(α;ν) Γ_∞(β;μ) Γ_∞(γ;η)` with `α+β+γ = 0`, `ν+μ+η ≡ 1`.
pub fn beta_primed(a: RealGammaArgs, b: RealGammaArgs, c: RealGammaArgs) -> Result<ComplexValue> {
    check_sum([a.alpha, b.alpha, c.alpha], 0.0)?;
    if (a.nu + b.nu + c.nu) % 2 != 1 {
        return Err(Error::ConstraintViolation("ν+μ+η must be 1 in F_2".into()));
    }
    real_product(a, b, c)
}
