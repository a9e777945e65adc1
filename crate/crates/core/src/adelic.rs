//! Regularized adelic products and the verifiers built on them.
//!
//! Every `reg ∏` is evaluated as a ratio of analytically continued
//! L-functions whose Euler factors formally reproduce the product.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analytic::gamma::gamma_pole_distance;
use crate::analytic::trig::real_pow;
use crate::analytic::{dedekind_zeta_quadratic_with, dirichlet_l_with};
use crate::arith::{factorize, primes_up_to};
use crate::characters::{
    kappa_global_with, sigma_of_global, theorem1_exponentials, theorem2_validate,
    DirichletCharacterSpec, GlobalCharacterQ, Place, QuadCharacterData, QuadCharacterKind,
};
use crate::error::{Error, Result};
use crate::local::{beta_complex_reduced, beta_real_reduced, gamma_complex, gamma_real, KappaConvention};
use crate::policy::PrecisionPolicy;
use crate::quadfield::{splitting_character, QuadField};
use crate::ComplexValue;

pub const DEFAULT_TOLERANCE: f64 = 1e-8;
const CONSTRAINT_TOL: f64 = 1e-12;
const MAX_CUTOFF: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IdentityId {
    GammaQ,
    BetaQ,
    BetaQuadratic,
    GammaQuadratic,
    AmplitudeAdelic,
    SuperstringAdelic,
    HeteroticFactorization,
    HeteroticShift,
    #[serde(rename = "relation-4-25")]
    Relation425,
    PermutationRelation,
}

impl IdentityId {
    pub const ALL: [IdentityId; 10] = [
        IdentityId::GammaQ,
        IdentityId::BetaQ,
        IdentityId::BetaQuadratic,
        IdentityId::GammaQuadratic,
        IdentityId::AmplitudeAdelic,
        IdentityId::SuperstringAdelic,
        IdentityId::HeteroticFactorization,
        IdentityId::HeteroticShift,
        IdentityId::Relation425,
        IdentityId::PermutationRelation,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            IdentityId::GammaQ => "gamma-q",
            IdentityId::BetaQ => "beta-q",
            IdentityId::BetaQuadratic => "beta-quadratic",
            IdentityId::GammaQuadratic => "gamma-quadratic",
            IdentityId::AmplitudeAdelic => "amplitude-adelic",
            IdentityId::SuperstringAdelic => "superstring-adelic",
            IdentityId::HeteroticFactorization => "heterotic-factorization",
            IdentityId::HeteroticShift => "heterotic-shift",
            IdentityId::Relation425 => "relation-4-25",
            IdentityId::PermutationRelation => "permutation-relation",
        }
    }
}

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for IdentityId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        IdentityId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown identity `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
    Diagnostic,
}

/// Outcome of one identity check at one point.
///
/// `lhs`/`rhs` are absent when the point sits on a singularity and the side
/// cannot be evaluated; such reports are always inconclusive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegProductReport {
    pub identity_id: IdentityId,
    pub inputs: BTreeMap<String, String>,
    pub lhs: Option<ComplexValue>,
    pub rhs: Option<ComplexValue>,
    pub residual: Option<f64>,
    pub tolerance: f64,
    pub pole_guard_ok: bool,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub truncated_partials: Option<Vec<(u64, ComplexValue)>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

impl RegProductReport {
    pub fn new(
        identity_id: IdentityId,
        inputs: BTreeMap<String, String>,
        lhs: ComplexValue,
        rhs: ComplexValue,
        pole_guard_ok: bool,
        tolerance: f64,
    ) -> Self {
        let residual = (lhs - rhs).norm();
        let verdict = if !pole_guard_ok {
            Verdict::Inconclusive
        } else if residual < tolerance {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        RegProductReport {
            identity_id,
            inputs,
            lhs: Some(lhs),
            rhs: Some(rhs),
            residual: Some(residual),
            tolerance,
            pole_guard_ok,
            verdict,
            truncated_partials: None,
            note: None,
        }
    }

    pub fn inconclusive(identity_id: IdentityId, inputs: BTreeMap<String, String>, tolerance: f64, note: String) -> Self {
        RegProductReport {
            identity_id,
            inputs,
            lhs: None,
            rhs: None,
            residual: None,
            tolerance,
            pole_guard_ok: false,
            verdict: Verdict::Inconclusive,
            truncated_partials: None,
            note: Some(note),
        }
    }

    /// `| |lhs|/|rhs| - 1 |`.
    pub fn modulus_defect(&self) -> Option<f64> {
        match (self.lhs, self.rhs) {
            (Some(l), Some(r)) if r.norm() > 0.0 => Some((l.norm() / r.norm() - 1.0).abs()),
            _ => None,
        }
    }

    /// Rejudges the report on `| |lhs|/|rhs| - 1 |` instead of `|lhs - rhs|`.
    pub fn judged_on_modulus(mut self) -> Self {
        if self.verdict == Verdict::Pass || self.verdict == Verdict::Fail {
            let defect = self.modulus_defect().unwrap_or(f64::INFINITY);
            self.verdict = if defect < self.tolerance { Verdict::Pass } else { Verdict::Fail };
            self.note = Some(format!("modulus defect {defect:e}"));
        }
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("reports serialize")
    }
}

/// Options shared by the verifiers.
///
/// `phase` multiplies the right-hand side of every ramified gamma identity;
/// it is 1 unless fixed by [`calibrate_phase`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub policy: PrecisionPolicy,
    pub tolerance: f64,
    pub convention: KappaConvention,
    pub phase: ComplexValue,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            policy: PrecisionPolicy::default(),
            tolerance: DEFAULT_TOLERANCE,
            convention: KappaConvention::default(),
            phase: ComplexValue::new(1.0, 0.0),
        }
    }
}

/// A constrained argument triple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityPoint {
    pub alpha: ComplexValue,
    pub beta: ComplexValue,
    pub gamma: ComplexValue,
}

impl IdentityPoint {
    /// `γ = 1 - α - β`.
    pub fn new(alpha: ComplexValue, beta: ComplexValue) -> Self {
        IdentityPoint { alpha, beta, gamma: 1.0 - alpha - beta }
    }

    /// `γ = -α - β`.
    pub fn primed(alpha: ComplexValue, beta: ComplexValue) -> Self {
        IdentityPoint { alpha, beta, gamma: -alpha - beta }
    }

    pub fn from_triple(alpha: ComplexValue, beta: ComplexValue, gamma: ComplexValue, sum: f64) -> Result<Self> {
        let p = IdentityPoint { alpha, beta, gamma };
        p.check_sum(sum)?;
        Ok(p)
    }

    pub fn args(&self) -> [ComplexValue; 3] {
        [self.alpha, self.beta, self.gamma]
    }

    pub fn check_sum(&self, sum: f64) -> Result<()> {
        let total = self.alpha + self.beta + self.gamma;
        let scale = self.args().iter().map(|a| a.norm()).sum::<f64>().max(1.0);
        if (total - sum).norm() > CONSTRAINT_TOL * scale {
            return Err(Error::ConstraintViolation(format!("α+β+γ = {total}, expected {sum}")));
        }
        Ok(())
    }
}

/// Collects pole-guard violations while an identity is evaluated.
struct Guard {
    limit: f64,
    tripped: Vec<String>,
}

impl Guard {
    fn new(policy: &PrecisionPolicy) -> Self {
        Guard { limit: policy.pole_guard, tripped: Vec::new() }
    }

    fn denominator(&mut self, what: &str, value: ComplexValue) {
        if value.norm() < self.limit {
            self.tripped.push(format!("|{what}| = {:e}", value.norm()));
        }
    }

    /// Poles of `Γ_∞(α;ν)` sit at `α ∈ -ν - 2N`.
    fn real_gamma(&mut self, alpha: ComplexValue, nu: i64) {
        let d = 2.0 * gamma_pole_distance((alpha + nu.rem_euclid(2) as f64) / 2.0);
        if d < self.limit {
            self.tripped.push(format!("Γ_∞({alpha};{nu}) within {d:e} of a pole"));
        }
    }

    /// Poles of `Γ_ω(α;ν)` sit at `α ∈ -|ν|/2 - N`.
    fn complex_gamma(&mut self, alpha: ComplexValue, nu: i64) {
        let d = gamma_pole_distance(alpha + nu.unsigned_abs() as f64 / 2.0);
        if d < self.limit {
            self.tripped.push(format!("Γ_ω({alpha};{nu}) within {d:e} of a pole"));
        }
    }

    fn ok(&self) -> bool {
        self.tripped.is_empty()
    }

    fn note(&self) -> Option<String> {
        (!self.ok()).then(|| self.tripped.join("; "))
    }
}

fn inputs(pairs: &[(&str, String)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn finish(
    id: IdentityId,
    inputs: BTreeMap<String, String>,
    opts: &VerifyOptions,
    guard: &Guard,
    sides: Result<(ComplexValue, ComplexValue)>,
) -> Result<RegProductReport> {
    match sides {
        Ok((lhs, rhs)) => {
            let mut report = RegProductReport::new(id, inputs, lhs, rhs, guard.ok(), opts.tolerance);
            report.note = guard.note();
            Ok(report)
        }
        Err(e) if e.is_pole_like() => Ok(RegProductReport::inconclusive(id, inputs, opts.tolerance, e.to_string())),
        Err(e) => Err(e),
    }
}

/// `L(α, θ̄) / L(1-α, θ)` with `θ` made primitive, the regularization of
/// `∏_{p ∈ F} (1 - p^{α-1} θ(p)) / (1 - p^{-α} θ̄(p))`.
pub fn reg_gamma_ratio_q(alpha: ComplexValue, theta: &GlobalCharacterQ) -> Result<ComplexValue> {
    reg_gamma_ratio_q_with(alpha, theta, &PrecisionPolicy::default())
}

pub fn reg_gamma_ratio_q_with(alpha: ComplexValue, theta: &GlobalCharacterQ, policy: &PrecisionPolicy) -> Result<ComplexValue> {
    let mut guard = Guard::new(policy);
    let value = gamma_ratio_guarded(alpha, &theta.chi, policy, &mut guard)?;
    match guard.tripped.first() {
        Some(what) => Err(Error::PoleGuard {
            what: what.clone(),
            magnitude: policy.pole_guard,
        }),
        None => Ok(value),
    }
}

fn gamma_ratio_guarded(
    alpha: ComplexValue,
    chi: &DirichletCharacterSpec,
    policy: &PrecisionPolicy,
    guard: &mut Guard,
) -> Result<ComplexValue> {
    let chi = chi.primitive();
    let num = dirichlet_l_with(alpha, &chi.conj(), policy)?;
    let den = dirichlet_l_with(1.0 - alpha, &chi, policy)?;
    guard.denominator(&format!("L(1-α, {chi})"), den);
    Ok(num / den)
}

/// Right-hand side `θ(-1) ∏ κ(θ_p) p^{-iα_p ρ_p} N^{1/2-α}` of the gamma identity.
fn gamma_rhs_q(alpha: ComplexValue, g: &GlobalCharacterQ, opts: &VerifyOptions) -> Result<ComplexValue> {
    let g = g.primitive();
    let n = g.chi.modulus();
    if n == 1 {
        return Ok(ComplexValue::new(1.0, 0.0));
    }
    let exponentials = theorem1_exponentials(&g, n)?;
    let sign = if g.nu == 1 { -1.0 } else { 1.0 };
    let kappa = kappa_global_with(&g, &exponentials, opts.convention);
    Ok(sign * kappa * real_pow(n as f64, 0.5 - alpha) * opts.phase)
}

fn gamma_lhs_q(alpha: ComplexValue, g: &GlobalCharacterQ, opts: &VerifyOptions, guard: &mut Guard) -> Result<ComplexValue> {
    guard.real_gamma(alpha, g.nu as i64);
    let ratio = gamma_ratio_guarded(alpha, &g.chi, &opts.policy, guard)?;
    Ok(gamma_real(alpha, g.nu as i64)? * ratio)
}

/// `Γ_∞(α;ν) · reg∏_{p∈F} Γ_p(α) = θ(-1) ∏_{p∈R} κ(θ_p) p^{-iα_p ρ_p} · N^{1/2-α}`.
pub fn verify_gamma_adelic_q(alpha: ComplexValue, g: &GlobalCharacterQ) -> Result<RegProductReport> {
    verify_gamma_adelic_q_with(alpha, g, &VerifyOptions::default())
}

pub fn verify_gamma_adelic_q_with(alpha: ComplexValue, g: &GlobalCharacterQ, opts: &VerifyOptions) -> Result<RegProductReport> {
    let g = GlobalCharacterQ::new(g.chi.clone(), g.nu)?;
    let ins = inputs(&[("alpha", alpha.to_string()), ("character", g.chi.to_string()), ("nu", g.nu.to_string())]);
    let mut guard = Guard::new(&opts.policy);
    let sides = gamma_lhs_q(alpha, &g, opts, &mut guard).and_then(|l| Ok((l, gamma_rhs_q(alpha, &g, opts)?)));
    finish(IdentityId::GammaQ, ins, opts, &guard, sides)
}

/// Unit-modulus phase `lhs/rhs` of the gamma identity for `g` at `α = 1/2`.
pub fn calibrate_phase(g: &GlobalCharacterQ, opts: &VerifyOptions) -> Result<ComplexValue> {
    let bare = VerifyOptions { phase: ComplexValue::new(1.0, 0.0), ..*opts };
    let report = verify_gamma_adelic_q_with(ComplexValue::new(0.5, 0.0), g, &bare)?;
    match (report.lhs, report.rhs) {
        (Some(l), Some(r)) if report.pole_guard_ok => {
            let z = l / r;
            Ok(z / z.norm())
        }
        _ => Err(Error::PoleGuard {
            what: format!("calibration point for {}", g.chi),
            magnitude: opts.policy.pole_guard,
        }),
    }
}

fn ramified_primes(chi: &DirichletCharacterSpec) -> BTreeSet<u64> {
    factorize(chi.primitive().modulus()).into_iter().map(|(p, _)| p).collect()
}

/// Unramified local gamma factor `(1 - p^{x-1} c(p)) / (1 - p^{-x} c̄(p))`.
fn euler_gamma_factor(x: ComplexValue, c: ComplexValue, p: u64) -> ComplexValue {
    let pf = p as f64;
    (1.0 - real_pow(pf, x - 1.0) * c) / (1.0 - real_pow(pf, -x) * c.conj())
}

/// `B_∞ · reg∏_{p ∈ F∩F'∩F''} B_p · ∏_{p ∈ R∪R'∪R''} B_p = ∏ θ_c(-1) κ_c N_c^{1/2-x_c}`
/// with characters `θ, π, σ = conj(θπ)` at `α, β, γ`. At a prime ramified for
/// only some of the three characters the local beta keeps the unramified
/// `Γ_p` of the others; the ramified gammas are the `κ` factors on the right.
pub fn verify_beta_adelic_q(point: &IdentityPoint, theta: &GlobalCharacterQ, pi: &GlobalCharacterQ) -> Result<RegProductReport> {
    verify_beta_adelic_q_with(point, theta, pi, &VerifyOptions::default())
}

pub fn verify_beta_adelic_q_with(
    point: &IdentityPoint,
    theta: &GlobalCharacterQ,
    pi: &GlobalCharacterQ,
    opts: &VerifyOptions,
) -> Result<RegProductReport> {
    point.check_sum(1.0)?;
    let theta = GlobalCharacterQ::new(theta.chi.clone(), theta.nu)?.primitive();
    let pi = GlobalCharacterQ::new(pi.chi.clone(), pi.nu)?.primitive();
    let sigma = sigma_of_global(&theta, &pi);
    let chars = [theta, pi, sigma];
    let ins = inputs(&[
        ("alpha", point.alpha.to_string()),
        ("beta", point.beta.to_string()),
        ("gamma", point.gamma.to_string()),
        ("theta", chars[0].chi.to_string()),
        ("pi", chars[1].chi.to_string()),
        ("sigma", chars[2].chi.to_string()),
    ]);
    let union: BTreeSet<u64> = chars.iter().flat_map(|c| ramified_primes(&c.chi)).collect();
    let mut guard = Guard::new(&opts.policy);
    let sides = (|| {
        // B_∞ · reg∏_{F∩F'∩F''} B_p, then the unramified Γ_p of each
        // character at primes where only the others ramify
        let mut restricted = ComplexValue::new(1.0, 0.0);
        let mut mixed = ComplexValue::new(1.0, 0.0);
        let mut rhs = ComplexValue::new(1.0, 0.0);
        for (g, x) in chars.iter().zip(point.args()) {
            restricted *= gamma_lhs_q(x, g, opts, &mut guard)?;
            rhs *= gamma_rhs_q(x, g, opts)?;
            let own = ramified_primes(&g.chi);
            for &p in union.difference(&own) {
                let factor = euler_gamma_factor(x, g.chi.eval(p as i64), p);
                restricted /= factor;
                mixed *= factor;
            }
        }
        Ok((restricted * mixed, rhs))
    })();
    finish(IdentityId::BetaQ, ins, opts, &guard, sides)
}

/// `∏_{x∈{α,β,γ}} ζ_K(x)/ζ_K(1-x) · B = √|D|` with `B = B_ω` for `d < 0` and
/// `B_∞²` for `d > 0`.
pub fn verify_beta_quadratic_principal(field: &QuadField, point: &IdentityPoint) -> Result<RegProductReport> {
    verify_beta_quadratic_principal_with(field, point, &VerifyOptions::default())
}

pub fn verify_beta_quadratic_principal_with(
    field: &QuadField,
    point: &IdentityPoint,
    opts: &VerifyOptions,
) -> Result<RegProductReport> {
    point.check_sum(1.0)?;
    let ins = inputs(&[
        ("d", field.d.to_string()),
        ("alpha", point.alpha.to_string()),
        ("beta", point.beta.to_string()),
        ("gamma", point.gamma.to_string()),
    ]);
    let mut guard = Guard::new(&opts.policy);
    let sides = (|| {
        let mut z = ComplexValue::new(1.0, 0.0);
        for x in point.args() {
            if field.d < 0 {
                guard.complex_gamma(x, 0);
            } else {
                guard.real_gamma(x, 0);
            }
            let num = dedekind_zeta_quadratic_with(x, field.disc, &opts.policy)?;
            let den = dedekind_zeta_quadratic_with(1.0 - x, field.disc, &opts.policy)?;
            guard.denominator("ζ_K(1-x)", den);
            z *= num / den;
        }
        let [a, b, c] = point.args();
        let beta = if field.d < 0 {
            beta_complex_reduced(a, b, c)?
        } else {
            beta_real_reduced(a, b, c)?.powi(2)
        };
        Ok((z * beta, ComplexValue::new((field.disc.unsigned_abs() as f64).sqrt(), 0.0)))
    })();
    finish(IdentityId::BetaQuadratic, ins, opts, &guard, sides)
}

/// Gamma identity over a quadratic field for the principal and norm-induced
/// characters `θ = χ∘N`.
///
/// `L_K(s, χ∘N) = L(s, χ') L(s, (χχ_D)')`, so the identity is the product of
/// two identities over `Q`; for `d < 0` the archimedean factor
/// `Γ_ω(α;0) = i Γ_∞(α;0) Γ_∞(α;1)` contributes the extra constant `i`.
/// Explicit tables have no L-function and yield truncated partial products.
pub fn verify_gamma_adelic_quadratic(field: &QuadField, alpha: ComplexValue, qc: &QuadCharacterData) -> Result<RegProductReport> {
    verify_gamma_adelic_quadratic_with(field, alpha, qc, &VerifyOptions::default())
}

pub fn verify_gamma_adelic_quadratic_with(
    field: &QuadField,
    alpha: ComplexValue,
    qc: &QuadCharacterData,
    opts: &VerifyOptions,
) -> Result<RegProductReport> {
    if qc.field.d != field.d {
        return Err(Error::InvalidCharacter(format!(
            "character lives on d = {}, field has d = {}",
            qc.field.d, field.d
        )));
    }
    let chi = match &qc.kind {
        QuadCharacterKind::Principal => DirichletCharacterSpec::principal(1),
        QuadCharacterKind::NormInduced(chi) => {
            theorem2_validate(qc, 100)?;
            chi.clone()
        }
        QuadCharacterKind::Explicit(_) => return explicit_diagnostic(field, alpha, qc, opts),
    };
    let ins = inputs(&[("d", field.d.to_string()), ("alpha", alpha.to_string()), ("character", chi.to_string())]);
    let kronecker = DirichletCharacterSpec::kronecker(field.disc)?;
    let first = GlobalCharacterQ::from_character(chi.primitive());
    let second = GlobalCharacterQ::from_character(chi.mul(&kronecker).primitive());
    let mut guard = Guard::new(&opts.policy);
    let sides = (|| {
        let ratio = gamma_ratio_guarded(alpha, &first.chi, &opts.policy, &mut guard)?
            * gamma_ratio_guarded(alpha, &second.chi, &opts.policy, &mut guard)?;
        let (arch, constant) = if field.d < 0 {
            guard.complex_gamma(alpha, 0);
            (gamma_complex(alpha, 0)?, ComplexValue::i())
        } else {
            let delta = chi.parity() as i64;
            guard.real_gamma(alpha, delta);
            (gamma_real(alpha, delta)?.powi(2), ComplexValue::new(1.0, 0.0))
        };
        let rhs = constant * gamma_rhs_q(alpha, &first, opts)? * gamma_rhs_q(alpha, &second, opts)?;
        Ok((arch * ratio, rhs))
    })();
    finish(IdentityId::GammaQuadratic, ins, opts, &guard, sides)
}

fn explicit_diagnostic(
    field: &QuadField,
    alpha: ComplexValue,
    qc: &QuadCharacterData,
    opts: &VerifyOptions,
) -> Result<RegProductReport> {
    let QuadCharacterKind::Explicit(table) = &qc.kind else {
        unreachable!("called for explicit tables only")
    };
    let value = |place: Place| table.divisor_values.get(&place).copied().unwrap_or(ComplexValue::new(1.0, 0.0));
    let partials = truncated_product(
        |p| match splitting_character(field, p) {
            1 => {
                euler_gamma_factor(alpha, value(Place::Prime(p)), p)
                    * euler_gamma_factor(alpha, value(Place::PrimeConj(p)), p)
            }
            -1 => euler_gamma_factor(alpha, value(Place::Prime(p)), p * p),
            _ => euler_gamma_factor(alpha, value(Place::Prime(p)), p),
        },
        10_000,
    )?;
    let ins = inputs(&[("d", field.d.to_string()), ("alpha", alpha.to_string()), ("character", "explicit".into())]);
    let mut report = RegProductReport::inconclusive(
        IdentityId::GammaQuadratic,
        ins,
        opts.tolerance,
        Error::UnsupportedCharacterKind("explicit table: no L-function, partial products only".into()).to_string(),
    );
    report.verdict = Verdict::Diagnostic;
    report.truncated_partials = Some(partials);
    Ok(report)
}

/// Running products of `factor(p)` over primes `p <= cutoff`, recorded at
/// `10, 100, ...` and at `cutoff`.
pub fn truncated_product(factor: impl Fn(u64) -> ComplexValue, cutoff: u64) -> Result<Vec<(u64, ComplexValue)>> {
    if cutoff > MAX_CUTOFF {
        return Err(Error::ConstraintViolation(format!("cutoff {cutoff} exceeds {MAX_CUTOFF}")));
    }
    let mut partials = Vec::new();
    let mut running = ComplexValue::new(1.0, 0.0);
    let mut mark = 10u64;
    for p in primes_up_to(cutoff) {
        while p > mark && mark < cutoff {
            partials.push((mark, running));
            mark *= 10;
        }
        running *= factor(p);
    }
    while mark < cutoff {
        partials.push((mark, running));
        mark *= 10;
    }
    partials.push((cutoff, running));
    Ok(partials)
}

/// Seeded source of test points.
pub struct PointSampler {
    rng: ChaCha8Rng,
}

impl PointSampler {
    pub fn new(seed: u64) -> Self {
        PointSampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.random_range(lo..hi)
    }

    pub fn complex(&mut self, re: (f64, f64), im: (f64, f64)) -> ComplexValue {
        ComplexValue::new(self.uniform(re.0, re.1), self.uniform(im.0, im.1))
    }

    /// `α + β + γ = 1` with all three arguments inside the box.
    pub fn beta_point(&mut self, re: (f64, f64), im: (f64, f64)) -> IdentityPoint {
        loop {
            let p = IdentityPoint::new(self.complex(re, im), self.complex(re, im));
            let g = p.gamma;
            if (re.0..=re.1).contains(&g.re) && (im.0..=im.1).contains(&g.im) {
                return p;
            }
        }
    }
}

/// Draws reports until `n` conclusive ones are collected, skipping points the
/// pole guard rejects; gives up after `20 n` draws.
pub fn conclusive_reports(
    n: usize,
    mut draw: impl FnMut() -> Result<RegProductReport>,
) -> Result<Vec<RegProductReport>> {
    let mut out = Vec::with_capacity(n);
    for _ in 0..20 * n.max(1) {
        if out.len() == n {
            break;
        }
        let report = draw()?;
        if report.verdict != Verdict::Inconclusive {
            out.push(report);
        }
    }
    if out.len() < n {
        return Err(Error::PoleGuard {
            what: format!("only {} of {n} sampled points were conclusive", out.len()),
            magnitude: 0.0,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::riemann_zeta;
    use crate::characters::RootOfUnity;
    use crate::quadfield::make_field;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> ComplexValue {
        ComplexValue::new(re, im)
    }

    fn chi4() -> GlobalCharacterQ {
        GlobalCharacterQ::from_character(DirichletCharacterSpec::kronecker(-4).unwrap())
    }

    fn quartic5() -> GlobalCharacterQ {
        GlobalCharacterQ::from_character(DirichletCharacterSpec::build(5, vec![RootOfUnity::new(1, 4).unwrap()]).unwrap())
    }

    #[test]
    fn ratio_examples() {
        let p = GlobalCharacterQ::principal();
        let r = reg_gamma_ratio_q(c(2.0, 0.0), &p).unwrap();
        // ζ(2)/ζ(-1) = (π²/6)/(-1/12)
        assert!((r - c(-2.0 * PI * PI, 0.0)).norm() < 1e-10);
        assert!((reg_gamma_ratio_q(c(0.5, 0.0), &p).unwrap() - 1.0).norm() < 1e-13);
        assert!((reg_gamma_ratio_q(c(0.5, 0.0), &chi4()).unwrap() - 1.0).norm() < 1e-13);
        // α = 1 puts ζ(0) in the denominator but ζ(1) in the numerator
        assert!(reg_gamma_ratio_q(c(1.0, 0.0), &p).is_err());
    }

    #[test]
    fn gamma_q_principal() {
        let p = GlobalCharacterQ::principal();
        let r = verify_gamma_adelic_q(c(2.0, 0.0), &p).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert!((r.lhs.unwrap() - 1.0).norm() < 1e-12);
        assert_eq!(r.rhs, Some(c(1.0, 0.0)));
        let r = verify_gamma_adelic_q(c(0.3, 2.0), &p).unwrap();
        assert!(r.residual.unwrap() < 1e-8);
    }

    #[test]
    fn gamma_q_ramified_exact_in_idelic_convention() {
        let opts = VerifyOptions::default();
        for g in [chi4(), quartic5()] {
            assert!((calibrate_phase(&g, &opts).unwrap() - 1.0).norm() < 1e-10);
            for &a in &[c(0.3, 2.0), c(0.6, -4.0), c(1.5, 0.5)] {
                let r = verify_gamma_adelic_q_with(a, &g, &opts).unwrap();
                assert_eq!(r.verdict, Verdict::Pass, "{:?}", r);
            }
        }
    }

    #[test]
    fn dirichlet_convention_needs_gauss_sum_phase() {
        let opts = VerifyOptions { convention: KappaConvention::Dirichlet, ..Default::default() };
        // real characters agree in both conventions
        assert!((calibrate_phase(&chi4(), &opts).unwrap() - 1.0).norm() < 1e-10);
        // complex ones are off by N χ(-1) / τ(χ)²
        let g = quartic5();
        let tau: ComplexValue = (1..5)
            .map(|u| g.chi.eval(u) * crate::analytic::trig::unit_turn(u as f64 / 5.0))
            .sum();
        let expected = 5.0 * g.chi.eval(-1) / (tau * tau);
        assert!((calibrate_phase(&g, &opts).unwrap() - expected).norm() < 1e-10);
        let phased = VerifyOptions { phase: expected, ..opts };
        let r = verify_gamma_adelic_q_with(c(0.4, 3.0), &g, &phased).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
    }

    #[test]
    fn beta_q_principal_and_consistency() {
        let p = GlobalCharacterQ::principal();
        let mut sampler = PointSampler::new(7);
        for _ in 0..5 {
            let pt = sampler.beta_point((0.2, 0.8), (-5.0, 5.0));
            let r = verify_beta_adelic_q(&pt, &p, &p).unwrap();
            assert_ne!(r.verdict, Verdict::Fail, "{r:?}");
            // beta = product of the three gamma identities
            let prod: ComplexValue = pt
                .args()
                .iter()
                .map(|&x| verify_gamma_adelic_q(x, &p).unwrap().lhs.unwrap())
                .product();
            assert!((prod - r.lhs.unwrap()).norm() < 1e-10);
        }
    }

    #[test]
    fn beta_q_with_differing_ramification() {
        let mut sampler = PointSampler::new(11);
        let theta = chi4();
        let pairs = [(theta.clone(), theta.conj()), (theta.clone(), quartic5()), (quartic5(), quartic5())];
        for (t, p) in pairs {
            let pt = sampler.beta_point((0.2, 0.8), (-5.0, 5.0));
            let r = verify_beta_adelic_q(&pt, &t, &p).unwrap();
            assert_eq!(r.verdict, Verdict::Pass, "{r:?}");
        }
    }

    #[test]
    fn beta_q_rejects_bad_point() {
        let p = GlobalCharacterQ::principal();
        let pt = IdentityPoint { alpha: c(0.3, 0.0), beta: c(0.3, 0.0), gamma: c(0.3, 0.0) };
        assert!(matches!(verify_beta_adelic_q(&pt, &p, &p), Err(Error::ConstraintViolation(_))));
    }

    #[test]
    fn guard_trips_near_zeta_zero() {
        // 1 - γ on the first zero of ζ
        let gamma = c(1.0 - 0.5, -14.134_725_141_734_693);
        let alpha = c(0.25, 7.0);
        let pt = IdentityPoint::new(alpha, 1.0 - alpha - gamma);
        let p = GlobalCharacterQ::principal();
        let r = verify_beta_adelic_q(&pt, &p, &p).unwrap();
        assert!(!r.pole_guard_ok);
        assert_eq!(r.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn gauss_field_gives_two() {
        let f = make_field(-1).unwrap();
        let third = c(1.0 / 3.0, 0.0);
        let r = verify_beta_quadratic_principal(&f, &IdentityPoint::new(third, third)).unwrap();
        assert!((r.lhs.unwrap() - 2.0).norm() < 1e-8, "{r:?}");
        assert_eq!(r.verdict, Verdict::Pass);
    }

    #[test]
    fn sqrt_disc_for_several_fields() {
        let mut sampler = PointSampler::new(3);
        for d in [-7i64, 2, 5] {
            let f = make_field(d).unwrap();
            let pt = sampler.beta_point((0.2, 0.8), (-5.0, 5.0));
            let r = verify_beta_quadratic_principal(&f, &pt).unwrap();
            assert_eq!(r.verdict, Verdict::Pass, "d={d} {r:?}");
            assert_eq!(r.rhs.unwrap(), c((f.disc.unsigned_abs() as f64).sqrt(), 0.0));
        }
    }

    #[test]
    fn gamma_quadratic_principal_and_norm_induced() {
        for d in [-1i64, -7, 3] {
            let f = make_field(d).unwrap();
            let r = verify_gamma_adelic_quadratic(&f, c(0.35, 2.5), &QuadCharacterData::principal(f.clone())).unwrap();
            assert_eq!(r.verdict, Verdict::Pass, "{r:?}");
            let disc = f.disc.unsigned_abs() as f64;
            assert!((r.rhs.unwrap() - real_pow(disc, c(0.15, -2.5))).norm() < 1e-12);
        }
        let f = make_field(-7).unwrap();
        let qc = QuadCharacterData::norm_induced(f.clone(), DirichletCharacterSpec::kronecker(-4).unwrap());
        let r = verify_gamma_adelic_quadratic(&f, c(0.45, -3.0), &qc).unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "{r:?}");
        let f = make_field(-2).unwrap();
        let qc = QuadCharacterData::norm_induced(f.clone(), quartic5().chi);
        let r = verify_gamma_adelic_quadratic(&f, c(0.6, 1.0), &qc).unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "{r:?}");
    }

    #[test]
    fn explicit_tables_are_diagnostic() {
        let f = make_field(-1).unwrap();
        let qc = QuadCharacterData {
            kind: QuadCharacterKind::Explicit(Default::default()),
            ..QuadCharacterData::principal(f.clone())
        };
        let r = verify_gamma_adelic_quadratic(&f, c(3.0, 0.0), &qc).unwrap();
        assert_eq!(r.verdict, Verdict::Diagnostic);
        let cutoffs: Vec<u64> = r.truncated_partials.unwrap().iter().map(|x| x.0).collect();
        assert_eq!(cutoffs, vec![10, 100, 1000, 10_000]);
        assert!(r.lhs.is_none());
    }

    #[test]
    fn truncated_product_behaviour() {
        let ones = truncated_product(|_| c(1.0, 0.0), 1000).unwrap();
        assert_eq!(ones.iter().map(|x| x.0).collect::<Vec<_>>(), vec![10, 100, 1000]);
        assert!(ones.iter().all(|x| x.1 == c(1.0, 0.0)));
        let s = c(3.0, 0.0);
        let euler = truncated_product(|p| (1.0 - real_pow(p as f64, -s)).inv(), 100_000).unwrap();
        assert!((euler.last().unwrap().1 - riemann_zeta(s).unwrap()).norm() < 1e-5);
        assert!(truncated_product(|_| c(1.0, 0.0), 2_000_000).is_err());
    }

    #[test]
    fn report_json_shape() {
        let r = verify_gamma_adelic_q(c(2.0, 0.0), &GlobalCharacterQ::principal()).unwrap();
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["identity_id"], "gamma-q");
        assert_eq!(v["verdict"], "pass");
        assert!(v["lhs"].as_array().unwrap().len() == 2);
        assert_eq!("relation-4-25".parse::<IdentityId>().unwrap(), IdentityId::Relation425);
        let back: RegProductReport = serde_json::from_value(v).unwrap();
        assert_eq!(back.verdict, r.verdict);
        assert!((back.lhs.unwrap() - r.lhs.unwrap()).norm() < 1e-15);
    }

    #[test]
    fn sampler_is_deterministic() {
        let a: Vec<_> = (0..3).map({ let mut s = PointSampler::new(5); move |_| s.beta_point((0.2, 0.8), (-5.0, 5.0)) }).collect();
        let b: Vec<_> = (0..3).map({ let mut s = PointSampler::new(5); move |_| s.beta_point((0.2, 0.8), (-5.0, 5.0)) }).collect();
        assert_eq!(a, b);
        for p in a {
            p.check_sum(1.0).unwrap();
        }
    }
}
