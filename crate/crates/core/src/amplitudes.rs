//! 4-particle string amplitudes as local beta functions: Veneziano and
//! Virasoro with their p-adic and ramified variants, the RNS superstring and
//! the heterotic amplitudes, together with the relations between them.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::adelic::{
    verify_beta_quadratic_principal_with, verify_gamma_adelic_q_with, IdentityId, IdentityPoint,
    RegProductReport, VerifyOptions,
};
use crate::characters::GlobalCharacterQ;
use crate::error::{Error, Result};
use crate::local::{
    beta_complex, beta_padic, beta_padic_exact, beta_primed, beta_real, gamma_real, ComplexGammaArgs,
    PAdicPlace, RealGammaArgs,
};
use crate::quadfield::QuadField;
use crate::ComplexValue;

/// Distance in argument space below which an amplitude reports a pole.
pub const POLE_TOLERANCE: f64 = 1e-9;
/// Tolerance of the closed-form relations between amplitudes.
pub const RELATION_TOLERANCE: f64 = 1e-10;
const CONSTRAINT_TOL: f64 = 1e-12;
const RESIDUE_STEP: f64 = 1e-4;

const CHANNELS: [&str; 3] = ["s", "t", "u"];

/// A physical pole of an amplitude.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoleReport {
    pub channel: String,
    /// Beta-function argument that hits the pole.
    pub argument: f64,
    /// Value of the channel variable at the pole.
    pub location: f64,
    /// `lim (c - c₀) A` in the channel variable `c`, estimated by a symmetric
    /// difference; absent when the neighbouring points are singular too.
    pub residue: Option<ComplexValue>,
}

impl fmt::Display for PoleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-channel pole at {} = {}", self.channel, self.channel, self.location)?;
        if let Some(r) = self.residue {
            write!(f, " (residue ≈ {r})")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AmplitudeKind {
    Veneziano,
    Virasoro,
}

impl AmplitudeKind {
    /// Right-hand side of `3α + α'Σm² = ...`.
    pub fn trajectory_constant(self) -> f64 {
        match self {
            AmplitudeKind::Veneziano => -1.0,
            AmplitudeKind::Virasoro => -2.0,
        }
    }
}

/// Linear Regge trajectory `α(s) = α + α's` and the mass sum of the process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReggeTrajectory {
    pub intercept: f64,
    pub slope: f64,
    pub mass_sq_sum: f64,
}

impl ReggeTrajectory {
    pub fn new(intercept: f64, slope: f64, mass_sq_sum: f64) -> Result<Self> {
        if !(slope > 0.0 && slope.is_finite()) {
            return Err(Error::ConstraintViolation(format!("slope α' = {slope} must be positive")));
        }
        Ok(ReggeTrajectory { intercept, slope, mass_sq_sum })
    }

    /// Open-string tachyons: `α = 1`, `α' = 1/2`, `Σm² = -8`.
    pub fn tachyon_veneziano() -> Self {
        ReggeTrajectory { intercept: 1.0, slope: 0.5, mass_sq_sum: -8.0 }
    }

    /// Closed-string tachyons: `α = 2`, `α' = 1/4`, `Σm² = -32`.
    pub fn tachyon_virasoro() -> Self {
        ReggeTrajectory { intercept: 2.0, slope: 0.25, mass_sq_sum: -32.0 }
    }

    pub fn validate(&self, kind: AmplitudeKind) -> Result<()> {
        let lhs = 3.0 * self.intercept + self.slope * self.mass_sq_sum;
        let expected = kind.trajectory_constant();
        if (lhs - expected).abs() > CONSTRAINT_TOL * (1.0 + self.mass_sq_sum.abs()) {
            return Err(Error::ConstraintViolation(format!(
                "3α + α'Σm² = {lhs}, a {kind:?} amplitude needs {expected}"
            )));
        }
        Ok(())
    }
}

/// Mandelstam variables with `s + t + u = Σm²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MandelstamPoint {
    pub s: f64,
    pub t: f64,
    pub u: f64,
}

impl MandelstamPoint {
    /// `u` is derived from the constraint.
    pub fn new(s: f64, t: f64, mass_sq_sum: f64) -> Self {
        MandelstamPoint { s, t, u: mass_sq_sum - s - t }
    }

    pub fn massless(s: f64, t: f64) -> Self {
        MandelstamPoint::new(s, t, 0.0)
    }

    pub fn vars(&self) -> [f64; 3] {
        [self.s, self.t, self.u]
    }

    fn from_vars([s, t, u]: [f64; 3]) -> Self {
        MandelstamPoint { s, t, u }
    }

    /// The point with its variables reordered as `(v[i], v[j], v[k])`.
    pub fn permuted(&self, [i, j, k]: [usize; 3]) -> Self {
        let v = self.vars();
        MandelstamPoint { s: v[i], t: v[j], u: v[k] }
    }

    pub fn check(&self, mass_sq_sum: f64) -> Result<()> {
        let total = self.s + self.t + self.u;
        let scale = 1.0 + self.s.abs() + self.t.abs() + self.u.abs();
        if (total - mass_sq_sum).abs() > CONSTRAINT_TOL * scale {
            return Err(Error::ConstraintViolation(format!("s+t+u = {total}, expected {mass_sq_sum}")));
        }
        Ok(())
    }
}

/// Charge indices `(S, T, U)` of a heterotic amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeteroticIndexSet {
    pub k: Option<u8>,
    pub indices: [i64; 3],
}

impl HeteroticIndexSet {
    /// The four basic sets `k = 1..4`.
    pub fn standard(k: u8) -> Result<Self> {
        let indices = match k {
            1 => [-8, 0, 0],
            2 => [-6, -2, 0],
            3 => [-4, -4, 0],
            4 => [-4, -2, -2],
            _ => return Err(Error::ConstraintViolation(format!("heterotic type k = {k} not in 1..=4"))),
        };
        Ok(HeteroticIndexSet { k: Some(k), indices })
    }

    /// A permuted set given explicitly.
    pub fn custom(indices: [i64; 3]) -> Result<Self> {
        if indices.iter().sum::<i64>() != -8 || indices.iter().any(|x| !matches!(x, 0 | -2 | -4 | -6 | -8)) {
            return Err(Error::ConstraintViolation(format!(
                "heterotic indices {indices:?} must lie in {{0,-2,-4,-6,-8}} and sum to -8"
            )));
        }
        Ok(HeteroticIndexSet { k: None, indices })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum LocalField {
    Real,
    Complex,
    PAdic(u64),
}

/// Product of three local gammas at `arg_i = offset_i + slope · c_i`.
#[derive(Debug, Clone, Copy)]
struct Family {
    field: LocalField,
    signs: [i64; 3],
    offsets: [f64; 3],
    slope: f64,
    mass_sq_sum: f64,
    /// Required `Σ arg_i`: 1 for beta functions, 0 for the primed one.
    arg_sum: f64,
}

impl Family {
    fn args(&self, pt: &MandelstamPoint) -> [f64; 3] {
        let v = pt.vars();
        [0, 1, 2].map(|i| self.offsets[i] + self.slope * v[i])
    }

    /// Nearest pole of the local gamma in channel `i` and its distance.
    fn nearest_pole(&self, i: usize, x: f64) -> (f64, f64) {
        let p = match self.field {
            LocalField::Real => {
                let nu = self.signs[i].rem_euclid(2) as f64;
                -nu - 2.0 * ((-x - nu) / 2.0).round().max(0.0)
            }
            LocalField::Complex => {
                let h = self.signs[i].unsigned_abs() as f64 / 2.0;
                -h - (-x - h).round().max(0.0)
            }
            LocalField::PAdic(_) => 0.0,
        };
        (p, (x - p).abs())
    }

    fn raw(&self, pt: &MandelstamPoint) -> Result<ComplexValue> {
        let [a, b, c] = self.args(pt).map(|x| ComplexValue::new(x, 0.0));
        let [n0, n1, n2] = self.signs;
        match (self.field, self.arg_sum == 0.0) {
            (LocalField::Real, false) => {
                beta_real(RealGammaArgs::new(a, n0), RealGammaArgs::new(b, n1), RealGammaArgs::new(c, n2))
            }
            (LocalField::Real, true) => {
                beta_primed(RealGammaArgs::new(a, n0), RealGammaArgs::new(b, n1), RealGammaArgs::new(c, n2))
            }
            (LocalField::Complex, _) => beta_complex(
                ComplexGammaArgs::new(a, n0),
                ComplexGammaArgs::new(b, n1),
                ComplexGammaArgs::new(c, n2),
            ),
            (LocalField::PAdic(q), _) => beta_padic(a, b, c, q),
        }
    }

    fn eval(&self, pt: &MandelstamPoint) -> Result<ComplexValue> {
        pt.check(self.mass_sq_sum)?;
        let args = self.args(pt);
        debug_assert!((args.iter().sum::<f64>() - self.arg_sum).abs() < 1e-9);
        for (i, &x) in args.iter().enumerate() {
            let (pole, dist) = self.nearest_pole(i, x);
            if dist < POLE_TOLERANCE {
                return Err(Error::AmplitudePole(self.pole_report(pt, i, pole)));
            }
        }
        self.raw(pt)
    }

    fn pole_report(&self, pt: &MandelstamPoint, i: usize, pole: f64) -> PoleReport {
        let v = pt.vars();
        let location = (pole - self.offsets[i]) / self.slope;
        // move along channel i, compensating in the next channel
        let j = (i + 1) % 3;
        let at = |h: f64| {
            let mut w = v;
            w[i] = location + h;
            w[j] = v[j] - (location + h - v[i]);
            self.raw(&MandelstamPoint::from_vars(w))
        };
        let residue = match (at(RESIDUE_STEP), at(-RESIDUE_STEP)) {
            (Ok(a), Ok(b)) if (a.norm() + b.norm()).is_finite() => Some((a - b) * (RESIDUE_STEP / 2.0)),
            _ => None,
        };
        PoleReport {
            channel: CHANNELS[i].to_string(),
            argument: pole,
            location,
            residue,
        }
    }
}

fn veneziano_family(traj: &ReggeTrajectory, field: LocalField, signs: [i64; 3]) -> Result<Family> {
    traj.validate(AmplitudeKind::Veneziano)?;
    Ok(Family {
        field,
        signs,
        offsets: [-traj.intercept; 3],
        slope: -traj.slope,
        mass_sq_sum: traj.mass_sq_sum,
        arg_sum: 1.0,
    })
}

fn virasoro_family(traj: &ReggeTrajectory, field: LocalField, signs: [i64; 3]) -> Result<Family> {
    traj.validate(AmplitudeKind::Virasoro)?;
    Ok(Family {
        field,
        signs,
        offsets: [-traj.intercept / 2.0; 3],
        slope: -traj.slope / 2.0,
        mass_sq_sum: traj.mass_sq_sum,
        arg_sum: 1.0,
    })
}

fn padic(q: u64) -> Result<LocalField> {
    PAdicPlace::from_module(q)?;
    Ok(LocalField::PAdic(q))
}

/// `V = B_∞(-α-α's, -α-α't, -α-α'u)`.
pub fn veneziano(pt: &MandelstamPoint, traj: &ReggeTrajectory) -> Result<ComplexValue> {
    veneziano_family(traj, LocalField::Real, [0; 3])?.eval(pt)
}

/// `V_p = B_q(-α-α's, -α-α't, -α-α'u)`.
pub fn veneziano_p(pt: &MandelstamPoint, traj: &ReggeTrajectory, q: u64) -> Result<ComplexValue> {
    veneziano_family(traj, padic(q)?, [0; 3])?.eval(pt)
}

/// `W = B_ω(-α/2-α's/2, ...)`.
pub fn virasoro(pt: &MandelstamPoint, traj: &ReggeTrajectory) -> Result<ComplexValue> {
    virasoro_family(traj, LocalField::Complex, [0; 3])?.eval(pt)
}

pub fn virasoro_p(pt: &MandelstamPoint, traj: &ReggeTrajectory, q: u64) -> Result<ComplexValue> {
    virasoro_family(traj, padic(q)?, [0; 3])?.eval(pt)
}

/// `V_{νμη} = B_∞(-α-α's,ν; -α-α't,μ; -α-α'u,η)` with `ν+μ+η = 0` in `F_2`.
pub fn veneziano_ramified(pt: &MandelstamPoint, traj: &ReggeTrajectory, signs: [i64; 3]) -> Result<ComplexValue> {
    if signs.iter().sum::<i64>().rem_euclid(2) != 0 {
        return Err(Error::ConstraintViolation(format!("ν+μ+η = {signs:?} must vanish in F_2")));
    }
    veneziano_family(traj, LocalField::Real, signs)?.eval(pt)
}

/// `W_{νμη} = B_ω(-α/2-α's/2,ν; ...)` with `ν+μ+η = 0` in `Z`.
pub fn virasoro_ramified(pt: &MandelstamPoint, traj: &ReggeTrajectory, signs: [i64; 3]) -> Result<ComplexValue> {
    if signs.iter().sum::<i64>() != 0 {
        return Err(Error::ConstraintViolation(format!("ν+μ+η = {signs:?} must vanish in Z")));
    }
    virasoro_family(traj, LocalField::Complex, signs)?.eval(pt)
}

fn superstring_family() -> Family {
    Family {
        field: LocalField::Real,
        signs: [1; 3],
        offsets: [0.0; 3],
        slope: -0.5,
        mass_sq_sum: 0.0,
        arg_sum: 0.0,
    }
}

/// `A_∞ = Γ_∞(-s/2;1) Γ_∞(-t/2;1) Γ_∞(-u/2;1)`, `s+t+u = 0`.
pub fn superstring(pt: &MandelstamPoint) -> Result<ComplexValue> {
    superstring_family().eval(pt)
}

fn heterotic_family(idx: &HeteroticIndexSet) -> Family {
    Family {
        field: LocalField::Real,
        signs: [0; 3],
        offsets: idx.indices.map(|x| -1.0 - x as f64 / 2.0),
        slope: -0.125,
        mass_sq_sum: 0.0,
        arg_sum: 1.0,
    }
}

/// `A^{(k)}_∞ = B_∞(-1-s/8-S/2, -1-t/8-T/2, -1-u/8-U/2)`, `s+t+u = 0`.
pub fn heterotic(pt: &MandelstamPoint, idx: &HeteroticIndexSet) -> Result<ComplexValue> {
    heterotic_family(idx).eval(pt)
}

/// `V_p` at integer beta arguments, exactly.
pub fn veneziano_p_exact(
    pt: [BigRational; 3],
    intercept: &BigRational,
    slope: &BigRational,
    q: u64,
) -> Result<BigRational> {
    let args = pt.map(|c| -intercept - slope * c);
    exact_beta(args, q)
}

/// `W_p` at integer beta arguments, exactly.
pub fn virasoro_p_exact(
    pt: [BigRational; 3],
    intercept: &BigRational,
    slope: &BigRational,
    q: u64,
) -> Result<BigRational> {
    let two = BigRational::from_integer(BigInt::from(2));
    let args = pt.map(|c| -(intercept + slope * c) / &two);
    exact_beta(args, q)
}

fn exact_beta(args: [BigRational; 3], q: u64) -> Result<BigRational> {
    let sum = args.iter().fold(BigRational::from_integer(BigInt::from(0)), |acc, a| acc + a);
    if !sum.is_one() {
        return Err(Error::ConstraintViolation(format!("beta arguments sum to {sum}, expected 1")));
    }
    let mut ints = [0i64; 3];
    for (slot, a) in ints.iter_mut().zip(&args) {
        if !a.is_integer() {
            return Err(Error::ConstraintViolation(format!("exact mode needs integer arguments, got {a}")));
        }
        *slot = i64::try_from(a.to_integer())
            .map_err(|_| Error::ConstraintViolation(format!("argument {a} out of range")))?;
    }
    beta_padic_exact(ints[0], ints[1], ints[2], q)
}

/// The factorized forms of the heterotic amplitudes: a rational prefactor
/// times `Γ_∞(-s/8;ν)Γ_∞(-t/8;μ)Γ_∞(-u/8;η)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeteroticFactorization {
    pub prefactor: ComplexValue,
    pub signs: [i64; 3],
}

/// Multiplier `m` and sign `ν` with `Γ_∞(-1-s/8-S/2; 0) = m · Γ_∞(-s/8; ν)`.
///
/// Follows from `Γ_∞(α+1; ν+1) = α/(2πi) Γ_∞(α; ν)`. For `S = 0` the
/// multiplier is `-16πi/(8+s)`; `printed = true` returns `+16πi/(8+s)` as it
/// appears in print.
pub fn heterotic_shift(index: i64, s: f64, printed: bool) -> Result<(ComplexValue, i64)> {
    let i = ComplexValue::i();
    let sixteen_pi = 16.0 * PI;
    Ok(match index {
        -8 => (-i * (16.0 - s) * (8.0 - s) * s / sixteen_pi.powi(3), 1),
        -6 => (ComplexValue::new((8.0 - s) * s / sixteen_pi.powi(2), 0.0), 0),
        -4 => (i * s / sixteen_pi, 1),
        -2 => (ComplexValue::new(1.0, 0.0), 0),
        0 => {
            let sign = if printed { 1.0 } else { -1.0 };
            (sign * sixteen_pi * i / (8.0 + s), 1)
        }
        other => {
            return Err(Error::ConstraintViolation(format!("heterotic index {other} not in {{0,-2,-4,-6,-8}}")))
        }
    })
}

/// Factorization assembled from the three shift relations.
pub fn heterotic_factorized(pt: &MandelstamPoint, idx: &HeteroticIndexSet) -> Result<HeteroticFactorization> {
    let mut prefactor = ComplexValue::new(1.0, 0.0);
    let mut signs = [0i64; 3];
    for (i, (&index, c)) in idx.indices.iter().zip(pt.vars()).enumerate() {
        let (m, nu) = heterotic_shift(index, c, false)?;
        prefactor *= m;
        signs[i] = nu;
    }
    Ok(HeteroticFactorization { prefactor, signs })
}

/// Prefactor of the closed forms for the four basic types; `printed = true`
/// gives the overall sign as printed, which differs by `-1` for `k = 1, 2, 3`.
pub fn heterotic_prefactor(k: u8, pt: &MandelstamPoint, printed: bool) -> Result<ComplexValue> {
    let i = ComplexValue::i();
    let (s, t, u) = (pt.s, pt.t, pt.u);
    let c = 16.0 * PI;
    let correct = match k {
        1 => i / c * (16.0 - s) * (8.0 - s) * s / ((8.0 + t) * (8.0 + u)),
        2 => -i / c * (8.0 - s) * s / (8.0 + u),
        3 => i * s * t / (c * (8.0 + u)),
        4 => i * s / c,
        _ => return Err(Error::ConstraintViolation(format!("heterotic type k = {k} not in 1..=4"))),
    };
    Ok(if printed && k != 4 { -correct } else { correct })
}

/// Sign triple `(ν, μ, η)` of the closed forms.
pub fn heterotic_signs(k: u8) -> Result<[i64; 3]> {
    match k {
        1 | 3 => Ok([1, 1, 1]),
        2 => Ok([0, 0, 1]),
        4 => Ok([1, 0, 0]),
        _ => Err(Error::ConstraintViolation(format!("heterotic type k = {k} not in 1..=4"))),
    }
}

fn inputs(pairs: &[(&str, String)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn relation_report(
    id: IdentityId,
    ins: BTreeMap<String, String>,
    sides: Result<(ComplexValue, ComplexValue)>,
    tolerance: f64,
) -> Result<RegProductReport> {
    match sides {
        Ok((l, r)) => Ok(RegProductReport::new(id, ins, l, r, true, tolerance)),
        Err(e) if e.is_pole_like() => Ok(RegProductReport::inconclusive(id, ins, tolerance, e.to_string())),
        Err(e) => Err(e),
    }
}

fn point_inputs(pt: &MandelstamPoint) -> Vec<(&'static str, String)> {
    vec![("s", pt.s.to_string()), ("t", pt.t.to_string()), ("u", pt.u.to_string())]
}

/// `A^{(k)}(s,t,u)` against its closed form with the corrected prefactor.
pub fn heterotic_factorization_check(pt: &MandelstamPoint, k: u8) -> Result<RegProductReport> {
    let idx = HeteroticIndexSet::standard(k)?;
    let mut ins = point_inputs(pt);
    ins.push(("k", k.to_string()));
    let sides = (|| {
        let lhs = heterotic(pt, &idx)?;
        let signs = heterotic_signs(k)?;
        let mut rhs = heterotic_prefactor(k, pt, false)?;
        for (c, nu) in pt.vars().into_iter().zip(signs) {
            rhs *= gamma_real(ComplexValue::new(-c / 8.0, 0.0), nu)?;
        }
        Ok((lhs, rhs))
    })();
    let printed = heterotic_prefactor(k, pt, true)?;
    let correct = heterotic_prefactor(k, pt, false)?;
    Ok(relation_report(IdentityId::HeteroticFactorization, inputs(&ins), sides, RELATION_TOLERANCE)?
        .with_note(format!("printed/corrected prefactor = {}", printed / correct)))
}

/// One shift relation `Γ_∞(-1-s/8-S/2) = m Γ_∞(-s/8; ν)` at `s`.
pub fn heterotic_shift_check(s: f64, index: i64) -> Result<RegProductReport> {
    let ins = inputs(&[("s", s.to_string()), ("S", index.to_string())]);
    let sides = (|| {
        let lhs = gamma_real(ComplexValue::new(-1.0 - s / 8.0 - index as f64 / 2.0, 0.0), 0)?;
        let (m, nu) = heterotic_shift(index, s, false)?;
        Ok((lhs, m * gamma_real(ComplexValue::new(-s / 8.0, 0.0), nu)?))
    })();
    relation_report(IdentityId::HeteroticShift, ins, sides, RELATION_TOLERANCE)
}

/// `A^{(k)}(s,t,u) / A_∞(s/4,t/4,u/4)` for `k ∈ {1, 3}`.
pub fn superstring_proportionality(pt: &MandelstamPoint, k: u8) -> Result<ComplexValue> {
    if k != 1 && k != 3 {
        return Err(Error::ConstraintViolation(format!(
            "only k = 1, 3 are proportional to the superstring amplitude, got {k}"
        )));
    }
    let quarter = MandelstamPoint { s: pt.s / 4.0, t: pt.t / 4.0, u: pt.u / 4.0 };
    Ok(heterotic(pt, &HeteroticIndexSet::standard(k)?)? / superstring(&quarter)?)
}

/// `V₁₁₀(s,t,u) = ((1+α+α't)/(α+α's)) V(s-1/α', t+1/α', u)`.
pub fn relation_4_25(pt: &MandelstamPoint, traj: &ReggeTrajectory) -> Result<RegProductReport> {
    let ins = inputs(&point_inputs(pt));
    let sides = (|| {
        let lhs = veneziano_ramified(pt, traj, [1, 1, 0])?;
        let shifted = MandelstamPoint { s: pt.s - 1.0 / traj.slope, t: pt.t + 1.0 / traj.slope, u: pt.u };
        let factor = (1.0 + traj.intercept + traj.slope * pt.t) / (traj.intercept + traj.slope * pt.s);
        Ok((lhs, factor * veneziano(&shifted, traj)?))
    })();
    relation_report(IdentityId::Relation425, ins, sides, RELATION_TOLERANCE)
}

/// `V₁₀₁(s,t,u) = V₁₁₀(s,u,t) = V₀₁₁(t,s,u)`: two reports.
pub fn veneziano_permutation_checks(pt: &MandelstamPoint, traj: &ReggeTrajectory) -> Result<Vec<RegProductReport>> {
    let base = veneziano_ramified(pt, traj, [1, 0, 1]);
    let others = [
        ("V110(s,u,t)", veneziano_ramified(&pt.permuted([0, 2, 1]), traj, [1, 1, 0])),
        ("V011(t,s,u)", veneziano_ramified(&pt.permuted([1, 0, 2]), traj, [0, 1, 1])),
    ];
    others
        .into_iter()
        .map(|(name, other)| {
            let mut ins = point_inputs(pt);
            ins.push(("relation", format!("V101(s,t,u) = {name}")));
            let sides = match (&base, &other) {
                (Ok(a), Ok(b)) => Ok((*a, *b)),
                (Err(e), _) | (_, Err(e)) => Err(e.clone()),
            };
            relation_report(IdentityId::PermutationRelation, inputs(&ins), sides, RELATION_TOLERANCE)
        })
        .collect()
}

/// `W_{σ(νμη)}(σ(s,t,u)) = W_{νμη}(s,t,u)` over all six permutations `σ`.
pub fn virasoro_permutation_checks(
    pt: &MandelstamPoint,
    traj: &ReggeTrajectory,
    signs: [i64; 3],
) -> Result<Vec<RegProductReport>> {
    let base = virasoro_ramified(pt, traj, signs);
    PERMUTATIONS
        .iter()
        .map(|&perm| {
            let permuted_signs = perm.map(|i| signs[i]);
            let mut ins = point_inputs(pt);
            ins.push(("signs", format!("{signs:?}")));
            ins.push(("permutation", format!("{perm:?}")));
            let other = virasoro_ramified(&pt.permuted(perm), traj, permuted_signs);
            let sides = match (&base, &other) {
                (Ok(a), Ok(b)) => Ok((*a, *b)),
                (Err(e), _) | (_, Err(e)) => Err(e.clone()),
            };
            relation_report(IdentityId::PermutationRelation, inputs(&ins), sides, RELATION_TOLERANCE)
        })
        .collect()
}

pub const PERMUTATIONS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// `V² reg[...] = √|D|` (`d > 0`) or `W reg[...] = √|D|` (`d < 0`) at the
/// amplitude's beta arguments.
pub fn amplitude_adelic_check(
    field: &QuadField,
    pt: &MandelstamPoint,
    traj: &ReggeTrajectory,
    kind: AmplitudeKind,
    opts: &VerifyOptions,
) -> Result<RegProductReport> {
    let family = match kind {
        AmplitudeKind::Veneziano if field.d > 0 => veneziano_family(traj, LocalField::Real, [0; 3])?,
        AmplitudeKind::Virasoro if field.d < 0 => virasoro_family(traj, LocalField::Complex, [0; 3])?,
        _ => {
            return Err(Error::ConstraintViolation(format!(
                "{kind:?} amplitudes pair with {} fields",
                if kind == AmplitudeKind::Veneziano { "real" } else { "imaginary" }
            )))
        }
    };
    pt.check(traj.mass_sq_sum)?;
    let [a, b, c] = family.args(pt).map(|x| ComplexValue::new(x, 0.0));
    let point = IdentityPoint::from_triple(a, b, c, 1.0)?;
    let mut report = verify_beta_quadratic_principal_with(field, &point, opts)?;
    report.identity_id = IdentityId::AmplitudeAdelic;
    for (k, v) in point_inputs(pt) {
        report.inputs.insert(k.to_string(), v);
    }
    report.inputs.insert("kind".into(), format!("{kind:?}").to_lowercase());
    Ok(report)
}

/// `A_∞ · reg∏ Γ_p Γ_p Γ_p = κ N√N` for three odd characters of equal conductor.
pub fn superstring_adelic_check(
    pt: &MandelstamPoint,
    chars: &[GlobalCharacterQ; 3],
    opts: &VerifyOptions,
) -> Result<RegProductReport> {
    pt.check(0.0)?;
    let conductor = chars[0].chi.conductor();
    for g in chars {
        if g.nu != 1 {
            return Err(Error::ConstraintViolation(format!("{} is not odd", g.chi)));
        }
        if g.chi.conductor() != conductor {
            return Err(Error::ConstraintViolation(format!(
                "conductors differ: {} vs {conductor}",
                g.chi.conductor()
            )));
        }
    }
    let mut ins = point_inputs(pt);
    for (name, g) in ["theta", "pi", "sigma"].iter().zip(chars) {
        ins.push((name, g.chi.to_string()));
    }
    let mut lhs = ComplexValue::new(1.0, 0.0);
    let mut rhs = ComplexValue::new(1.0, 0.0);
    let mut guard_ok = true;
    for (g, c) in chars.iter().zip(pt.vars()) {
        let r = verify_gamma_adelic_q_with(ComplexValue::new(-c / 2.0, 0.0), g, opts)?;
        match (r.lhs, r.rhs) {
            (Some(l), Some(h)) => {
                lhs *= l;
                rhs *= h;
                guard_ok &= r.pole_guard_ok;
            }
            _ => {
                return Ok(RegProductReport::inconclusive(
                    IdentityId::SuperstringAdelic,
                    inputs(&ins),
                    opts.tolerance,
                    r.note.unwrap_or_default(),
                ))
            }
        }
    }
    Ok(RegProductReport::new(IdentityId::SuperstringAdelic, inputs(&ins), lhs, rhs, guard_ok, opts.tolerance))
}

/// One row of a grid scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub s: f64,
    pub t: f64,
    pub u: f64,
    pub re: Option<f64>,
    pub im: Option<f64>,
    pub pole_flag: bool,
    pub channel: Option<String>,
}

/// Evaluates `amp` on the grid `s, t ∈ [lo, hi]` with `u` from the mass sum;
/// rows are ordered by `s`, then `t`.
pub fn scan(
    s_range: (f64, f64),
    t_range: (f64, f64),
    step: f64,
    mass_sq_sum: f64,
    amp: impl Fn(&MandelstamPoint) -> Result<ComplexValue>,
) -> Result<Vec<ScanRow>> {
    if !(step > 0.0) {
        return Err(Error::ConstraintViolation(format!("scan step {step} must be positive")));
    }
    let axis = |(lo, hi): (f64, f64)| -> Vec<f64> {
        if hi < lo {
            return Vec::new();
        }
        let n = ((hi - lo) / step + 1e-9).floor() as usize;
        (0..=n).map(|k| lo + k as f64 * step).collect()
    };
    let mut rows = Vec::new();
    for s in axis(s_range) {
        for t in axis(t_range) {
            let pt = MandelstamPoint::new(s, t, mass_sq_sum);
            let row = match amp(&pt) {
                Ok(v) => ScanRow { s, t, u: pt.u, re: Some(v.re), im: Some(v.im), pole_flag: false, channel: None },
                Err(Error::AmplitudePole(p)) => {
                    ScanRow { s, t, u: pt.u, re: None, im: None, pole_flag: true, channel: Some(p.channel) }
                }
                Err(e) => return Err(e),
            };
            rows.push(row);
        }
    }
    Ok(rows)
}
