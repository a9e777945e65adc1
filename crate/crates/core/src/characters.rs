//! Dirichlet characters stored by their values on canonical generators, and
//! the idele-theoretic data built from them: parity, conductor, local
//! components, exponentials `p^{iα_p}` and norm-induced characters of
//! quadratic fields.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::analytic::kronecker::{is_fundamental_discriminant, kronecker_symbol};
use crate::analytic::trig::unit_turn;
use crate::arith::{crt, euler_phi, factorize, gcd, lcm, primes_up_to, primitive_root_prime_power, residue};
use crate::error::{Error, Result};
use crate::local::{kappa_local_with, KappaConvention, LocalCharacter};
use crate::quadfield::{split_prime, Divisors, QuadField, SplitCase};
use crate::ComplexValue;

/// `e^{2πi num/den}` kept as a reduced fraction with `0 <= num < den`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RootOfUnity {
    num: u64,
    den: u64,
}

impl RootOfUnity {
    pub fn new(k: i64, n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidCharacter("root of unity with denominator 0".into()));
        }
        let num = residue(k, n);
        let g = gcd(num, n);
        Ok(RootOfUnity { num: num / g, den: n / g })
    }

    pub fn one() -> Self {
        RootOfUnity { num: 0, den: 1 }
    }

    pub fn from_sign(sign: i32) -> Self {
        if sign < 0 {
            RootOfUnity { num: 1, den: 2 }
        } else {
            RootOfUnity::one()
        }
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn order(&self) -> u64 {
        self.den
    }

    pub fn is_one(&self) -> bool {
        self.num == 0
    }

    pub fn value(&self) -> ComplexValue {
        unit_turn(self.num as f64 / self.den as f64)
    }

    pub fn mul(self, other: Self) -> Self {
        let den = lcm(self.den, other.den);
        let num = self.num * (den / self.den) + other.num * (den / other.den);
        RootOfUnity::new(num as i64, den).expect("nonzero denominator")
    }

    pub fn conj(self) -> Self {
        RootOfUnity::new(-(self.num as i64), self.den).expect("nonzero denominator")
    }

    pub fn pow(self, e: i64) -> Self {
        let k = (self.num as i128 * e as i128).rem_euclid(self.den as i128);
        RootOfUnity::new(k as i64, self.den).expect("nonzero denominator")
    }
}

impl fmt::Display for RootOfUnity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for RootOfUnity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("expected k/n, got `{s}`"));
        let (k, n) = s.trim().split_once('/').ok_or_else(bad)?;
        RootOfUnity::new(k.trim().parse().map_err(|_| bad())?, n.trim().parse().map_err(|_| bad())?)
    }
}

/// Canonical generators of `(Z/n)^×` with their orders: for each odd prime
/// power the smallest primitive root, `-1` for the factor 4, `-1` and `5`
/// for `2^a` with `a >= 3`, each lifted by CRT to be 1 on the other factors.
pub fn canonical_generators(n: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    for (p, e) in factorize(n) {
        let m = p.pow(e);
        let rest = n / m;
        let lift = |g: u64| if rest == 1 { g % m } else { crt(g % m, m, 1, rest) };
        match (p, e) {
            (2, 1) => {}
            (2, 2) => out.push((lift(3), 2)),
            (2, _) => {
                out.push((lift(m - 1), 2));
                out.push((lift(5), m / 4));
            }
            _ => out.push((lift(primitive_root_prime_power(p, e)), euler_phi(m))),
        }
    }
    out
}

/// A Dirichlet character modulo `N`, given by roots of unity on the
/// canonical generators of `(Z/N)^×`.
#[derive(Clone, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct DirichletCharacterSpec {
    modulus: u64,
    generators: Vec<(u64, u64)>,
    values: Vec<RootOfUnity>,
    table: Vec<Option<RootOfUnity>>,
}

impl PartialEq for DirichletCharacterSpec {
    fn eq(&self, other: &Self) -> bool {
        self.modulus == other.modulus && self.values == other.values
    }
}

impl Eq for DirichletCharacterSpec {}

impl fmt::Debug for DirichletCharacterSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DirichletCharacterSpec({self})")
    }
}

impl DirichletCharacterSpec {
    pub fn build(modulus: u64, values: Vec<RootOfUnity>) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::InvalidCharacter("modulus must be positive".into()));
        }
        let generators = canonical_generators(modulus);
        if generators.len() != values.len() {
            return Err(Error::InvalidCharacter(format!(
                "modulus {modulus} has {} canonical generators, got {} values",
                generators.len(),
                values.len()
            )));
        }
        for (&(g, ord), v) in generators.iter().zip(&values) {
            if ord % v.den() != 0 {
                return Err(Error::InconsistentOrder {
                    generator: g,
                    value: v.to_string(),
                    order: ord,
                });
            }
        }
        let table = build_table(modulus, &generators, &values);
        Ok(DirichletCharacterSpec {
            modulus,
            generators,
            values,
            table,
        })
    }

    /// Character whose generator values are `f(g)`.
    pub fn from_fn(modulus: u64, f: impl Fn(u64) -> RootOfUnity) -> Result<Self> {
        let values = canonical_generators(modulus).iter().map(|&(g, _)| f(g)).collect();
        Self::build(modulus, values)
    }

    pub fn principal(modulus: u64) -> Self {
        Self::from_fn(modulus, |_| RootOfUnity::one()).expect("principal character is consistent")
    }

    /// The quadratic character `n ↦ (D/n)` of a fundamental discriminant.
    pub fn kronecker(disc: i64) -> Result<Self> {
        if !is_fundamental_discriminant(disc) {
            return Err(Error::InvalidCharacter(format!(
                "{disc} is not a fundamental discriminant"
            )));
        }
        Self::from_fn(disc.unsigned_abs(), |g| RootOfUnity::from_sign(kronecker_symbol(disc, g)))
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn generators(&self) -> &[(u64, u64)] {
        &self.generators
    }

    pub fn generator_values(&self) -> &[RootOfUnity] {
        &self.values
    }

    /// `χ(n)`, or `None` when `gcd(n, N) > 1`.
    pub fn value(&self, n: i64) -> Option<RootOfUnity> {
        self.table[residue(n, self.modulus) as usize]
    }

    pub fn eval(&self, n: i64) -> ComplexValue {
        self.value(n).map_or(ComplexValue::new(0.0, 0.0), |v| v.value())
    }

    pub fn is_principal(&self) -> bool {
        self.values.iter().all(RootOfUnity::is_one)
    }

    /// 0 for even characters, 1 for odd ones.
    pub fn parity(&self) -> u8 {
        match self.value(-1) {
            Some(v) if !v.is_one() => 1,
            _ => 0,
        }
    }

    pub fn order(&self) -> u64 {
        self.values.iter().fold(1, |acc, v| lcm(acc, v.den()))
    }

    /// Character modulo `p^e` (the exact power of `p` in `N`) whose product over
    /// `p | N` is `χ`.
    fn prime_power_part(&self, p: u64) -> Option<DirichletCharacterSpec> {
        let e = factorize(self.modulus).into_iter().find(|&(q, _)| q == p)?.1;
        let m = p.pow(e);
        Some(
            DirichletCharacterSpec::from_fn(m, |g| {
                let n = if m == self.modulus { g } else { crt(g, m, 1, self.modulus / m) };
                self.value(n as i64).expect("lift is a unit")
            })
            .expect("restriction is consistent"),
        )
    }

    /// Conductor `N₀` and the ranks `ρ_p` (exponent of `p` in `N₀`).
    pub fn conductor_and_ranks(&self) -> (u64, BTreeMap<u64, u32>) {
        let mut ranks = BTreeMap::new();
        let mut conductor = 1;
        for (p, e) in factorize(self.modulus) {
            let part = self.prime_power_part(p).expect("p divides the modulus");
            let m = p.pow(e);
            let f = (0..=e)
                .find(|&f| {
                    let step = p.pow(f);
                    (0..m / step)
                        .map(|k| 1 + k * step)
                        .all(|u| part.value(u as i64).is_none_or(|v| v.is_one()))
                })
                .expect("the full modulus always works");
            if f > 0 {
                ranks.insert(p, f);
                conductor *= p.pow(f);
            }
        }
        (conductor, ranks)
    }

    pub fn conductor(&self) -> u64 {
        self.conductor_and_ranks().0
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor() == self.modulus
    }

    /// The primitive character inducing `χ`.
    pub fn primitive(&self) -> DirichletCharacterSpec {
        let n0 = self.conductor();
        if n0 == self.modulus {
            return self.clone();
        }
        DirichletCharacterSpec::from_fn(n0, |g| {
            let n = (0..)
                .map(|k| g + k * n0)
                .find(|&n| gcd(n, self.modulus) == 1)
                .expect("a coprime lift exists");
            self.value(n as i64).expect("coprime lift")
        })
        .expect("primitive character is consistent")
    }

    /// Character modulo a multiple `m` of the modulus.
    pub fn induce(&self, m: u64) -> Result<DirichletCharacterSpec> {
        if m % self.modulus != 0 {
            return Err(Error::InvalidCharacter(format!(
                "{m} is not a multiple of {}",
                self.modulus
            )));
        }
        DirichletCharacterSpec::from_fn(m, |g| self.value(g as i64).expect("unit mod m"))
    }

    /// Product character modulo `lcm(N, N')`.
    pub fn mul(&self, other: &DirichletCharacterSpec) -> DirichletCharacterSpec {
        let m = lcm(self.modulus, other.modulus);
        DirichletCharacterSpec::from_fn(m, |g| {
            let a = self.value(g as i64).expect("unit");
            let b = other.value(g as i64).expect("unit");
            a.mul(b)
        })
        .expect("product is consistent")
    }

    pub fn conj(&self) -> DirichletCharacterSpec {
        DirichletCharacterSpec::build(self.modulus, self.values.iter().map(|v| v.conj()).collect())
            .expect("conjugate is consistent")
    }

    /// The local component at `p` as a primitive character modulo `p^{ρ_p}`.
    pub fn local_component(&self, p: u64) -> LocalCharacter {
        let primitive = self.primitive();
        let chi = primitive
            .prime_power_part(p)
            .map(|c| c.primitive())
            .unwrap_or_else(|| DirichletCharacterSpec::principal(1));
        let rank = factorize(chi.modulus).first().map_or(0, |&(_, e)| e);
        LocalCharacter { p, rank, chi, r: 0 }
    }

    /// Every character modulo `n`.
    pub fn all_characters(n: u64) -> Vec<DirichletCharacterSpec> {
        let gens = canonical_generators(n);
        let mut exps = vec![0u64; gens.len()];
        let mut out = Vec::new();
        loop {
            let values = gens
                .iter()
                .zip(&exps)
                .map(|(&(_, ord), &k)| RootOfUnity::new(k as i64, ord).expect("order > 0"))
                .collect();
            out.push(DirichletCharacterSpec::build(n, values).expect("consistent by construction"));
            let mut i = 0;
            loop {
                if i == gens.len() {
                    return out;
                }
                exps[i] += 1;
                if exps[i] < gens[i].1 {
                    break;
                }
                exps[i] = 0;
                i += 1;
            }
        }
    }
}

fn build_table(n: u64, gens: &[(u64, u64)], values: &[RootOfUnity]) -> Vec<Option<RootOfUnity>> {
    let mut table = vec![None; n as usize];
    if n == 1 {
        table[0] = Some(RootOfUnity::one());
        return table;
    }
    let mut exps = vec![0u64; gens.len()];
    let mut element = 1u64;
    let mut value = RootOfUnity::one();
    // walk all exponent vectors, maintaining the element and its value
    loop {
        table[element as usize] = Some(value);
        let mut i = 0;
        loop {
            if i == gens.len() {
                return table;
            }
            exps[i] += 1;
            element = crate::arith::mod_mul(element, gens[i].0, n);
            value = value.mul(values[i]);
            if exps[i] < gens[i].1 {
                break;
            }
            // g^ord = 1, so the element and value have wrapped around
            exps[i] = 0;
            i += 1;
        }
    }
}

impl fmt::Display for DirichletCharacterSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.modulus == 1 {
            return write!(f, "principal");
        }
        write!(f, "mod={}", self.modulus)?;
        for (i, v) in self.values.iter().enumerate() {
            write!(f, "{}g{}={}", if i == 0 { ';' } else { ',' }, i + 1, v)?;
        }
        Ok(())
    }
}

/// Grammar: `principal`, `kronecker:D`, or `mod=N;g1=k/n,g2=k/n,...` with
/// values on the canonical generators in order.
impl FromStr for DirichletCharacterSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "principal" {
            return Ok(DirichletCharacterSpec::principal(1));
        }
        if let Some(d) = s.strip_prefix("kronecker:") {
            let d = d
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad discriminant in `{s}`")))?;
            return DirichletCharacterSpec::kronecker(d);
        }
        let rest = s
            .strip_prefix("mod=")
            .ok_or_else(|| Error::Parse(format!("unrecognized character `{s}`")))?;
        let (modulus, gens) = rest.split_once(';').unwrap_or((rest, ""));
        let modulus: u64 = modulus
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad modulus in `{s}`")))?;
        let count = canonical_generators(modulus.max(1)).len();
        let mut values = vec![None; count];
        for item in gens.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected gI=k/n, got `{item}`")))?;
            let index: usize = key
                .trim()
                .strip_prefix('g')
                .and_then(|i| i.parse().ok())
                .filter(|&i| (1..=count).contains(&i))
                .ok_or_else(|| Error::Parse(format!("bad generator key `{key}`")))?;
            values[index - 1] = Some(value.parse()?);
        }
        let values = values
            .into_iter()
            .enumerate()
            .map(|(i, v)| v.ok_or_else(|| Error::Parse(format!("missing value for g{}", i + 1))))
            .collect::<Result<Vec<_>>>()?;
        DirichletCharacterSpec::build(modulus, values)
    }
}

impl From<DirichletCharacterSpec> for String {
    fn from(c: DirichletCharacterSpec) -> String {
        c.to_string()
    }
}

impl TryFrom<String> for DirichletCharacterSpec {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// A Dirichlet character together with the archimedean sign exponent, subject
/// to `θ(-1) = (-1)^ν χ(-1) = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlobalCharacterQ {
    pub chi: DirichletCharacterSpec,
    pub nu: u8,
}

impl GlobalCharacterQ {
    pub fn new(chi: DirichletCharacterSpec, nu: u8) -> Result<Self> {
        let theta_minus_one = if (nu + chi.parity()) % 2 == 0 { 1 } else { -1 };
        if theta_minus_one != 1 {
            return Err(Error::ParityViolation(theta_minus_one));
        }
        Ok(GlobalCharacterQ { chi, nu: nu % 2 })
    }

    /// The character with the archimedean exponent forced by parity.
    pub fn from_character(chi: DirichletCharacterSpec) -> Self {
        let nu = chi.parity();
        GlobalCharacterQ { chi, nu }
    }

    pub fn principal() -> Self {
        Self::from_character(DirichletCharacterSpec::principal(1))
    }

    pub fn primitive(&self) -> GlobalCharacterQ {
        GlobalCharacterQ {
            chi: self.chi.primitive(),
            nu: self.nu,
        }
    }

    pub fn conj(&self) -> GlobalCharacterQ {
        GlobalCharacterQ {
            chi: self.chi.conj(),
            nu: self.nu,
        }
    }
}

/// A place of `Q` or of a quadratic field above `p`: `Prime(p)` is `p` itself
/// or the divisor `𝔭`, `PrimeConj(p)` is `𝔭̄` for split `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Place {
    Prime(u64),
    PrimeConj(u64),
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Prime(p) => write!(f, "{p}"),
            Place::PrimeConj(p) => write!(f, "{p}'"),
        }
    }
}

impl Serialize for Place {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Place {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        let parse = |t: &str| t.parse::<u64>().map_err(serde::de::Error::custom);
        match s.strip_suffix('\'') {
            Some(p) => Ok(Place::PrimeConj(parse(p)?)),
            None => Ok(Place::Prime(parse(&s)?)),
        }
    }
}

/// Unit-modulus values `p^{iα_p}` (`q^{iα_p}` at inert primes) per place.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ExponentialAssignment {
    pub values: BTreeMap<Place, ComplexValue>,
}

impl ExponentialAssignment {
    pub fn get(&self, place: Place) -> Option<ComplexValue> {
        self.values.get(&place).copied()
    }

    pub fn max_modulus_defect(&self) -> f64 {
        self.values
            .values()
            .map(|v| (v.norm() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// `θ(p)` for a prime dividing the conductor: `prod_{ℓ | N₀, ℓ ≠ p} χ_ℓ(p)`,
/// which realizes `θ_p(p) = 1`.
pub fn ramified_exponential(chi: &DirichletCharacterSpec, p: u64) -> RootOfUnity {
    let primitive = chi.primitive();
    let (_, ranks) = primitive.conductor_and_ranks();
    ranks
        .keys()
        .filter(|&&l| l != p)
        .map(|&l| {
            primitive
                .local_component(l)
                .chi
                .value(p as i64)
                .expect("p is a unit away from l")
        })
        .fold(RootOfUnity::one(), RootOfUnity::mul)
}

/// `θ(n)` extended to all positive `n` through `θ_p(p) = 1`.
pub fn extended_value(chi: &DirichletCharacterSpec, n: u64) -> RootOfUnity {
    let primitive = chi.primitive();
    factorize(n).into_iter().fold(RootOfUnity::one(), |acc, (p, e)| {
        let at_p = match primitive.value(p as i64) {
            Some(v) => v,
            None => ramified_exponential(&primitive, p),
        };
        acc.mul(at_p.pow(e as i64))
    })
}

/// Exponentials `p^{iα_p} = θ(p)` for every prime `p <= bound`.
pub fn theorem1_exponentials(g: &GlobalCharacterQ, bound: u64) -> Result<ExponentialAssignment> {
    let g = GlobalCharacterQ::new(g.chi.clone(), g.nu)?;
    let primitive = g.chi.primitive();
    let values = primes_up_to(bound)
        .into_iter()
        .map(|p| {
            let v = primitive
                .value(p as i64)
                .unwrap_or_else(|| ramified_exponential(&primitive, p));
            (Place::Prime(p), v.value())
        })
        .collect();
    Ok(ExponentialAssignment { values })
}

/// `σ = conj(θ π)`, made primitive.
pub fn sigma_of(theta: &DirichletCharacterSpec, pi: &DirichletCharacterSpec) -> DirichletCharacterSpec {
    theta.mul(pi).conj().primitive()
}

pub fn sigma_of_global(theta: &GlobalCharacterQ, pi: &GlobalCharacterQ) -> GlobalCharacterQ {
    GlobalCharacterQ::from_character(sigma_of(&theta.chi, &pi.chi))
}

/// `prod_{p ∈ R} κ(θ_p) p^{-iα_p ρ_p}`.
pub fn kappa_global(g: &GlobalCharacterQ, exp: &ExponentialAssignment) -> ComplexValue {
    kappa_global_with(g, exp, KappaConvention::default())
}

pub fn kappa_global_with(
    g: &GlobalCharacterQ,
    exp: &ExponentialAssignment,
    convention: KappaConvention,
) -> ComplexValue {
    let primitive = g.chi.primitive();
    let (_, ranks) = primitive.conductor_and_ranks();
    ranks
        .iter()
        .map(|(&p, &rho)| {
            let local = primitive.local_component(p);
            let exponential = exp
                .get(Place::Prime(p))
                .unwrap_or_else(|| ramified_exponential(&primitive, p).value());
            kappa_local_with(&local, convention) * exponential.powi(-(rho as i32))
        })
        .product()
}

/// Explicit character data on a quadratic field: finite parts `θ_fin` on the
/// unit generators (keys `-1`, `i`, `zeta6`, `Omega`) and values `θ(𝔭)` on
/// prime divisors (`Prime(p)` for `𝔭` or the inert `p`, `PrimeConj(p)` for `𝔭̄`).
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ExplicitCharacterTable {
    pub unit_values: BTreeMap<String, ComplexValue>,
    pub divisor_values: BTreeMap<Place, ComplexValue>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "data", rename_all = "snake_case")]
pub enum QuadCharacterKind {
    Principal,
    NormInduced(DirichletCharacterSpec),
    Explicit(ExplicitCharacterTable),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Archimedean {
    Imaginary { nu: i64 },
    Real { nu: u8, nu_prime: u8, a: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadCharacterData {
    pub field: QuadField,
    pub kind: QuadCharacterKind,
    pub archimedean: Archimedean,
}

impl QuadCharacterData {
    pub fn principal(field: QuadField) -> Self {
        let archimedean = if field.d < 0 {
            Archimedean::Imaginary { nu: 0 }
        } else {
            Archimedean::Real { nu: 0, nu_prime: 0, a: 0.0 }
        };
        QuadCharacterData {
            field,
            kind: QuadCharacterKind::Principal,
            archimedean,
        }
    }

    /// `χ ∘ N`, whose archimedean part is trivial for `d < 0` and `sgn^δ` at
    /// both real places for `d > 0`.
    pub fn norm_induced(field: QuadField, chi: DirichletCharacterSpec) -> Self {
        let delta = chi.parity();
        let archimedean = if field.d < 0 {
            Archimedean::Imaginary { nu: 0 }
        } else {
            Archimedean::Real { nu: delta, nu_prime: delta, a: 0.0 }
        };
        QuadCharacterData {
            field,
            kind: QuadCharacterKind::NormInduced(chi),
            archimedean,
        }
    }

    /// `θ_∞(ε)` for a unit given by its two real embeddings or its complex one.
    fn theta_infinity(&self, embedding: ComplexValue, conjugate_embedding: f64) -> ComplexValue {
        match self.archimedean {
            Archimedean::Imaginary { nu } => (embedding / embedding.norm()).powi(nu as i32),
            Archimedean::Real { nu, nu_prime, .. } => {
                let sgn = |x: f64, e: u8| if x < 0.0 && e % 2 == 1 { -1.0 } else { 1.0 };
                ComplexValue::new(sgn(embedding.re, nu) * sgn(conjugate_embedding, nu_prime), 0.0)
            }
        }
    }

    /// Finite part of `θ` on a unit of norm `unit_norm`.
    fn theta_finite(&self, key: &str, unit_norm: i32) -> ComplexValue {
        match &self.kind {
            QuadCharacterKind::Principal => ComplexValue::new(1.0, 0.0),
            QuadCharacterKind::NormInduced(chi) => chi.eval(unit_norm as i64),
            QuadCharacterKind::Explicit(t) => t
                .unit_values
                .get(key)
                .copied()
                .unwrap_or(ComplexValue::new(1.0, 0.0)),
        }
    }

    /// `θ` on the divisor of norm `q` (taken positive) at place `place`.
    fn theta_divisor(&self, place: Place, q: u64) -> Result<ComplexValue> {
        match &self.kind {
            QuadCharacterKind::Principal => Ok(ComplexValue::new(1.0, 0.0)),
            QuadCharacterKind::NormInduced(chi) => Ok(extended_value(chi, q).value()),
            QuadCharacterKind::Explicit(t) => t
                .divisor_values
                .get(&place)
                .copied()
                .ok_or_else(|| Error::InvalidCharacter(format!("no value at divisor {place}"))),
        }
    }
}

const UNIT_TOL: f64 = 1e-12;

/// Checks that `θ` is trivial on the units of a one-class field and emits the
/// exponentials for all primes `p <= bound`.
pub fn theorem2_validate(qc: &QuadCharacterData, bound: u64) -> Result<ExponentialAssignment> {
    let field = &qc.field;
    if !field.one_class {
        return Err(Error::NotOneClass(field.d));
    }
    match (field.d < 0, qc.archimedean) {
        (true, Archimedean::Imaginary { .. }) | (false, Archimedean::Real { .. }) => {}
        _ => {
            return Err(Error::InvalidCharacter(
                "archimedean data does not match the field signature".into(),
            ))
        }
    }
    let check = |name: &str, value: ComplexValue, expected: ComplexValue| -> Result<()> {
        if (value - expected).norm() > UNIT_TOL {
            return Err(Error::TrivialityViolation(format!(
                "θ({name}) = {value}, expected {expected}"
            )));
        }
        Ok(())
    };
    let one = ComplexValue::new(1.0, 0.0);
    let minus_one = qc.theta_infinity(ComplexValue::new(-1.0, 0.0), -1.0) * qc.theta_finite("-1", 1);
    check("-1", minus_one, one)?;
    match field.d {
        -1 => {
            let i = qc.theta_infinity(ComplexValue::new(0.0, 1.0), 0.0) * qc.theta_finite("i", 1);
            check("i", i, one)?;
        }
        -3 => {
            let z = unit_turn(1.0 / 6.0);
            let v = qc.theta_infinity(z, 0.0) * qc.theta_finite("zeta6", 1);
            check("e^{iπ/3}", v, one)?;
        }
        _ => {}
    }
    let a = match qc.archimedean {
        Archimedean::Real { a, .. } => a,
        Archimedean::Imaginary { .. } => 0.0,
    };
    if field.d > 0 {
        let unit = crate::quadfield::fundamental_unit(field.d)?;
        let omega = unit.value();
        let v = qc.theta_infinity(ComplexValue::new(omega, 0.0), unit.conjugate_value())
            * qc.theta_finite("Omega", unit.norm as i32);
        check("Ω", v, ComplexValue::new(0.0, -a * omega.ln()).exp())?;
    }
    let h = if field.d > 0 { 1.0 } else { 0.0 };
    let archimedean_power = |x: f64| ComplexValue::new(0.0, a * h * x.abs().ln()).exp();
    let mut values = BTreeMap::new();
    for p in primes_up_to(bound) {
        let fact = split_prime(field, p)?;
        match (&fact.case, &fact.divisors) {
            (SplitCase::InertB, _) => {
                let v = qc.theta_divisor(Place::Prime(p), p * p)? * archimedean_power(p as f64);
                values.insert(Place::Prime(p), v);
            }
            (_, Divisors::Ramified { divisor }) => {
                let size = field.embed(*divisor).norm();
                let v = qc.theta_divisor(Place::Prime(p), p)? * archimedean_power(size);
                values.insert(Place::Prime(p), v);
            }
            (_, Divisors::Split { p: first, pbar }) => {
                let v = qc.theta_divisor(Place::Prime(p), p)? * archimedean_power(field.embed(*first).norm());
                let w = qc.theta_divisor(Place::PrimeConj(p), p)? * archimedean_power(field.embed(*pbar).norm());
                values.insert(Place::Prime(p), v);
                values.insert(Place::PrimeConj(p), w);
            }
            _ => unreachable!("split_prime pairs cases with divisors"),
        }
    }
    let assignment = ExponentialAssignment { values };
    if assignment.max_modulus_defect() > UNIT_TOL {
        return Err(Error::InvalidCharacter("exponential of non-unit modulus".into()));
    }
    Ok(assignment)
}

/// Checks `prod_p χ_p = χ` on all units modulo the conductor.
pub fn local_components_multiply_back(chi: &DirichletCharacterSpec) -> bool {
    let primitive = chi.primitive();
    let (n0, ranks) = primitive.conductor_and_ranks();
    let locals: Vec<_> = ranks.keys().map(|&p| primitive.local_component(p)).collect();
    (1..=n0 as i64).filter(|&n| gcd(n as u64, n0) == 1).all(|n| {
        let product = locals
            .iter()
            .map(|l| l.chi.value(n).expect("unit"))
            .fold(RootOfUnity::one(), RootOfUnity::mul);
        Some(product) == primitive.value(n)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadfield::make_field;

    fn quartic_mod5() -> DirichletCharacterSpec {
        DirichletCharacterSpec::build(5, vec![RootOfUnity::new(1, 4).unwrap()]).unwrap()
    }

    #[test]
    fn canonical_generator_lists() {
        assert_eq!(canonical_generators(4), vec![(3, 2)]);
        assert_eq!(canonical_generators(8), vec![(7, 2), (5, 2)]);
        assert_eq!(canonical_generators(5), vec![(2, 4)]);
        assert_eq!(canonical_generators(15), vec![(11, 2), (7, 4)]);
        assert!(canonical_generators(2).is_empty());
        assert!(canonical_generators(1).is_empty());
    }

    #[test]
    fn table_examples() {
        let k = DirichletCharacterSpec::kronecker(-4).unwrap();
        assert_eq!(k.value(3), Some(RootOfUnity::from_sign(-1)));
        assert_eq!(k.value(2), None);
        let p = DirichletCharacterSpec::principal(1);
        assert!((0..20).all(|n| p.eval(n) == ComplexValue::new(1.0, 0.0)));
        let q = quartic_mod5();
        assert_eq!(q.eval(2), ComplexValue::new(0.0, 1.0));
        assert_eq!(q.eval(4), ComplexValue::new(-1.0, 0.0));
        assert_eq!(q.eval(3), ComplexValue::new(0.0, -1.0));
    }

    #[test]
    fn inconsistent_order_rejected() {
        let bad = DirichletCharacterSpec::build(5, vec![RootOfUnity::new(1, 3).unwrap()]);
        assert!(matches!(bad, Err(Error::InconsistentOrder { .. })));
    }

    // Oracle: brute-force multiplicativity over all pairs of residues.
    #[test]
    fn every_character_is_multiplicative() {
        for n in [1u64, 2, 3, 4, 5, 7, 8, 9, 12, 15, 16, 20, 24] {
            for chi in DirichletCharacterSpec::all_characters(n) {
                for a in 0..n as i64 {
                    for b in 0..n as i64 {
                        let prod = chi.eval(a) * chi.eval(b);
                        assert!((prod - chi.eval(a * b)).norm() < 1e-12, "{chi} at {a},{b}");
                    }
                }
            }
            assert_eq!(DirichletCharacterSpec::all_characters(n).len() as u64, euler_phi(n));
        }
    }

    #[test]
    fn conductors() {
        let k = DirichletCharacterSpec::kronecker(-4).unwrap();
        let (n0, ranks) = k.conductor_and_ranks();
        assert_eq!((n0, ranks.get(&2).copied()), (4, Some(2)));
        let (n0, ranks) = DirichletCharacterSpec::principal(12).conductor_and_ranks();
        assert_eq!((n0, ranks.len()), (1, 0));
        let (n0, ranks) = quartic_mod5().conductor_and_ranks();
        assert_eq!((n0, ranks.get(&5).copied()), (5, Some(1)));
        let induced = k.induce(12).unwrap();
        assert_eq!(induced.conductor(), 4);
        assert_eq!(induced.primitive(), k);
    }

    // Oracle: a character is primitive iff it is not trivial on any
    // `{u ≡ 1 mod N/p}` subgroup; checked directly against the table.
    #[test]
    fn conductor_matches_definition() {
        for n in 1..=40u64 {
            for chi in DirichletCharacterSpec::all_characters(n) {
                let direct = (1..=n)
                    .filter(|m| n % m == 0)
                    .find(|&m| {
                        (1..n as i64)
                            .filter(|&u| gcd(u as u64, n) == 1 && (u as u64) % m == 1 % m)
                            .all(|u| chi.value(u).unwrap().is_one())
                    })
                    .unwrap();
                assert_eq!(chi.conductor(), direct, "{chi}");
                assert!(local_components_multiply_back(&chi));
            }
        }
    }

    #[test]
    fn grammar_round_trip() {
        for text in ["principal", "mod=5;g1=1/4", "mod=8;g1=1/2,g2=0/1", "mod=2", "mod=15;g1=1/2,g2=3/4"] {
            let chi: DirichletCharacterSpec = text.parse().unwrap();
            assert_eq!(chi.to_string(), text);
        }
        let k: DirichletCharacterSpec = "kronecker:-4".parse().unwrap();
        assert_eq!(k.to_string(), "mod=4;g1=1/2");
        assert_eq!(k.to_string().parse::<DirichletCharacterSpec>().unwrap(), k);
        let json = serde_json::to_string(&k).unwrap();
        assert_eq!(serde_json::from_str::<DirichletCharacterSpec>(&json).unwrap(), k);
        assert!("mod=5;g1=1/3".parse::<DirichletCharacterSpec>().is_err());
        assert!("mod=5;g2=1/4".parse::<DirichletCharacterSpec>().is_err());
        assert!("kronecker:-1".parse::<DirichletCharacterSpec>().is_err());
    }

    #[test]
    fn theorem1_examples() {
        let k = GlobalCharacterQ::new(DirichletCharacterSpec::kronecker(-4).unwrap(), 1).unwrap();
        let e = theorem1_exponentials(&k, 10).unwrap();
        assert_eq!(e.get(Place::Prime(5)), Some(ComplexValue::new(1.0, 0.0)));
        assert_eq!(e.get(Place::Prime(3)), Some(ComplexValue::new(-1.0, 0.0)));
        assert_eq!(e.get(Place::Prime(2)), Some(ComplexValue::new(1.0, 0.0)));
        let q = GlobalCharacterQ::new(quartic_mod5(), 1).unwrap();
        let e = theorem1_exponentials(&q, 10).unwrap();
        assert_eq!(e.get(Place::Prime(2)), Some(ComplexValue::new(0.0, 1.0)));
        assert_eq!(e.get(Place::Prime(3)), Some(ComplexValue::new(0.0, -1.0)));
        assert!(matches!(
            GlobalCharacterQ::new(DirichletCharacterSpec::kronecker(-4).unwrap(), 0),
            Err(Error::ParityViolation(-1))
        ));
        let p = theorem1_exponentials(&GlobalCharacterQ::principal(), 50).unwrap();
        assert!(p.values.values().all(|v| *v == ComplexValue::new(1.0, 0.0)));
    }

    #[test]
    fn theorem1_multiplicative_for_coprime_conductors() {
        let a = DirichletCharacterSpec::kronecker(-4).unwrap();
        let b = quartic_mod5();
        let ab = GlobalCharacterQ::from_character(a.mul(&b));
        let ea = theorem1_exponentials(&GlobalCharacterQ::from_character(a), 100).unwrap();
        let eb = theorem1_exponentials(&GlobalCharacterQ::from_character(b), 100).unwrap();
        let eab = theorem1_exponentials(&ab, 100).unwrap();
        for (place, v) in &eab.values {
            let expected = ea.get(*place).unwrap() * eb.get(*place).unwrap();
            assert!((v - expected).norm() < 1e-12, "{place}");
        }
    }

    #[test]
    fn sigma_examples() {
        let p = DirichletCharacterSpec::principal(1);
        assert!(sigma_of(&p, &p).is_principal());
        let k = DirichletCharacterSpec::kronecker(-4).unwrap();
        let s = sigma_of(&k, &k);
        assert!(s.is_principal() && s.modulus() == 1);
        let q = quartic_mod5();
        assert_eq!(sigma_of(&q, &q.conj()).modulus(), 1);
        let s = sigma_of(&q, &k);
        let triple = q.mul(&k).mul(&s);
        assert!((1..=100).all(|n| triple.value(n).is_none_or(|v| v.is_one())));
    }

    #[test]
    fn kappa_global_examples() {
        let p = GlobalCharacterQ::principal();
        assert_eq!(kappa_global(&p, &ExponentialAssignment::default()), ComplexValue::new(1.0, 0.0));
        let k = GlobalCharacterQ::from_character(DirichletCharacterSpec::kronecker(-4).unwrap());
        let e = theorem1_exponentials(&k, 10).unwrap();
        assert!((kappa_global(&k, &e).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn theorem2_gauss_field() {
        let f = make_field(-1).unwrap();
        let e = theorem2_validate(&QuadCharacterData::principal(f.clone()), 50).unwrap();
        assert!(e.values.values().all(|v| (v - 1.0).norm() < 1e-15));

        let chi = DirichletCharacterSpec::kronecker(-4).unwrap();
        let qc = QuadCharacterData::norm_induced(f.clone(), chi.clone());
        let e = theorem2_validate(&qc, 50).unwrap();
        assert_eq!(e.get(Place::Prime(5)), Some(ComplexValue::new(1.0, 0.0)));
        assert_eq!(e.get(Place::Prime(3)), Some(ComplexValue::new(1.0, 0.0)));

        let bad = QuadCharacterData {
            archimedean: Archimedean::Imaginary { nu: 2 },
            ..QuadCharacterData::principal(f)
        };
        assert!(matches!(theorem2_validate(&bad, 10), Err(Error::TrivialityViolation(_))));
    }

    #[test]
    fn theorem2_unit_conditions() {
        let f3 = make_field(-3).unwrap();
        for nu in -12..=12i64 {
            let qc = QuadCharacterData {
                archimedean: Archimedean::Imaginary { nu },
                ..QuadCharacterData::principal(f3.clone())
            };
            assert_eq!(theorem2_validate(&qc, 5).is_ok(), nu % 6 == 0, "nu={nu}");
        }
        let f7 = make_field(-7).unwrap();
        for nu in -4..=4i64 {
            let qc = QuadCharacterData {
                archimedean: Archimedean::Imaginary { nu },
                ..QuadCharacterData::principal(f7.clone())
            };
            assert_eq!(theorem2_validate(&qc, 5).is_ok(), nu % 2 == 0, "nu={nu}");
        }
        let f3r = make_field(3).unwrap();
        let odd = DirichletCharacterSpec::kronecker(-4).unwrap();
        let qc = QuadCharacterData::norm_induced(f3r.clone(), odd);
        assert!(theorem2_validate(&qc, 30).is_ok());
        let bad = QuadCharacterData {
            archimedean: Archimedean::Real { nu: 1, nu_prime: 0, a: 0.0 },
            ..QuadCharacterData::principal(f3r)
        };
        assert!(theorem2_validate(&bad, 10).is_err());
    }

    #[test]
    fn norm_induced_split_products() {
        for d in [-1i64, -2, -7, -11] {
            let f = make_field(d).unwrap();
            let chi = quartic_mod5();
            let qc = QuadCharacterData::norm_induced(f, chi.clone());
            let e = theorem2_validate(&qc, 200).unwrap();
            for p in primes_up_to(200) {
                if let (Some(a), Some(b)) = (e.get(Place::Prime(p)), e.get(Place::PrimeConj(p))) {
                    let chi_p = extended_value(&chi, p).value();
                    assert!((a * b - chi_p * chi_p).norm() < 1e-12);
                }
            }
        }
    }
}
