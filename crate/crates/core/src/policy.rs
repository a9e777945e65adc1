use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numerical knobs shared by every analytic evaluation.
///
/// `series_terms` is the number of directly summed terms in the
/// Euler–Maclaurin evaluation of the Hurwitz zeta function (it is raised
/// automatically when the remainder bound demands it), `bernoulli_terms`
/// the least number of Bernoulli corrections (raised up to 15 when no cut
/// reaches the target otherwise). `pole_guard` is the smallest
/// denominator magnitude a verifier accepts before declaring a test point
/// inconclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrecisionPolicy {
    pub series_terms: usize,
    pub bernoulli_terms: usize,
    pub target_abs_err: f64,
    pub pole_guard: f64,
}

impl Default for PrecisionPolicy {
    fn default() -> Self {
        PrecisionPolicy {
            series_terms: 50,
            bernoulli_terms: 10,
            target_abs_err: 1e-12,
            pole_guard: 1e-6,
        }
    }
}

impl PrecisionPolicy {
    pub fn new(
        series_terms: usize,
        bernoulli_terms: usize,
        target_abs_err: f64,
        pole_guard: f64,
    ) -> Result<Self> {
        let policy = PrecisionPolicy {
            series_terms,
            bernoulli_terms,
            target_abs_err,
            pole_guard,
        };
        policy.validate()?;
        Ok(policy)
    }

    pub fn validate(&self) -> Result<()> {
        if self.series_terms < 10 {
            return Err(Error::InvalidPolicy(format!(
                "series_terms = {} < 10",
                self.series_terms
            )));
        }
        if !(2..=15).contains(&self.bernoulli_terms) {
            return Err(Error::InvalidPolicy(format!(
                "bernoulli_terms = {} outside [2, 15]",
                self.bernoulli_terms
            )));
        }
        if !(self.target_abs_err > 0.0 && self.target_abs_err <= 1e-6) {
            return Err(Error::InvalidPolicy(format!(
                "target_abs_err = {:e} outside (0, 1e-6]",
                self.target_abs_err
            )));
        }
        if !(self.pole_guard > 0.0 && self.pole_guard.is_finite()) {
            return Err(Error::InvalidPolicy(format!(
                "pole_guard = {:e} must be positive",
                self.pole_guard
            )));
        }
        Ok(())
    }
}

/// Parses `key=value` pairs separated by commas, e.g.
/// `series_terms=60,bernoulli_terms=12,target_abs_err=1e-13,pole_guard=1e-7`.
/// Missing keys keep their default values.
impl FromStr for PrecisionPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut policy = PrecisionPolicy::default();
        for item in s.split(',').map(str::trim).filter(|item| !item.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got `{item}`")))?;
            let bad = || Error::Parse(format!("bad value for {key}: `{value}`"));
            match key.trim() {
                "series_terms" => policy.series_terms = value.trim().parse().map_err(|_| bad())?,
                "bernoulli_terms" => {
                    policy.bernoulli_terms = value.trim().parse().map_err(|_| bad())?
                }
                "target_abs_err" => policy.target_abs_err = value.trim().parse().map_err(|_| bad())?,
                "pole_guard" => policy.pole_guard = value.trim().parse().map_err(|_| bad())?,
                other => return Err(Error::Parse(format!("unknown policy key `{other}`"))),
            }
        }
        policy.validate()?;
        Ok(policy)
    }
}
