//! Local gamma and beta functions of R, C and p-adic fields, prime
//! factorization in quadratic fields, and numerical verification of
//! regularized adelic product formulas and 4-point string amplitudes.

pub mod adelic;
pub mod amplitudes;
pub mod analytic;
pub mod arith;
pub mod characters;
pub mod error;
pub mod local;
pub mod policy;
pub mod quadfield;

pub use error::{Error, Result};
pub use policy::PrecisionPolicy;

/// Universal scalar of the analytic layer.
pub type ComplexValue = num_complex::Complex64;
