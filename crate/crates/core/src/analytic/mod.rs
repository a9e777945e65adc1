//! Euler gamma, Hurwitz and Riemann zeta, Dirichlet and Dedekind L-functions.

pub mod bernoulli;
pub mod gamma;
pub mod kronecker;
pub mod lfunc;
pub mod trig;
pub mod zeta;

pub use gamma::{gamma, log_gamma};
pub use kronecker::{is_fundamental_discriminant, kronecker_symbol};
pub use lfunc::{
    dedekind_zeta_quadratic, dedekind_zeta_quadratic_with, dirichlet_l, dirichlet_l_with, euler_product,
    norm_induced_l_with, LFunctionId,
};
pub use zeta::{hurwitz_zeta, hurwitz_zeta_with, riemann_zeta, riemann_zeta_with};
