//! Special functions with f64 accuracy targets.

mod bessel;
mod gamma;
mod kummer;
mod poly;
mod zeta;

pub use bessel::{bessel_k0, bessel_k1};
pub use gamma::{
    beta_psi, cospi, digamma, gamma, gamma_ratio, half_ratio, half_ratio_near_pole, ln_gamma, ln_gamma_signed, sinpi,
    tanpi,
};
pub use kummer::{hyper_u, hyper_u_b1, parabolic_cylinder_d, w_kummer};
pub use poly::{hermite, hermite_even_at_zero, hermite_scaled_table, laguerre};
pub use zeta::{hurwitz_zeta, hurwitz_zeta_eval, hurwitz_zeta_int};

#[allow(unused_imports)]
pub(crate) use gamma::{is_nonpositive_integer, EULER_GAMMA, RATIO_ASYMPTOTIC};

/// A function value with its absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FnEval {
    pub value: f64,
    pub abs_err: f64,
}

/// `zeta(1/2)`.
pub const ZETA_HALF: f64 = -1.460_354_508_809_586_8;
