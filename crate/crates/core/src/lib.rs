//! Two atoms with an s-wave contact interaction in an axially symmetric
//! harmonic trap: spectral function, eigenvalue solver, reduced-dimension
//! models, eigenfunctions and energy-dependent scattering lengths.

pub mod error;
pub mod fcal;
pub mod feshbach;
pub mod lowdim;
pub mod quadrature;
pub mod spectrum;
pub mod specfun;
pub mod units;
pub mod wavefun;

pub use error::{Error, Result};
pub use units::{ScatteringLength, ShiftedEnergy, SpectralFunctionResult, Strategy, TrapGeometry};
