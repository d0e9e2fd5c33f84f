//! Domain types and the dimensionless unit system.
//!
//! Lengths are measured in `d = sqrt(hbar / (mu * omega_z))` and energies in
//! `hbar * omega_z`. The shifted energy subtracts the zero-point energy
//! `E0 = 1/2 + eta`.

use crate::error::{domain, Error, Result};

/// CODATA 2018 values.
pub mod constants {
    pub const HBAR: f64 = 1.054_571_817e-34;
    pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;
    pub const BOHR_MAGNETON: f64 = 9.274_010_078_3e-24;
    pub const BOHR_RADIUS: f64 = 5.291_772_109_03e-11;
    pub const PLANCK: f64 = 6.626_070_15e-34;
    /// Mass of 87Rb in atomic mass units.
    pub const RB87_MASS_U: f64 = 86.909_180_520;
}

/// Axially symmetric harmonic trap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapGeometry {
    eta: f64,
    omega_z: Option<f64>,
    reduced_mass: Option<f64>,
}

impl TrapGeometry {
    /// Dimensionless trap with anisotropy `eta = omega_perp / omega_z`.
    pub fn new(eta: f64) -> Result<Self> {
        if !(eta.is_finite() && eta > 0.0) {
            return Err(domain(format!("eta must be positive and finite, got {eta}")));
        }
        Ok(Self { eta, omega_z: None, reduced_mass: None })
    }

    /// Trap carrying the axial angular frequency (rad/s) and reduced mass (kg).
    pub fn with_physical(eta: f64, omega_z: f64, reduced_mass: f64) -> Result<Self> {
        let mut t = Self::new(eta)?;
        if !(omega_z.is_finite() && omega_z > 0.0 && reduced_mass.is_finite() && reduced_mass > 0.0) {
            return Err(domain("omega_z and reduced_mass must both be positive"));
        }
        t.omega_z = Some(omega_z);
        t.reduced_mass = Some(reduced_mass);
        Ok(t)
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn omega_z(&self) -> Option<f64> {
        self.omega_z
    }

    pub fn reduced_mass(&self) -> Option<f64> {
        self.reduced_mass
    }

    /// Zero-point energy `1/2 + eta`.
    pub fn e_zero(&self) -> f64 {
        0.5 + self.eta
    }

    /// Axial oscillator length `d` in meters.
    pub fn length_unit(&self) -> Result<f64> {
        match (self.omega_z, self.reduced_mass) {
            (Some(w), Some(mu)) => Ok((constants::HBAR / (mu * w)).sqrt()),
            _ => Err(Error::Unit("omega_z and reduced_mass")),
        }
    }

    /// Energy unit `hbar * omega_z` in joules.
    pub fn energy_unit(&self) -> Result<f64> {
        self.omega_z.map(|w| constants::HBAR * w).ok_or(Error::Unit("omega_z"))
    }
}

/// Energy relative to the zero-point energy, in units of `hbar * omega_z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftedEnergy {
    pub value: f64,
    pub e_zero: f64,
}

impl ShiftedEnergy {
    pub fn new(value: f64, trap: &TrapGeometry) -> Self {
        Self { value, e_zero: trap.e_zero() }
    }

    pub fn from_total(total: f64, trap: &TrapGeometry) -> Self {
        Self { value: total - trap.e_zero(), e_zero: trap.e_zero() }
    }

    pub fn total(&self) -> f64 {
        self.value + self.e_zero
    }

    pub fn is_bound(&self) -> bool {
        self.value < 0.0
    }

    /// Argument `x = -value / 2` of the spectral function.
    pub fn x(&self) -> f64 {
        -0.5 * self.value
    }
}

/// Scattering length stored as its inverse, so that unitarity is `0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringLength {
    pub inverse_a: f64,
}

impl ScatteringLength {
    pub fn from_length(a: f64) -> Self {
        Self { inverse_a: 1.0 / a }
    }

    pub fn length(&self) -> f64 {
        1.0 / self.inverse_a
    }
}

/// How a value of the spectral function was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    Integral,
    Series,
    ClosedCigar,
    ClosedPancake,
    Quasi1D,
    Quasi2D,
    Recurrence,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralFunctionResult {
    pub value: f64,
    pub strategy: Strategy,
    pub abs_err_estimate: f64,
}

/// Total energy in joules.
pub fn to_physical(energy: ShiftedEnergy, trap: &TrapGeometry) -> Result<f64> {
    Ok(energy.total() * trap.energy_unit()?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Axial,
    Transverse,
}

/// Oscillator length along `axis` in units of `d`.
pub fn oscillator_length(trap: &TrapGeometry, axis: Axis) -> f64 {
    match axis {
        Axis::Axial => 1.0,
        Axis::Transverse => 1.0 / trap.eta.sqrt(),
    }
}

/// Oscillator length along `axis` in meters.
pub fn oscillator_length_si(trap: &TrapGeometry, axis: Axis) -> Result<f64> {
    Ok(oscillator_length(trap, axis) * trap.length_unit()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use constants::HBAR;

    #[test]
    fn zero_point_energy_in_joules() {
        let t = TrapGeometry::with_physical(1.0, 1.0, 1e-25).unwrap();
        let e = to_physical(ShiftedEnergy::new(0.0, &t), &t).unwrap();
        assert!((e / HBAR - 1.5).abs() < 1e-14);
        let e = to_physical(ShiftedEnergy::new(-1.0, &t), &t).unwrap();
        assert!((e / HBAR - 0.5).abs() < 1e-14);
    }

    #[test]
    fn cigar_zero_point_energy() {
        let w = 2.0 * std::f64::consts::PI * 5000.0;
        let t = TrapGeometry::with_physical(5.0, w, 1e-25).unwrap();
        let e = to_physical(ShiftedEnergy::new(0.0, &t), &t).unwrap();
        assert!((e / (HBAR * w) - 5.5).abs() < 1e-13);
    }

    #[test]
    fn physical_output_needs_constants() {
        let t = TrapGeometry::new(1.0).unwrap();
        assert!(matches!(to_physical(ShiftedEnergy::new(0.0, &t), &t), Err(Error::Unit(_))));
    }

    #[test]
    fn oscillator_lengths() {
        let t = TrapGeometry::new(1.0).unwrap();
        assert_eq!(oscillator_length(&t, Axis::Axial), 1.0);
        let t = TrapGeometry::new(100.0).unwrap();
        assert!((oscillator_length(&t, Axis::Transverse) - 0.1).abs() < 1e-15);
        let t = TrapGeometry::new(0.01).unwrap();
        assert!((oscillator_length(&t, Axis::Transverse) - 10.0).abs() < 1e-13);
    }

    #[test]
    fn rejects_bad_eta() {
        assert!(TrapGeometry::new(0.0).is_err());
        assert!(TrapGeometry::new(f64::NAN).is_err());
        assert!(TrapGeometry::with_physical(1.0, -1.0, 1.0).is_err());
    }
}
