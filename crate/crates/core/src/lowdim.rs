//! Effective one- and two-dimensional models of the strongly anisotropic trap.
//!
//! Energies are shifted energies `E` (units of `hbar omega_z`); `eta` enters
//! through the transverse frequency `omega_perp = eta omega_z`.

use crate::error::{domain, Error, Result};
use crate::fcal::{phi_continued, phi_eval};
use crate::spectrum::increasing_root;
use crate::specfun::{digamma, half_ratio, hurwitz_zeta, ZETA_HALF};
use crate::units::{ShiftedEnergy, TrapGeometry};

const SQRT_PI: f64 = 1.772_453_850_905_516;

/// One-dimensional scattering length in units of `d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct A1D {
    pub value: f64,
    pub energy_dependent: bool,
    pub source_energy: Option<ShiftedEnergy>,
    pub trap: TrapGeometry,
}

/// Two-dimensional scattering length in units of `d`; always positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct A2D {
    pub value: f64,
    pub energy_dependent: bool,
    pub source_energy: Option<ShiftedEnergy>,
}

/// A root of an effective model, tagged with the oscillator bracket it lies in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Level {
    /// 0 for the bound level below `E = 0`, `i` for the bracket ending at the `i`-th pole.
    pub branch: usize,
    pub energy: ShiftedEnergy,
}

/// Energy-independent `a1D = -1/(2 eta a) - zeta(1/2) / (2 sqrt(eta))`.
pub fn a1d_static(a_inv: f64, trap: &TrapGeometry) -> A1D {
    let eta = trap.eta();
    A1D {
        value: -a_inv / (2.0 * eta) - ZETA_HALF / (2.0 * eta.sqrt()),
        energy_dependent: false,
        source_energy: None,
        trap: *trap,
    }
}

/// Scattering length `a` (units of `d`) of the confinement-induced resonance, where `a1D = 0`.
pub fn confinement_resonance(trap: &TrapGeometry) -> f64 {
    -1.0 / (trap.eta().sqrt() * ZETA_HALF)
}

/// `zeta_H(1/2, 1 - E/(2 eta))`, the energy-dependent replacement of `zeta(1/2)`.
fn zeta_energy(e_shift: f64, eta: f64) -> Result<f64> {
    let arg = 1.0 - e_shift / (2.0 * eta);
    if arg <= 0.0 {
        if arg == arg.floor() {
            return Err(Error::Pole { at: e_shift });
        }
        return Err(domain(format!("energy-dependent a1D needs E < 2 eta, got E = {e_shift}")));
    }
    hurwitz_zeta(0.5, arg)
}

/// Energy-dependent `a1D(E)`, equal to the static value at `E = 0`.
pub fn a1d_energy_dependent(a_inv: f64, energy: ShiftedEnergy, trap: &TrapGeometry) -> Result<A1D> {
    let eta = trap.eta();
    let z = zeta_energy(energy.value, eta)?;
    Ok(A1D {
        value: -a_inv / (2.0 * eta) - z / (2.0 * eta.sqrt()),
        energy_dependent: true,
        source_energy: Some(energy),
        trap: *trap,
    })
}

fn brackets(n_levels: usize, spacing: f64, with_bound: bool) -> Vec<(usize, f64, f64)> {
    let first = if with_bound { 0 } else { 1 };
    (first..first + n_levels)
        .map(|i| if i == 0 { (0, f64::NEG_INFINITY, 0.0) } else { (i, spacing * (i - 1) as f64, spacing * i as f64) })
        .collect()
}

/// Levels of the 1D harmonic oscillator with contact interaction, `Gamma(-E/2) / Gamma(-E/2 + 1/2) = 2 a1D`.
///
/// Returns `n_levels` levels; the bound level exists only for `a1D > 0`.
pub fn solve_1d(a1d: &A1D, n_levels: usize, tol: f64) -> Result<Vec<Level>> {
    let target = 2.0 * a1d.value;
    let h = |e: f64| Ok(half_ratio(-0.5 * e) - target);
    let mut out = Vec::with_capacity(n_levels);
    for (branch, lo, hi) in brackets(n_levels, 2.0, a1d.value > 0.0) {
        let e = if a1d.value.is_infinite() {
            if a1d.value > 0.0 { hi } else { lo }
        } else {
            increasing_root(h, lo, hi, tol * hi.abs().max(1.0))?
        };
        out.push(Level { branch, energy: ShiftedEnergy::new(e, &a1d.trap) });
    }
    Ok(out)
}

/// Self-consistent level of branch `branch` with `a1D(E)` evaluated at the level itself.
pub fn solve_1d_energy_dependent(a_inv: f64, branch: usize, trap: &TrapGeometry, tol: f64) -> Result<ShiftedEnergy> {
    let eta = trap.eta();
    let h = |e: f64| Ok(half_ratio(-0.5 * e) + a_inv / eta + zeta_energy(e, eta)? / eta.sqrt());
    let (lo, hi) = if branch == 0 { (f64::NEG_INFINITY, 0.0) } else { (2.0 * (branch - 1) as f64, 2.0 * branch as f64) };
    if hi > 2.0 * eta {
        return Err(domain(format!("energy-dependent a1D covers E < 2 eta only, branch {branch} is outside")));
    }
    let e = increasing_root(h, lo, hi, tol * hi.abs().max(1.0))?;
    Ok(ShiftedEnergy::new(e, trap))
}

/// Bound state in the cigar limit: `-1/(a sqrt(eta)) = zeta_H(1/2, -E/(2 eta))`.
pub fn bound_state_q1d(a_inv: f64, trap: &TrapGeometry, tol: f64) -> Result<ShiftedEnergy> {
    let eta = trap.eta();
    let target = -a_inv / eta.sqrt();
    // zeta_H(1/2, s) falls from +inf to -inf as s runs over (0, inf); search in u = ln s
    let h = |u: f64| Ok(target - hurwitz_zeta(0.5, u.exp())?);
    let (mut lo, mut hi) = (-1.0, 1.0);
    while h(lo)? > 0.0 {
        lo -= 4.0;
        if lo < -700.0 {
            return Err(Error::NoRoot("quasi-1D bound state too shallow".into()));
        }
    }
    while h(hi)? < 0.0 {
        hi += 4.0;
        if hi > 700.0 {
            return Err(Error::NoRoot("quasi-1D bound state too deep".into()));
        }
    }
    let u = crate::spectrum::brent(h, lo, hi, tol.min(1e-13))?;
    Ok(ShiftedEnergy::new(-2.0 * eta * u.exp(), trap))
}

/// Energy-independent `a2D = exp(Phi(0)/2 - sqrt(pi)/(2a)) / sqrt(2)`.
pub fn a2d_static(a_inv: f64) -> A2D {
    let phi0 = phi_eval(0.0).expect("Phi(0) is in domain");
    A2D { value: (0.5 * phi0 - 0.5 * SQRT_PI * a_inv).exp() / std::f64::consts::SQRT_2, energy_dependent: false, source_energy: None }
}

/// Energy-dependent `a2D(E)` with `Phi(0)` replaced by `Phi(-E/2)`; needs `E < 2`.
pub fn a2d_energy_dependent(a_inv: f64, energy: ShiftedEnergy, _trap: &TrapGeometry) -> Result<A2D> {
    let phi = phi_continued(-0.5 * energy.value)?;
    Ok(A2D {
        value: (0.5 * phi - 0.5 * SQRT_PI * a_inv).exp() / std::f64::consts::SQRT_2,
        energy_dependent: true,
        source_energy: Some(energy),
    })
}

/// Levels of the 2D oscillator of frequency `omega_perp` with contact interaction:
/// `-ln(2 a2D^2 eta) = psi(-E/(2 eta))`.
pub fn solve_2d(a2d: &A2D, trap: &TrapGeometry, n_levels: usize, tol: f64) -> Result<Vec<Level>> {
    let eta = trap.eta();
    let lhs = -(2.0 * a2d.value * a2d.value * eta).ln();
    let h = |e: f64| Ok(lhs - digamma(-e / (2.0 * eta))?);
    brackets(n_levels, 2.0 * eta, true)
        .into_iter()
        .map(|(branch, lo, hi)| {
            let e = increasing_root(h, lo, hi, tol * hi.abs().max(1.0))?;
            Ok(Level { branch, energy: ShiftedEnergy::new(e, trap) })
        })
        .collect()
}

/// Two-dimensional coupling constant in units of `hbar^2 / mu`, at relative wave number `k` (units of `1/d`).
pub fn g2d_coupling(a_inv: f64, k: f64) -> Result<f64> {
    if !(k > 0.0) {
        return Err(domain(format!("wave number must be positive, got {k}")));
    }
    let denom = SQRT_PI * a_inv - phi_eval(0.0)? - (0.5 * k * k).ln();
    if denom == 0.0 {
        return Err(Error::Pole { at: a_inv });
    }
    Ok(2.0 * std::f64::consts::PI / denom)
}

/// `sqrt(pi) d/a` at which the 2D coupling at wave number `k` diverges.
pub fn g2d_resonance(k: f64) -> Result<f64> {
    Ok(phi_eval(0.0)? + (0.5 * k * k).ln())
}

/// Pancake-limit levels `sqrt(pi)/a = ln eta + Phi(-E/2) + psi(-E/(2 eta))`, for `E < 2`.
///
/// Returns the bound level and every excited level whose bracket lies below `E = 2`,
/// up to `n_levels` in total.
pub fn solve_quasi2d_excited(a_inv: f64, trap: &TrapGeometry, n_levels: usize, tol: f64) -> Result<Vec<Level>> {
    let eta = trap.eta();
    let h = |e: f64| Ok(SQRT_PI * a_inv - eta.ln() - phi_continued(-0.5 * e)? - digamma(-e / (2.0 * eta))?);
    brackets(n_levels, 2.0 * eta, true)
        .into_iter()
        .take_while(|&(_, _, hi)| hi <= 2.0 + 1e-12)
        .map(|(branch, lo, hi)| {
            let e = increasing_root(h, lo, hi, tol * hi.abs().max(1.0))?;
            Ok(Level { branch, energy: ShiftedEnergy::new(e, trap) })
        })
        .collect()
}

/// Quasi-2D bound state in the limit `eta -> 0`: `sqrt(pi)/a = Phi(x) + ln x`, `x = -E/2`.
pub fn bound_state_q2d(a_inv: f64, trap: &TrapGeometry, tol: f64) -> Result<ShiftedEnergy> {
    let target = SQRT_PI * a_inv;
    let h = |u: f64| {
        let x = u.exp();
        Ok(phi_eval(x)? + u - target)
    };
    let mut lo = target - 5.0;
    while h(lo)? > 0.0 {
        lo -= 10.0;
        if lo < -700.0 {
            return Err(Error::NoRoot("quasi-2D bound state too shallow".into()));
        }
    }
    let mut hi = lo + 1.0;
    while h(hi)? < 0.0 {
        hi += 2.0;
        if hi > 700.0 {
            return Err(Error::NoRoot("quasi-2D bound state too deep".into()));
        }
    }
    let u = crate::spectrum::brent(h, lo, hi, tol.min(1e-13))?;
    Ok(ShiftedEnergy::new(-2.0 * u.exp(), trap))
}

/// Shallow quasi-2D binding energy `E0 - E = 2 exp(-Phi(0)) exp(sqrt(pi)/a)` in units of `hbar omega_z`.
pub fn shallow_binding_q2d(a_inv: f64) -> f64 {
    let phi0 = phi_eval(0.0).expect("Phi(0) is in domain");
    2.0 * (-phi0).exp() * (SQRT_PI * a_inv).exp()
}
