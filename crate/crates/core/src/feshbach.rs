//! Energy-dependent scattering length near a magnetic Feshbach resonance and
//! the trap spectrum it produces.
//!
//! Internally energies are in `hbar omega_z`, lengths in `d` and fields in
//! tesla. The energy entering `a_eff` is the total relative energy `E0 + E`.

use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::fcal::{f_series, f_series_anchored, FContext};
use crate::spectrum::{brent, pole_lattice, solve_branch_detailed, Pole};
use crate::units::{ShiftedEnergy, TrapGeometry};

const SQRT_PI: f64 = 1.772_453_850_905_516;
/// Samples per unit of the logistic coordinate used to bracket roots.
const SAMPLE_STEP: f64 = 0.25;
const U_SPAN: f64 = 40.0;

/// Resonance parameters in trap units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeshbachParams {
    /// Background scattering length in `d`.
    pub a_bg: f64,
    /// Resonance width in tesla.
    pub delta_b: f64,
    /// Resonance position in tesla.
    pub b0: f64,
    /// Closed-channel slope `dE_m/dB` in `hbar omega_z` per tesla.
    pub em_slope: f64,
    /// Background binding energy `hbar^2 / (m a_bg^2)` in `hbar omega_z`.
    pub e_b: f64,
}

impl FeshbachParams {
    pub fn new(a_bg: f64, delta_b: f64, b0: f64, em_slope: f64, e_b: f64) -> Result<Self> {
        let all = [a_bg, delta_b, b0, em_slope, e_b];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(domain("Feshbach parameters must be finite"));
        }
        if a_bg == 0.0 {
            return Err(domain("a_bg must be nonzero"));
        }
        if !(e_b > 0.0) || em_slope == 0.0 {
            return Err(domain("e_b must be positive and em_slope nonzero"));
        }
        Ok(Self { a_bg, delta_b, b0, em_slope, e_b })
    }

    /// Dimensionless parameters with `e_b` taken from the background length.
    ///
    /// For identical atoms `hbar^2 / (m a^2) = 1 / (2 a^2)` in trap units.
    pub fn with_background_binding(a_bg: f64, delta_b: f64, b0: f64, em_slope: f64) -> Result<Self> {
        Self::new(a_bg, delta_b, b0, em_slope, 0.5 / (a_bg * a_bg))
    }

    /// Laboratory inputs: `a_bg` in meters, fields in tesla, slope in J/T.
    ///
    /// The atom mass is twice the trap's reduced mass.
    pub fn from_si(a_bg_m: f64, delta_b: f64, b0: f64, em_slope_j_per_t: f64, trap: &TrapGeometry) -> Result<Self> {
        let d = trap.length_unit()?;
        let unit_e = trap.energy_unit()?;
        let mass = 2.0 * trap.reduced_mass().ok_or(Error::Unit("reduced_mass"))?;
        let hbar = crate::units::constants::HBAR;
        let e_b = hbar * hbar / (mass * a_bg_m * a_bg_m);
        Self::new(a_bg_m / d, delta_b, b0, em_slope_j_per_t / unit_e, e_b / unit_e)
    }

    /// Reduced width `gamma = delta_b a_bg E'_m` (trap units).
    pub fn reduced_width(&self) -> f64 {
        self.delta_b * self.a_bg * self.em_slope
    }

    /// Field at which `a_eff(E)` diverges; linear in `E` (total energy).
    pub fn divergence_field(&self, energy_total: f64) -> f64 {
        self.b0 + energy_total / self.em_slope - self.delta_b * energy_total / self.e_b
    }

    /// Energy at which `a_eff` diverges for field `b`; `None` if the locus is flat in `E`.
    pub fn divergence_energy(&self, b: f64) -> Option<f64> {
        let slope = 1.0 / self.em_slope - self.delta_b / self.e_b;
        (slope != 0.0).then(|| (b - self.b0) / slope)
    }
}

/// Single-resonance phase-shift parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseShiftParams {
    pub delta_bg: f64,
    pub e_m: f64,
    pub delta_m: f64,
    /// Width in energy units at the momentum of interest (`Gamma / 2`).
    pub gamma: f64,
}

/// `delta_bg - atan(gamma / (E - E_m - Delta_m))`.
pub fn phase_shift(params: &PhaseShiftParams, energy: f64) -> f64 {
    params.delta_bg - (params.gamma / (energy - params.e_m - params.delta_m)).atan()
}

/// Effective scattering length at field `b` and total energy `energy_total`.
pub fn a_eff_of_e(params: &FeshbachParams, b: f64, energy_total: f64) -> Result<f64> {
    let (num, den) = a_eff_parts(params, b, energy_total);
    if den == 0.0 {
        return Err(Error::Pole { at: b });
    }
    Ok(params.a_bg * num / den)
}

/// `1 / a_eff`, finite on the divergence locus and infinite where `a_eff = 0`.
pub fn inv_a_eff(params: &FeshbachParams, b: f64, energy_total: f64) -> f64 {
    let (num, den) = a_eff_parts(params, b, energy_total);
    den / (params.a_bg * num)
}

/// `a_eff / a_bg = num / den`; `num` vanishes exactly where [`zero_energy`] says, `den` on the locus.
fn a_eff_parts(params: &FeshbachParams, b: f64, energy_total: f64) -> (f64, f64) {
    let num = zero_detuning(params, b) - energy_total / params.em_slope;
    (num, b - params.divergence_field(energy_total))
}

fn zero_detuning(params: &FeshbachParams, b: f64) -> f64 {
    b - params.b0 - params.delta_b
}

/// Total energy where `a_eff` vanishes at field `b`, if any.
fn zero_energy(params: &FeshbachParams, b: f64) -> Option<f64> {
    // b - b0 - E/E'm + dB E/Eb - dB - dB E/Eb = 0
    let e = zero_detuning(params, b) * params.em_slope;
    e.is_finite().then_some(e)
}

/// One self-consistent level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeshbachLevel {
    /// Position in the ascending list of roots.
    pub index: usize,
    pub energy: ShiftedEnergy,
    /// `a_eff` at the level's own energy (infinite on the divergence locus).
    pub a_eff: f64,
    /// Composed residual, `|a_eff F + sqrt(pi)|` for `|a_eff| < 1`, `|F + sqrt(pi)/a_eff|` otherwise.
    pub residual: f64,
}

/// Interval between consecutive poles of `F(-E/2)`; `lower = None` is the half-line below zero.
struct Bracket {
    lower: Option<Pole>,
    upper: Pole,
}

/// A sample point with its distances to both bracket poles, each exact when anchored.
#[derive(Clone, Copy)]
struct Point {
    e: f64,
    d_lo: f64,
    d_hi: f64,
}

impl Bracket {
    fn f(&self, p: Point, ctx: &FContext) -> Result<f64> {
        match self.lower {
            None => {
                let s = p.d_hi;
                if s <= 1.0 {
                    Ok(f_series_anchored(self.upper.n, self.upper.j, 0.5 * s, ctx)?.value)
                } else {
                    Ok(f_series(0.5 * s, ctx)?.value)
                }
            }
            Some(lo) if p.d_lo <= p.d_hi => Ok(f_series_anchored(lo.n, lo.j, -0.5 * p.d_lo, ctx)?.value),
            Some(_) => Ok(f_series_anchored(self.upper.n, self.upper.j, 0.5 * p.d_hi, ctx)?.value),
        }
    }

    /// Point of the sub-interval `(lo, hi)` at logistic coordinate `u`.
    fn point(&self, lo: f64, hi: f64, u: f64) -> Point {
        let lower = self.lower.map_or(f64::NEG_INFINITY, |p| p.energy);
        let upper = self.upper.energy;
        if lo == f64::NEG_INFINITY {
            // u runs over ln(distance below hi), descending with the energy
            let d = (-u).exp();
            let e = hi - d;
            let d_hi = if hi == upper { d } else { upper - e };
            return Point { e, d_lo: f64::INFINITY, d_hi };
        }
        let width = hi - lo;
        if u < 0.0 {
            let d = width * logistic(u);
            let e = lo + d;
            let d_lo = if lo == lower { d } else { e - lower };
            Point { e, d_lo, d_hi: upper - e }
        } else {
            let d = width * logistic(-u);
            let e = hi - d;
            let d_hi = if hi == upper { d } else { upper - e };
            Point { e, d_lo: e - lower, d_hi }
        }
    }
}

fn logistic(u: f64) -> f64 {
    1.0 / (1.0 + (-u).exp())
}

/// Magnitude of the larger term of the composed equation at a level.
fn residual_scale(level: &FeshbachLevel) -> f64 {
    if level.a_eff.abs() < 1.0 {
        SQRT_PI
    } else {
        (SQRT_PI / level.a_eff.abs()).max(1.0)
    }
}

fn composed_residual(f: f64, a_eff: f64) -> f64 {
    if a_eff.abs() < 1.0 {
        (a_eff * f + SQRT_PI).abs()
    } else {
        (f + SQRT_PI / a_eff).abs()
    }
}

/// Sign changes of `h(u)` on a uniform grid in `[-U_SPAN, U_SPAN]`, refined by Brent.
fn roots_in<H: Fn(f64) -> Result<f64>>(h: H) -> Result<Vec<f64>> {
    let n = (2.0 * U_SPAN / SAMPLE_STEP) as usize;
    let u_at = |i: usize| -U_SPAN + i as f64 * SAMPLE_STEP;
    let mut roots = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for i in 0..=n {
        let u = u_at(i);
        let cur = h(u)?;
        if !cur.is_finite() {
            // sample rounded onto a singular endpoint
            continue;
        }
        if cur == 0.0 {
            roots.push(u);
        } else if let Some((pu, pv)) = prev {
            if pv != 0.0 && pv.signum() != cur.signum() {
                roots.push(brent(&h, pu, u, 1e-13)?);
            }
        }
        prev = Some((u, cur));
    }
    Ok(roots)
}

/// The lowest `n_levels` self-consistent levels at field `b`, ascending.
///
/// Roots closer than the sampling resolution in the logistic coordinate may
/// be merged.
pub fn solve_feshbach_levels(params: &FeshbachParams, trap: &TrapGeometry, b: f64, n_levels: usize, tol: f64) -> Result<Vec<FeshbachLevel>> {
    if !b.is_finite() {
        return Err(domain(format!("magnetic field must be finite, got {b}")));
    }
    let ctx = FContext::new(*trap);
    let e0 = trap.e_zero();
    let zero_at = zero_energy(params, b).map(|e| e - e0);
    let mut levels = Vec::new();
    let mut count = n_levels + 2;
    'outer: loop {
        let poles = pole_lattice(trap.eta(), count);
        levels.clear();
        for k in 0..poles.len() {
            let bracket = Bracket { lower: (k > 0).then(|| poles[k - 1]), upper: poles[k] };
            let lo = bracket.lower.map_or(f64::NEG_INFINITY, |p| p.energy);
            let hi = bracket.upper.energy;
            let mut cuts = vec![lo];
            if let Some(z) = zero_at {
                if z > lo && z < hi {
                    cuts.push(z);
                }
            }
            cuts.push(hi);
            for w in cuts.windows(2) {
                let (l, r) = (w[0], w[1]);
                if l.is_finite() && (r - l) <= 2e-12 * l.abs().max(r.abs()).max(1.0) {
                    // a_eff vanishes on top of a pole: the root is pinned between
                    // them, below the resolution of the sampled residual
                    let e = 0.5 * (l + r);
                    levels.push(FeshbachLevel { index: levels.len(), energy: ShiftedEnergy::new(e, trap), a_eff: 0.0, residual: f64::NAN });
                    continue;
                }
                let h = |u: f64| -> Result<f64> {
                    let p = bracket.point(l, r, u);
                    let near = |c: f64| c.is_finite() && (p.e - c).abs() <= 1e-12 * c.abs().max(1.0);
                    if (near(l) && l != lo) || (near(r) && r != hi) || p.e == l || p.e == r {
                        // rounding decides the sign of 1/a_eff this close to its pole
                        return Ok(f64::NAN);
                    }
                    Ok(bracket.f(p, &ctx)? + SQRT_PI * inv_a_eff(params, b, e0 + p.e))
                };
                let mut found: Vec<Point> = roots_in(h)?.into_iter().map(|u| bracket.point(l, r, u)).collect();
                found.sort_by(|x, y| x.e.total_cmp(&y.e));
                for p in found {
                    let f = bracket.f(p, &ctx)?;
                    let a = 1.0 / inv_a_eff(params, b, e0 + p.e);
                    levels.push(FeshbachLevel { index: levels.len(), energy: ShiftedEnergy::new(p.e, trap), a_eff: a, residual: composed_residual(f, a) });
                }
            }
            if levels.len() >= n_levels {
                break 'outer;
            }
        }
        if count > 4 * n_levels + 64 {
            return Err(Error::NoRoot(format!("found {} of {n_levels} levels", levels.len())));
        }
        count *= 2;
    }
    levels.truncate(n_levels);
    let scale = tol.max(1e-9);
    if let Some(bad) = levels.iter().find(|l| !(l.residual <= scale * residual_scale(l))) {
        return Err(Error::Convergence { what: "Feshbach self-consistency", partial: bad.energy.value, err: bad.residual });
    }
    Ok(levels)
}

/// Level `branch` (0 = lowest) at field `b`.
///
/// With `delta_b = 0` this is the constant-`a_bg` spectrum solve itself.
pub fn solve_feshbach_spectrum(params: &FeshbachParams, trap: &TrapGeometry, b: f64, branch: usize, tol: f64) -> Result<ShiftedEnergy> {
    if params.delta_b == 0.0 {
        return crate::spectrum::solve_branch(1.0 / params.a_bg, branch, trap, tol);
    }
    let levels = solve_feshbach_levels(params, trap, b, branch + 1, tol)?;
    Ok(levels[branch].energy)
}

/// Detailed variant of [`solve_feshbach_spectrum`] carrying `a_eff` and the residual.
pub fn solve_feshbach_level(params: &FeshbachParams, trap: &TrapGeometry, b: f64, branch: usize, tol: f64) -> Result<FeshbachLevel> {
    if params.delta_b == 0.0 {
        let r = solve_branch_detailed(1.0 / params.a_bg, branch, trap, tol)?;
        return Ok(FeshbachLevel { index: branch, energy: r.energy, a_eff: params.a_bg, residual: r.residual });
    }
    let levels = solve_feshbach_levels(params, trap, b, branch + 1, tol)?;
    Ok(levels[branch])
}

/// Levels over a field grid plus the divergence locus.
#[derive(Debug, Clone, PartialEq)]
pub struct FeshbachSweep {
    pub b_grid: Vec<f64>,
    /// `branches[k][i]` is level `k` at `b_grid[i]`; `None` marks a failed solve.
    pub branches: Vec<Vec<Option<FeshbachLevel>>>,
    /// Points `(E, B*(E))` of the divergence locus spanning the solved energies.
    pub locus: Vec<(ShiftedEnergy, f64)>,
}

impl FeshbachSweep {
    pub fn failures(&self) -> usize {
        self.branches.iter().flatten().filter(|p| p.is_none()).count()
    }
}

/// Solve the lowest `n_branches` levels on every field value, in parallel.
pub fn sweep_feshbach(params: &FeshbachParams, trap: &TrapGeometry, b_grid: &[f64], n_branches: usize) -> FeshbachSweep {
    let per_b: Vec<Vec<Option<FeshbachLevel>>> = b_grid
        .par_iter()
        .map(|&b| match solve_feshbach_levels(params, trap, b, n_branches, 1e-9) {
            Ok(levels) => levels.into_iter().map(Some).collect(),
            Err(_) => (0..n_branches)
                .map(|k| solve_feshbach_level(params, trap, b, k, 1e-9).ok())
                .collect(),
        })
        .collect();
    let branches: Vec<Vec<Option<FeshbachLevel>>> =
        (0..n_branches).map(|k| per_b.iter().map(|row| row.get(k).copied().flatten()).collect()).collect();
    let energies: Vec<f64> = branches.iter().flatten().flatten().map(|l| l.energy.value).collect();
    let locus = match (energies.iter().copied().reduce(f64::min), energies.iter().copied().reduce(f64::max)) {
        (Some(lo), Some(hi)) => divergence_locus(params, trap, lo, hi, 101),
        _ => Vec::new(),
    };
    FeshbachSweep { b_grid: b_grid.to_vec(), branches, locus }
}

/// `n` points `(E, B*(E))` for shifted energies evenly spaced on `[e_min, e_max]`.
pub fn divergence_locus(params: &FeshbachParams, trap: &TrapGeometry, e_min: f64, e_max: f64, n: usize) -> Vec<(ShiftedEnergy, f64)> {
    let e0 = trap.e_zero();
    (0..n)
        .map(|i| {
            let t = if n > 1 { i as f64 / (n - 1) as f64 } else { 0.0 };
            let e = e_min + t * (e_max - e_min);
            (ShiftedEnergy::new(e, trap), params.divergence_field(e0 + e))
        })
        .collect()
}

/// Avoided crossings between adjacent levels that sit on the divergence locus.
///
/// A pair `(k, k+1)` counts when its gap has an interior minimum on the grid
/// and the locus energy at that field lies between the two levels.
pub fn count_locus_anticrossings(sweep: &FeshbachSweep, params: &FeshbachParams, trap: &TrapGeometry) -> usize {
    let e0 = trap.e_zero();
    let n = sweep.b_grid.len();
    let mut count = 0;
    for k in 0..sweep.branches.len().saturating_sub(1) {
        let gaps: Vec<Option<f64>> = (0..n)
            .map(|i| match (sweep.branches[k][i], sweep.branches[k + 1][i]) {
                (Some(a), Some(b)) => Some(b.energy.value - a.energy.value),
                _ => None,
            })
            .collect();
        for i in 1..n.saturating_sub(1) {
            let (Some(g0), Some(g1), Some(g2)) = (gaps[i - 1], gaps[i], gaps[i + 1]) else { continue };
            if !(g1 < g0 && g1 <= g2) {
                continue;
            }
            let Some(e_star) = params.divergence_energy(sweep.b_grid[i]) else { continue };
            let lo = sweep.branches[k][i].map(|l| l.energy.value + e0);
            let hi = sweep.branches[k + 1][i].map(|l| l.energy.value + e0);
            if let (Some(lo), Some(hi)) = (lo, hi) {
                if e_star >= lo && e_star <= hi {
                    count += 1;
                }
            }
        }
    }
    count
}

/// Background (`a = a_bg`) levels whose energy the locus sweeps through between `b_min` and `b_max`.
pub fn levels_crossed_by_locus(params: &FeshbachParams, trap: &TrapGeometry, b_min: f64, b_max: f64, n_levels: usize) -> Result<usize> {
    let (Some(ea), Some(eb)) = (params.divergence_energy(b_min), params.divergence_energy(b_max)) else {
        return Ok(0);
    };
    let (lo, hi) = (ea.min(eb), ea.max(eb));
    let mut crossed = 0;
    for k in 0..n_levels {
        let e = solve_branch_detailed(1.0 / params.a_bg, k, trap, 1e-10)?.energy.total();
        if e > lo && e < hi {
            crossed += 1;
        }
    }
    Ok(crossed)
}
