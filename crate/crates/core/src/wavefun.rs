//! Relative-motion eigenfunction `Psi_E(rho, z)`: two series forms, integral
//! forms, the quasi-1D/2D approximations and the normalization sums.
//!
//! Values are non-normalized, with the short-range behaviour `1/(2 pi r)`.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::quadrature::{integrate_semi_infinite, sum_with_tail};
use crate::specfun::{beta_psi, bessel_k0, gamma, half_ratio, hurwitz_zeta_int, ln_gamma_signed, w_kummer};
use crate::units::{ShiftedEnergy, TrapGeometry};

/// Hard cap on retained series terms.
pub const MAX_TERMS: usize = 5000;
const STREAK: usize = 3;
/// Budget under which [`psi_eval`] prefers a series to an integral.
const SERIES_BUDGET: f64 = 1500.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Representation {
    AxialSeries,
    RadialSeries,
    Integral,
    Q1DBound,
    Q2DBound,
    Q1DExcited,
    Q2DExcited,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavefunctionEval {
    pub rho: f64,
    pub z: f64,
    pub value: f64,
    pub representation: Representation,
}

/// Value of the normalization integral `N^-2` and its bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Normalization {
    pub n_inv_sq: f64,
    pub n_terms: usize,
    pub tail_bound: f64,
    /// Share of `n_inv_sq` carried by the `m = 0` term.
    pub first_term_fraction: f64,
}

impl Normalization {
    /// Factor `N` that makes `N Psi` unit-normalized.
    pub fn factor(&self) -> f64 {
        self.n_inv_sq.sqrt().recip()
    }
}

/// Adaptive sum: stops once `STREAK` consecutive envelopes fall below
/// `tol |S|`, counting only from index `min_terms` on.
fn adaptive_sum<F>(mut term: F, min_terms: usize, tol: f64, what: &'static str) -> Result<(f64, usize)>
where
    F: FnMut(usize) -> Result<(f64, f64)>,
{
    let mut sum = 0.0;
    let mut streak = 0;
    let mut last_env = f64::INFINITY;
    for m in 0..MAX_TERMS {
        let (t, env) = term(m)?;
        sum += t;
        if m >= min_terms && env <= tol * sum.abs() && env <= last_env {
            streak += 1;
            if streak >= STREAK {
                return Ok((sum, m + 1));
            }
        } else {
            streak = 0;
        }
        last_env = env;
    }
    Err(Error::Convergence { what, partial: sum, err: last_env })
}

/// Upward Laguerre recurrence `L_0(x), L_1(x), ...`.
struct Laguerre {
    x: f64,
    m: usize,
    prev: f64,
    cur: f64,
}

impl Laguerre {
    fn new(x: f64) -> Self {
        Self { x, m: 0, prev: 0.0, cur: 1.0 }
    }

    fn next_value(&mut self) -> f64 {
        let out = self.cur;
        let mf = self.m as f64;
        let next = ((2.0 * mf + 1.0 - self.x) * self.cur - mf * self.prev) / (mf + 1.0);
        self.prev = self.cur;
        self.cur = next;
        self.m += 1;
        out
    }
}

/// Even scaled Hermite values `h_{2k}(z)` with `h_n = H_n / sqrt(2^n n!)`.
struct EvenHermite {
    z: f64,
    n: usize,
    prev: f64,
    cur: f64,
}

impl EvenHermite {
    fn new(z: f64) -> Self {
        Self { z, n: 0, prev: 0.0, cur: 1.0 }
    }

    fn step(&mut self) {
        let nf = self.n as f64;
        let next = self.z * (2.0 / (nf + 1.0)).sqrt() * self.cur - (nf / (nf + 1.0)).sqrt() * self.prev;
        self.prev = self.cur;
        self.cur = next;
        self.n += 1;
    }

    fn next_even(&mut self) -> f64 {
        let out = self.cur;
        self.step();
        self.step();
        out
    }
}

/// `(2k)! / (4^k k!^2)`, continued to real `k`.
fn central_ratio(k: f64) -> f64 {
    // Gamma(k + 1/2) / (sqrt(pi) Gamma(k + 1))
    half_ratio(k + 0.5) / PI.sqrt()
}

fn first_index_above(eta: f64, e: f64, floor: f64) -> usize {
    // smallest m with eta m - e/2 >= floor
    (((floor + 0.5 * e) / eta).ceil().max(0.0)) as usize
}

fn check_point(rho: f64, z: f64) -> Result<()> {
    if !(rho >= 0.0) || !rho.is_finite() || !z.is_finite() {
        return Err(domain(format!("invalid point (rho, z) = ({rho}, {z})")));
    }
    Ok(())
}

/// Axial series: Laguerre polynomials in `eta rho^2` times `Gamma(a) U(a, 1/2, z^2)`.
pub fn psi_axial_series(energy: ShiftedEnergy, rho: f64, z: f64, trap: &TrapGeometry, tol: f64) -> Result<WavefunctionEval> {
    check_point(rho, z)?;
    let eta = trap.eta();
    let e = energy.value;
    let x = eta * rho * rho;
    let zz = z * z;
    let env_scale = (0.5 * x).exp();
    let mut lag = Laguerre::new(x);
    let min_terms = first_index_above(eta, e, 1.0);
    let (sum, _) = adaptive_sum(
        |m| {
            let w = w_kummer(eta * m as f64 - 0.5 * e, 0.5, zz)?;
            Ok((lag.next_value() * w, env_scale * w.abs()))
        },
        min_terms,
        tol,
        "axial series",
    )?;
    let value = eta / (2.0 * PI.powf(1.5)) * (-0.5 * (x + zz)).exp() * sum;
    Ok(WavefunctionEval { rho, z, value, representation: Representation::AxialSeries })
}

/// Radial series: even Hermite polynomials in `z` times `Gamma(a) U(a, 1, eta rho^2)`.
pub fn psi_radial_series(energy: ShiftedEnergy, rho: f64, z: f64, trap: &TrapGeometry, tol: f64) -> Result<WavefunctionEval> {
    check_point(rho, z)?;
    if rho == 0.0 {
        return Err(domain("the radial series needs rho > 0"));
    }
    let eta = trap.eta();
    let e = energy.value;
    let x = eta * rho * rho;
    let zz = z * z;
    let env_scale = (0.5 * zz).exp();
    let mut herm = EvenHermite::new(z);
    let min_terms = (0.5 * e + eta).ceil().max(0.0) as usize;
    let (sum, _) = adaptive_sum(
        |k| {
            let kf = k as f64;
            let w = w_kummer((kf - 0.5 * e) / eta, 1.0, x)?;
            let c = central_ratio(kf).sqrt();
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            Ok((sign * c * herm.next_even() * w, env_scale * c * w.abs()))
        },
        min_terms,
        tol,
        "radial series",
    )?;
    let value = (-0.5 * (x + zz)).exp() / (2.0 * PI.powf(1.5)) * sum;
    Ok(WavefunctionEval { rho, z, value, representation: Representation::RadialSeries })
}

/// Quadrature to relative accuracy `tol`, using a coarse pass for the scale.
fn integrate_relative<F: Fn(f64) -> f64>(f: F, rate: f64, tol: f64) -> Result<f64> {
    let coarse = integrate_semi_infinite(&f, rate, f64::INFINITY)?;
    let scale = coarse.value.abs().max(f64::MIN_POSITIVE);
    Ok(integrate_semi_infinite(&f, rate, 1e-2 * tol * scale)?.value)
}

fn ln_sinh(v: f64) -> f64 {
    if v < 20.0 {
        v.sinh().ln()
    } else {
        v - std::f64::consts::LN_2
    }
}

/// Bound states from the imaginary-time propagator integral.
pub fn psi_bound_integral(energy: ShiftedEnergy, rho: f64, z: f64, trap: &TrapGeometry, tol: f64) -> Result<WavefunctionEval> {
    check_point(rho, z)?;
    if !energy.is_bound() {
        return Err(domain("the integral representation needs a bound state (E < E0)"));
    }
    if rho == 0.0 && z == 0.0 {
        return Err(domain("the wavefunction diverges at r = 0"));
    }
    let eta = trap.eta();
    let e_total = energy.total();
    let x = eta * rho * rho;
    let zz = z * z;
    let g = |t: f64| {
        let ln = t * e_total - 0.5 * zz / t.tanh() - 0.5 * x / (eta * t).tanh() - 0.5 * ln_sinh(t) - ln_sinh(eta * t);
        ln.exp()
    };
    let q = integrate_relative(g, -energy.value, tol)?;
    let value = eta / (2.0 * PI).powf(1.5) * q;
    Ok(WavefunctionEval { rho, z, value, representation: Representation::Integral })
}

/// Head of the axial series plus its tail resummed under the Kummer integral.
///
/// Works for any `r > 0` and any energy off the pole lattice.
pub fn psi_axial_resummed(energy: ShiftedEnergy, rho: f64, z: f64, trap: &TrapGeometry, tol: f64) -> Result<WavefunctionEval> {
    check_point(rho, z)?;
    if rho == 0.0 && z == 0.0 {
        return Err(domain("the wavefunction diverges at r = 0"));
    }
    let eta = trap.eta();
    let e = energy.value;
    let x = eta * rho * rho;
    let zz = z * z;
    let head_len = first_index_above(eta, e, 0.5);
    let a_head = eta * head_len as f64 - 0.5 * e;

    let mut head = 0.0;
    let mut lag = Laguerre::new(x);
    let mut lag_head = Vec::with_capacity(head_len);
    for m in 0..head_len {
        let l = lag.next_value();
        lag_head.push(l);
        head += l * w_kummer(eta * m as f64 - 0.5 * e, 0.5, zz)?;
    }
    // L_M, L_{M+1}, ... long enough for a geometric ratio of 0.9
    let direct_len = 400 + (5.0 * x).ceil() as usize;
    let lag_tail: Vec<f64> = (0..direct_len).map(|_| lag.next_value()).collect();
    const W_SPLIT: f64 = 0.9;

    let f = |s: f64| {
        let ln_q = -(1.0 / s).ln_1p();
        let w = (eta * ln_q).exp();
        let base = -zz * s - 0.5 * (1.0 + s).ln() - s.ln();
        if w <= W_SPLIT {
            let mut acc = 0.0;
            let mut p = 1.0;
            for l in &lag_tail {
                acc += l * p;
                p *= w;
                if p < 1e-18 {
                    break;
                }
            }
            (base + a_head * ln_q).exp() * acc
        } else {
            let one_minus_w = -(eta * ln_q).exp_m1();
            let gen = (-x * w / one_minus_w).exp() / one_minus_w;
            let mut p = 1.0;
            let mut h = 0.0;
            for l in &lag_head {
                h += l * p;
                p *= w;
            }
            (base - 0.5 * e * ln_q).exp() * (gen - h)
        }
    };
    let rate = (zz + rho * rho).max(1e-8);
    let tail = integrate_semi_infinite(&f, rate, f64::INFINITY)?;
    let scale = (head.abs() + tail.value.abs()).max(f64::MIN_POSITIVE);
    let tail = integrate_semi_infinite(&f, rate, 1e-2 * tol * scale)?;
    let value = eta / (2.0 * PI.powf(1.5)) * (-0.5 * (x + zz)).exp() * (head + tail.value);
    Ok(WavefunctionEval { rho, z, value, representation: Representation::Integral })
}

/// Rough term counts needed by the axial and radial series at `tol`.
fn series_costs(energy: ShiftedEnergy, rho: f64, z: f64, trap: &TrapGeometry, tol: f64) -> (f64, f64) {
    let eta = trap.eta();
    let x = eta * rho * rho;
    let digits = (1.0 / tol).ln() + 5.0;
    let shift = (0.5 * energy.value).max(0.0);
    let axial = if z == 0.0 {
        f64::INFINITY
    } else {
        ((digits + 0.5 * x) / (2.0 * z.abs())).powi(2) / eta + shift / eta
    };
    let radial = if rho == 0.0 {
        f64::INFINITY
    } else {
        ((digits + 0.5 * z * z) / (2.0 * rho)).powi(2) + shift
    };
    (axial, radial)
}

/// Exact `Psi` at any `r > 0`, choosing the cheapest convergent representation.
pub fn psi_eval(energy: ShiftedEnergy, rho: f64, z: f64, trap: &TrapGeometry, tol: f64) -> Result<WavefunctionEval> {
    let (axial, radial) = series_costs(energy, rho, z, trap, tol);
    if axial.min(radial) <= SERIES_BUDGET {
        if axial <= radial {
            return psi_axial_series(energy, rho, z, trap, tol);
        }
        return psi_radial_series(energy, rho, z, trap, tol);
    }
    if energy.is_bound() {
        psi_bound_integral(energy, rho, z, trap, tol)
    } else {
        psi_axial_resummed(energy, rho, z, trap, tol)
    }
}

/// [`psi_eval`] on the tensor grid `rhos x zs`, row-major in `rho`.
pub fn psi_grid(energy: ShiftedEnergy, rhos: &[f64], zs: &[f64], trap: &TrapGeometry, tol: f64) -> Vec<Result<WavefunctionEval>> {
    let points: Vec<(f64, f64)> = rhos.iter().flat_map(|&r| zs.iter().map(move |&z| (r, z))).collect();
    points.par_iter().map(|&(r, z)| psi_eval(energy, r, z, trap, tol)).collect()
}

/// Quasi-1D bound state: transverse modes with decaying axial exponentials.
pub fn psi_q1d_bound(energy: ShiftedEnergy, rho: f64, z: f64, trap: &TrapGeometry, tol: f64) -> Result<WavefunctionEval> {
    check_point(rho, z)?;
    if !energy.is_bound() {
        return Err(domain("the quasi-1D bound form needs E < E0"));
    }
    let eta = trap.eta();
    let e = energy.value;
    let x = eta * rho * rho;
    let env_scale = (0.5 * x).exp();
    let mut lag = Laguerre::new(x);
    let (sum, _) = adaptive_sum(
        |m| {
            let kappa = -0.5 * e + m as f64 * eta;
            let f = (-2.0 * z.abs() * kappa.sqrt()).exp() / kappa.sqrt();
            Ok((lag.next_value() * f, env_scale * f))
        },
        1,
        tol,
        "quasi-1D bound series",
    )?;
    let value = eta * (-0.5 * x).exp() / (2.0 * PI) * sum;
    Ok(WavefunctionEval { rho, z, value, representation: Representation::Q1DBound })
}

/// Quasi-2D bound state: axial oscillator modes with `K_0` radial profiles.
pub fn psi_q2d_bound(energy: ShiftedEnergy, rho: f64, z: f64, _trap: &TrapGeometry, tol: f64) -> Result<WavefunctionEval> {
    check_point(rho, z)?;
    if rho == 0.0 {
        return Err(domain("K_0 diverges logarithmically at rho = 0"));
    }
    if !energy.is_bound() {
        return Err(domain("the quasi-2D bound form needs E < E0"));
    }
    let e = energy.value;
    let env_scale = (0.5 * z * z).exp();
    let mut herm = EvenHermite::new(z);
    let (sum, _) = adaptive_sum(
        |k| {
            let c = central_ratio(k as f64);
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let kv = bessel_k0(rho * (4.0 * k as f64 - 2.0 * e).sqrt())?;
            Ok((sign * c.sqrt() * herm.next_even() * kv, env_scale * c.sqrt() * kv))
        },
        1,
        tol,
        "quasi-2D bound series",
    )?;
    let value = (-0.5 * z * z).exp() / PI.powf(1.5) * sum;
    Ok(WavefunctionEval { rho, z, value, representation: Representation::Q2DBound })
}

/// Quasi-1D excited state: the `m = 0` term of the axial series.
pub fn psi_q1d_excited(energy: ShiftedEnergy, rho: f64, z: f64, trap: &TrapGeometry) -> Result<WavefunctionEval> {
    check_point(rho, z)?;
    let eta = trap.eta();
    let x = eta * rho * rho;
    let w = w_kummer(-0.5 * energy.value, 0.5, z * z)?;
    let value = eta / (2.0 * PI.powf(1.5)) * (-0.5 * (x + z * z)).exp() * w;
    Ok(WavefunctionEval { rho, z, value, representation: Representation::Q1DExcited })
}

/// Quasi-2D excited state: the `k = 0` term of the radial series.
pub fn psi_q2d_excited(energy: ShiftedEnergy, rho: f64, z: f64, trap: &TrapGeometry) -> Result<WavefunctionEval> {
    check_point(rho, z)?;
    if rho == 0.0 {
        return Err(domain("the quasi-2D excited form diverges at rho = 0"));
    }
    let eta = trap.eta();
    let x = eta * rho * rho;
    let w = w_kummer(-0.5 * energy.value / eta, 1.0, x)?;
    let value = (-0.5 * (x + z * z)).exp() / (2.0 * PI.powf(1.5)) * w;
    Ok(WavefunctionEval { rho, z, value, representation: Representation::Q2DExcited })
}

fn normalization<F: Fn(f64) -> Result<f64>>(term: F, cut: usize, tol: f64, what: &'static str) -> Result<Normalization> {
    let mut head = 0.0;
    for m in 0..cut {
        head += term(m as f64)?;
    }
    let scale = head.abs().max(f64::MIN_POSITIVE);
    let (total, tail_bound) = sum_with_tail(|m| term(m).unwrap_or(f64::NAN), 0, cut, tol * scale)?;
    if !total.is_finite() || !(total > 0.0) {
        return Err(Error::Convergence { what, partial: total, err: tail_bound });
    }
    let first = term(0.0)?;
    Ok(Normalization { n_inv_sq: total, n_terms: cut, tail_bound, first_term_fraction: first / total })
}

/// `Gamma(a) / Gamma(a + 1/2) * beta(2a)`, finite where `a + 1/2` is a
/// nonpositive integer.
fn ratio_times_beta(a: f64) -> Result<f64> {
    let b = a + 0.5;
    if b <= 0.0 && b == b.floor() {
        let j = -b;
        let (lf, _) = ln_gamma_signed(j + 1.0);
        let sign = if j % 2.0 == 0.0 { -0.5 } else { 0.5 };
        return Ok(sign * lf.exp() * gamma(a));
    }
    Ok(half_ratio(a) * beta_psi(2.0 * a)?)
}

/// `N^-2` from the transverse-mode sum (axial representation).
pub fn norm_axial(energy: ShiftedEnergy, trap: &TrapGeometry, tol: f64) -> Result<Normalization> {
    let eta = trap.eta();
    let e = energy.value;
    let term = |m: f64| -> Result<f64> {
        let a = eta * m - 0.5 * e;
        if crate::specfun::is_nonpositive_integer(a) {
            return Err(Error::Pole { at: a });
        }
        Ok(eta / (2.0 * PI) * ratio_times_beta(a)?)
    };
    let cut = (64.0f64).max(((20.0 + 0.5 * e) / eta).ceil()) as usize;
    normalization(term, cut, tol, "axial normalization")
}

/// `N^-2` from the axial-mode sum (radial representation).
pub fn norm_radial(energy: ShiftedEnergy, trap: &TrapGeometry, tol: f64) -> Result<Normalization> {
    let eta = trap.eta();
    let e = energy.value;
    let term = |m: f64| -> Result<f64> {
        let a = (m - 0.5 * e) / eta;
        Ok(central_ratio(m) * hurwitz_zeta_int(2, a)? / (4.0 * PI.powf(1.5) * eta))
    };
    let cut = (64.0f64).max((0.5 * e + 64.0).ceil()) as usize;
    normalization(term, cut, tol, "radial normalization")
}
