//! The spectral function `F(x)` of the trapped pair, by every available
//! representation, and the auxiliary function `Phi(x)` of the pancake limit.
//!
//! The eigenvalue condition reads `-sqrt(pi) / a = F(x)` with `x = -E_shift / 2`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::quadrature::{integrate_semi_infinite, sum_with_tail};
use crate::specfun::{digamma, gamma_ratio, half_ratio, half_ratio_near_pole, hurwitz_zeta_eval, RATIO_ASYMPTOTIC};
use crate::units::{SpectralFunctionResult, Strategy, TrapGeometry};

const SQRT_PI: f64 = 1.772_453_850_905_516;
/// Smallest argument `x + N eta` handed to the asymptotic tail of the series.
const SERIES_SHIFT: f64 = 20.0;
const SERIES_MAX_TERMS: f64 = 1e6;
/// Integer or reciprocal-integer anisotropies are recognised up to this order.
const CLOSED_FORM_MAX_ORDER: f64 = 1000.0;

/// Evaluation settings shared by every representation of `F`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FContext {
    pub trap: TrapGeometry,
    pub strategy_override: Option<Strategy>,
    pub tol: f64,
}

impl FContext {
    pub fn new(trap: TrapGeometry) -> Self {
        Self { trap, strategy_override: None, tol: 1e-10 }
    }

    pub fn with_tol(mut self, tol: f64) -> Result<Self> {
        if !(tol > 0.0) {
            return Err(domain(format!("tolerance must be positive, got {tol}")));
        }
        self.tol = tol;
        Ok(self)
    }

    pub fn with_strategy(mut self, strategy: Strategy) -> Self {
        self.strategy_override = Some(strategy);
        self
    }

    pub fn eta(&self) -> f64 {
        self.trap.eta()
    }
}

/// Which truncation of the cigar-limit formula to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quasi1dOrder {
    Bare,
    PlusRecurrence,
}

/// `ln(sinh(v) / v)` for `v >= 0`, accurate for small `v`.
pub(crate) fn ln_sinhc(v: f64) -> f64 {
    if v < 0.5 {
        let v2 = v * v;
        let r = v2 / 6.0
            * (1.0 + v2 / 20.0 * (1.0 + v2 / 42.0 * (1.0 + v2 / 72.0 * (1.0 + v2 / 110.0 * (1.0 + v2 / 156.0)))));
        r.ln_1p()
    } else if v < 20.0 {
        (v.sinh() / v).ln()
    } else {
        v - std::f64::consts::LN_2 - v.ln() + (-(-2.0 * v).exp()).ln_1p()
    }
}

/// Subtracted integrand `eta e^{-xt} / (sqrt(1-e^-t)(1-e^{-eta t})) - t^{-3/2}`.
fn subtracted_integrand(x: f64, eta: f64, t: f64) -> f64 {
    let ln_a = -x * t + 0.25 * t - 0.5 * ln_sinhc(0.5 * t) + 0.5 * eta * t - ln_sinhc(0.5 * eta * t);
    ln_a.exp_m1() / (t * t.sqrt())
}

/// `F(x)` for `x > 0` by direct quadrature of the integral representation.
pub fn f_integral(x: f64, ctx: &FContext) -> Result<SpectralFunctionResult> {
    if !(x > 0.0) {
        return Err(domain(format!(
            "integral representation needs x > 0 (bound states), got {x}; use f_series or f_recurrence"
        )));
    }
    let eta = ctx.eta();
    let q = integrate_semi_infinite(|t| subtracted_integrand(x, eta, t), x.min(1.0), ctx.tol)?;
    Ok(SpectralFunctionResult { value: q.value, strategy: Strategy::Integral, abs_err_estimate: q.abs_err })
}

/// `F` at `x = -(n0 eta + j0) + delta`, with the offset from that pole kept exact.
///
/// Terms of the head sum that sit at the same pole are evaluated from `delta`
/// directly, so the result keeps full relative accuracy however small `delta` is.
pub fn f_series_anchored(n0: u64, j0: u64, delta: f64, ctx: &FContext) -> Result<SpectralFunctionResult> {
    let eta = ctx.eta();
    let (n0f, j0f) = (n0 as f64, j0 as f64);
    let x = -(n0f * eta + j0f) + delta;
    let n_head = ((SERIES_SHIFT - x) / eta).ceil().max(0.0);
    if n_head > SERIES_MAX_TERMS {
        return Err(Error::Convergence { what: "f_series head sum", partial: f64::NAN, err: f64::INFINITY });
    }
    let n_head = n_head as u64;
    let mut head = 0.0;
    let mut magnitude = 0.0;
    for n in 0..n_head {
        let base = (n as f64 - n0f) * eta - j0f;
        let j = (-base).round();
        let d = (base + j) + delta;
        let r = if j >= 0.0 && (base + j).abs() < 1e-6 && d.abs() < 0.25 {
            if d == 0.0 {
                return Err(Error::Pole { at: x });
            }
            half_ratio_near_pole(j as u64, d)
        } else {
            let y = base + delta;
            if y <= 0.0 && y == y.floor() {
                return Err(Error::Pole { at: x });
            }
            half_ratio(y)
        };
        head += r;
        magnitude += r.abs();
    }
    head *= eta * SQRT_PI;
    magnitude *= eta * SQRT_PI;

    let a = (n_head as f64 - n0f) - j0f / eta + delta / eta;
    let mut tail = 0.0;
    let mut tail_err = 0.0;
    for (j, c) in RATIO_ASYMPTOTIC.iter().enumerate() {
        let s = 0.5 + j as f64;
        let z = hurwitz_zeta_eval(s, a)?;
        let scale = SQRT_PI * c * eta.powf(0.5 - j as f64);
        tail += scale * z.value;
        tail_err += (scale * z.abs_err).abs();
        if j + 1 == RATIO_ASYMPTOTIC.len() {
            tail_err += (scale * z.value).abs();
        }
    }
    let value = head + tail;
    let abs_err = tail_err + 8.0 * f64::EPSILON * (magnitude + tail.abs() + (n_head as f64).sqrt() * magnitude);
    Ok(SpectralFunctionResult { value, strategy: Strategy::Series, abs_err_estimate: abs_err })
}

/// `F(x)` for any `x` off the pole lattice, by the regularised series.
pub fn f_series(x: f64, ctx: &FContext) -> Result<SpectralFunctionResult> {
    if !x.is_finite() {
        return Err(domain(format!("f_series needs finite x, got {x}")));
    }
    f_series_anchored(0, 0, x, ctx)
}

/// `F(x)` from `F(x + steps eta)` and the finite recurrence sum.
pub fn f_recurrence(x: f64, steps: u32, ctx: &FContext) -> Result<SpectralFunctionResult> {
    let eta = ctx.eta();
    let lifted = x + steps as f64 * eta;
    let base = if lifted > 0.0 { f_integral(lifted, ctx)? } else { f_series(lifted, ctx)? };
    let mut sum = 0.0;
    let mut magnitude = 0.0;
    for k in 0..steps {
        let y = x + k as f64 * eta;
        if y <= 0.0 && y == y.floor() {
            return Err(Error::Pole { at: x });
        }
        let r = half_ratio(y);
        sum += r;
        magnitude += r.abs();
    }
    let value = base.value + eta * SQRT_PI * sum;
    let abs_err = base.abs_err_estimate + 4.0 * f64::EPSILON * eta * SQRT_PI * magnitude;
    Ok(SpectralFunctionResult { value, strategy: Strategy::Recurrence, abs_err_estimate: abs_err })
}

/// Spherical-trap value `-2 sqrt(pi) Gamma(x) / Gamma(x - 1/2)`.
pub fn f_spherical(x: f64) -> Result<f64> {
    if x <= 0.0 && x == x.floor() {
        return Err(Error::Pole { at: x });
    }
    Ok(-2.0 * SQRT_PI * gamma_ratio(x, x - 0.5)?)
}

/// `sum_{m=1}^{n-1} int e^{-xt} / (sqrt(1-e^-t) (1 - w_m e^-t)) dt`, `w_m = e^{2 pi i m/n}`, for `x > 0`.
pub fn cigar_root_sum(x: f64, n: u32, tol: f64) -> Result<Complex64> {
    if !(x > 0.0) {
        return Err(domain(format!("cigar root sum needs x > 0, got {x}")));
    }
    let mut total = Complex64::new(0.0, 0.0);
    for m in 1..n {
        let w = Complex64::from_polar(1.0, 2.0 * PI * m as f64 / n as f64);
        let g = |t: f64| -> Complex64 {
            let e = (-t).exp();
            Complex64::new((-x * t).exp() / (-(-t).exp_m1()).sqrt(), 0.0) / (Complex64::new(1.0, 0.0) - w * e)
        };
        let re = integrate_semi_infinite(|t| g(t).re, x, tol)?;
        let im = integrate_semi_infinite(|t| g(t).im, x, tol)?;
        total += Complex64::new(re.value, im.value);
    }
    Ok(total)
}

/// `F(x)` for the integer anisotropy `eta = n`.
///
/// Arguments `x <= 0` are lifted into `x > 0` with the recurrence.
pub fn f_closed_cigar(x: f64, n: u32) -> Result<SpectralFunctionResult> {
    if n == 0 {
        return Err(domain("cigar order must be positive"));
    }
    let eta = n as f64;
    let tol = 1e-11;
    let mut steps = 0u32;
    let mut lifted = x;
    let mut recur = 0.0;
    while lifted <= 0.5 {
        if lifted <= 0.0 && lifted == lifted.floor() {
            return Err(Error::Pole { at: x });
        }
        recur += half_ratio(lifted);
        lifted += eta;
        steps += 1;
    }
    let roots = cigar_root_sum(lifted, n, tol)?;
    if roots.im.abs() > 1e-9 * roots.re.abs().max(1.0) {
        return Err(Error::Convergence { what: "cigar closed form imaginary residue", partial: roots.re, err: roots.im.abs() });
    }
    let value = f_spherical(lifted)? + roots.re + eta * SQRT_PI * recur;
    let abs_err = 2.0 * (n as f64 - 1.0) * tol + roots.im.abs() + 1e-14 * value.abs();
    let strategy = if steps == 0 { Strategy::ClosedCigar } else { Strategy::Recurrence };
    let strategy = if n == 1 { Strategy::ClosedCigar } else { strategy };
    Ok(SpectralFunctionResult { value, strategy, abs_err_estimate: abs_err })
}

/// `F(x)` for the reciprocal-integer anisotropy `eta = 1/n`.
pub fn f_closed_pancake(x: f64, n: u32) -> Result<SpectralFunctionResult> {
    if n == 0 {
        return Err(domain("pancake order must be positive"));
    }
    let nf = n as f64;
    let mut sum = 0.0;
    let mut magnitude = 0.0;
    for m in 0..n {
        let y = x + m as f64 / nf;
        if y <= 0.0 && y == y.floor() {
            return Err(Error::Pole { at: x });
        }
        let r = gamma_ratio(y, y - 0.5)?;
        sum += r;
        magnitude += r.abs();
    }
    let value = -2.0 * SQRT_PI / nf * sum;
    let abs_err = 1e-14 * 2.0 * SQRT_PI / nf * magnitude;
    Ok(SpectralFunctionResult { value, strategy: Strategy::ClosedPancake, abs_err_estimate: abs_err })
}

/// Cigar-limit approximation of `F`, valid for `eta >> 1`.
pub fn f_quasi1d(x: f64, ctx: &FContext, order: Quasi1dOrder) -> Result<SpectralFunctionResult> {
    let eta = ctx.eta();
    let value = match order {
        Quasi1dOrder::Bare => {
            if !(x > 0.0) {
                return Err(domain(format!("bare quasi-1D form needs x > 0, got {x}")));
            }
            (PI * eta).sqrt() * hurwitz_zeta_eval(0.5, x / eta)?.value
        }
        Quasi1dOrder::PlusRecurrence => {
            if !(x > -eta) {
                return Err(domain(format!("quasi-1D form needs x > -eta, got {x}")));
            }
            if x <= 0.0 && x == x.floor() {
                return Err(Error::Pole { at: x });
            }
            (PI * eta).sqrt() * hurwitz_zeta_eval(0.5, 1.0 + x / eta)?.value + eta * SQRT_PI * half_ratio(x)
        }
    };
    Ok(SpectralFunctionResult { value, strategy: Strategy::Quasi1D, abs_err_estimate: 1e-12 * value.abs().max(1.0) })
}

/// Summand of `Phi` at real index `k >= 1`.
fn phi_term(x: f64, k: f64) -> f64 {
    let y = x + k + 0.5;
    let bracket = if y >= 5.0 {
        let w2 = 0.25 / (y * y);
        let series = w2 * (1.0 / 3.0 + w2 * (1.0 / 5.0 + w2 * (1.0 / 7.0 + w2 * (1.0 / 9.0 + w2 * (1.0 / 11.0 + w2 / 13.0)))));
        x / y - (k + 0.5) / y * series
    } else {
        (k + 0.5) * ((x + k) / (x + k + 1.0)).ln() + 1.0
    };
    half_ratio(k + 0.5) / SQRT_PI * bracket
}

/// `Phi(x)` on its natural domain `x > -1`.
pub fn phi_continued(x: f64) -> Result<f64> {
    if !(x > -1.0) || !x.is_finite() {
        return Err(domain(format!("Phi needs x > -1, got {x}")));
    }
    let cut = 60usize.max((4.0 * x.abs()).ceil() as usize);
    let (sum, _) = sum_with_tail(|k| phi_term(x, k), 1, cut, 1e-14)?;
    Ok(2.0 - x.ln_1p() + 2.0 * sum)
}

/// `Phi(x)` for `x >= 0`.
pub fn phi_eval(x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(domain(format!("phi_eval needs x >= 0, got {x}")));
    }
    phi_continued(x)
}

/// Pancake-limit approximation `-Phi(x) - ln(eta) - psi(x/eta)`, valid for `eta << 1`, `x > -1`.
pub fn f_quasi2d(x: f64, ctx: &FContext) -> Result<SpectralFunctionResult> {
    let eta = ctx.eta();
    let psi = digamma(x / eta).map_err(|_| Error::Pole { at: x })?;
    let value = -phi_continued(x)? - eta.ln() - psi;
    Ok(SpectralFunctionResult { value, strategy: Strategy::Quasi2D, abs_err_estimate: 1e-11 * value.abs().max(1.0) })
}

/// `n` with `eta = n`, when `eta` is a small integer.
pub fn integer_order(eta: f64) -> Option<u32> {
    (eta >= 1.0 && eta <= CLOSED_FORM_MAX_ORDER && eta == eta.round()).then(|| eta as u32)
}

/// `n` with `eta = 1/n`, when that `n` is a small integer.
pub fn reciprocal_order(eta: f64) -> Option<u32> {
    let n = (1.0 / eta).round();
    (n >= 1.0 && n <= CLOSED_FORM_MAX_ORDER && (n * eta - 1.0).abs() < 1e-14).then(|| n as u32)
}

/// `F(x)` by the best exact representation for the trap, or by the requested one.
pub fn f_eval(x: f64, ctx: &FContext) -> Result<SpectralFunctionResult> {
    let eta = ctx.eta();
    match ctx.strategy_override {
        Some(Strategy::Integral) => return f_integral(x, ctx),
        Some(Strategy::Series) => return f_series(x, ctx),
        Some(Strategy::Recurrence) => {
            let steps = if x > 0.0 { 1 } else { (((1.0 - x) / eta).ceil() as u32).max(1) };
            return f_recurrence(x, steps, ctx);
        }
        Some(Strategy::ClosedCigar) => {
            let n = integer_order(eta).ok_or_else(|| domain(format!("cigar closed form needs integer eta, got {eta}")))?;
            return f_closed_cigar(x, n);
        }
        Some(Strategy::ClosedPancake) => {
            let n = reciprocal_order(eta)
                .ok_or_else(|| domain(format!("pancake closed form needs eta = 1/n, got {eta}")))?;
            return f_closed_pancake(x, n);
        }
        Some(Strategy::Quasi1D) => return f_quasi1d(x, ctx, Quasi1dOrder::PlusRecurrence),
        Some(Strategy::Quasi2D) => return f_quasi2d(x, ctx),
        None => {}
    }
    if eta == 1.0 {
        let mut r = f_closed_pancake(x, 1)?;
        r.strategy = Strategy::ClosedCigar;
        return Ok(r);
    }
    if let Some(n) = reciprocal_order(eta) {
        return f_closed_pancake(x, n);
    }
    let mut r = f_series(x, ctx)?;
    if x <= 0.0 {
        r.strategy = Strategy::Recurrence;
    }
    Ok(r)
}

/// `F` as a function of the shifted energy, `G(E_shift) = F(-E_shift / 2)`.
pub fn f_of_energy(e_shift: f64, ctx: &FContext) -> Result<f64> {
    f_eval(-0.5 * e_shift, ctx).map(|r| r.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::Strategy;
    use proptest::prelude::*;

    fn ctx(eta: f64) -> FContext {
        FContext::new(TrapGeometry::new(eta).unwrap())
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn ln_sinhc_branches_join() {
        for v in [0.5f64, 20.0] {
            let lo = ln_sinhc(v * (1.0 - 1e-12));
            let hi = ln_sinhc(v * (1.0 + 1e-12));
            assert!((lo - hi).abs() < 1e-10);
        }
        assert!((ln_sinhc(1e-3) - (1e-3f64.sinh() / 1e-3).ln()).abs() < 1e-15);
    }

    #[test]
    fn integral_spherical() {
        let r = f_integral(1.0, &ctx(1.0)).unwrap();
        assert!((r.value + 2.0).abs() < 1e-10, "{r:?}");
        assert!(r.abs_err_estimate <= 1e-10);
        assert!(f_integral(0.0, &ctx(1.0)).is_err());
    }

    #[test]
    fn integral_matches_closed_forms() {
        let a = f_integral(1.0, &ctx(2.0)).unwrap().value;
        let b = f_closed_cigar(1.0, 2).unwrap().value;
        assert!((a - b).abs() < 1e-9, "{a} {b}");
        let a = f_integral(0.5, &ctx(0.2)).unwrap().value;
        let b = f_closed_pancake(0.5, 5).unwrap().value;
        assert!((a - b).abs() < 1e-9, "{a} {b}");
    }

    #[test]
    fn series_examples() {
        let c = ctx(1.0);
        let f1 = f_series(1.0, &c).unwrap().value;
        let f2 = f_series(2.0, &c).unwrap().value;
        assert!((f1 + 2.0).abs() < 1e-12);
        assert!((f1 - f2 - 2.0).abs() < 1e-12);
        let c = ctx(1.1);
        let s = f_series(-0.25, &c).unwrap().value;
        let r = f_recurrence(-0.25, 1, &c).unwrap().value;
        assert!((s - r).abs() < 1e-9, "{s} {r}");
    }

    #[test]
    fn series_normalisation_matches_integral() {
        for &(x, eta) in &[(1.0, 1.0), (0.7, 3.3), (2.5, 0.37), (0.2, 12.0)] {
            let s = f_series(x, &ctx(eta)).unwrap().value;
            let i = f_integral(x, &ctx(eta)).unwrap().value;
            assert!((s - i).abs() < 1e-9, "x={x} eta={eta}: {s} vs {i}");
        }
    }

    #[test]
    fn recurrence_examples() {
        let c = ctx(0.7);
        let r = f_recurrence(-0.3, 2, &c).unwrap().value;
        let s = f_series(-0.3, &c).unwrap().value;
        assert!((r - s).abs() < 1e-9);
        let c = ctx(1.0);
        let r = f_recurrence(-3.2, 5, &c).unwrap().value;
        let s = f_series(-3.2, &c).unwrap().value;
        assert!(r.is_finite() && (r - s).abs() < 1e-9 * s.abs().max(1.0));
        assert!(matches!(f_recurrence(-1.0, 2, &c), Err(Error::Pole { .. })));
    }

    #[test]
    fn closed_cigar_examples() {
        assert!((f_closed_cigar(1.0, 1).unwrap().value + 2.0).abs() < 1e-14);
        let a = f_closed_cigar(2.0, 5).unwrap().value;
        let b = f_integral(2.0, &ctx(5.0)).unwrap().value;
        assert!((a - b).abs() < 1e-8);
        let roots = cigar_root_sum(0.5, 2, 1e-12).unwrap();
        assert!(roots.im.abs() < 1e-10);
    }

    #[test]
    fn closed_cigar_lifted_below_zero() {
        let a = f_closed_cigar(-0.7, 3).unwrap();
        let b = f_series(-0.7, &ctx(3.0)).unwrap().value;
        assert!((a.value - b).abs() < 1e-9);
        assert_eq!(a.strategy, Strategy::Recurrence);
    }

    #[test]
    fn closed_pancake_examples() {
        assert!((f_closed_pancake(1.0, 1).unwrap().value + 2.0).abs() < 1e-14);
        let a = f_closed_pancake(1.3, 5).unwrap().value;
        let b = f_integral(1.3, &ctx(0.2)).unwrap().value;
        assert!((a - b).abs() < 1e-9);
        let a = f_closed_pancake(0.75, 2).unwrap().value;
        let b = f_series(0.75, &ctx(0.5)).unwrap().value;
        assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn quasi1d_accuracy() {
        let c = ctx(100.0);
        let exact = f_series(100.0, &c).unwrap().value;
        let bare = f_quasi1d(100.0, &c, Quasi1dOrder::Bare).unwrap().value;
        // the dropped eta^(-1/2) term leaves 2.2e-3 here; it falls to 1e-3 near eta = 220
        assert!(((bare - exact) / exact).abs() < 2.5e-3, "{bare} {exact}");
        let c = ctx(400.0);
        let exact = f_series(400.0, &c).unwrap().value;
        let bare = f_quasi1d(400.0, &c, Quasi1dOrder::Bare).unwrap().value;
        assert!(((bare - exact) / exact).abs() < 1e-3);
        let c = ctx(100.0);
        let exact = f_series(5.0, &c).unwrap().value;
        let plus = f_quasi1d(5.0, &c, Quasi1dOrder::PlusRecurrence).unwrap().value;
        assert!(((plus - exact) / exact).abs() < 1.5e-3, "{plus} {exact}");
        let small = f_quasi1d(1e-8, &c, Quasi1dOrder::PlusRecurrence).unwrap().value;
        assert!(small > 1e9);
    }

    #[test]
    fn phi_values() {
        let p0 = phi_eval(0.0).unwrap();
        assert!((p0 - 1.938).abs() < 1e-3);
        assert!((p0 - 1.937_789_783_74).abs() < 1e-10, "{p0}");
        assert!((phi_eval(1.0).unwrap() - 3.095_877_626_64).abs() < 1e-10);
        assert!(phi_eval(-0.1).is_err());
        assert!(phi_continued(-0.5).unwrap().is_finite());
    }

    #[test]
    fn phi_against_beta_integral() {
        // -Phi(x) - ln x = int_0^1 B(x + t, -1/2) dt at x = 1, with B(p, -1/2) = Gamma(p) Gamma(-1/2) / Gamma(p - 1/2)
        let rule = crate::quadrature::gauss_legendre(40);
        let b = |t: f64| -2.0 * SQRT_PI * gamma_ratio(1.0 + t, 0.5 + t).unwrap();
        let integral = crate::quadrature::integrate_gl(b, 0.0, 1.0, &rule);
        assert!((integral + phi_eval(1.0).unwrap()).abs() < 1e-8, "{integral}");
    }

    #[test]
    fn quasi2d_accuracy() {
        let c = ctx(0.01);
        let exact = f_closed_pancake(1.0, 100).unwrap().value;
        let q = f_quasi2d(1.0, &c).unwrap().value;
        // the pancake limit is off by -eta/2 at this point
        assert!(((q - exact) / exact).abs() < 2e-3, "{q} {exact}");
        assert!((q - exact + 0.5 * 0.01).abs() < 1e-5);
        let c = ctx(0.1);
        let exact = f_integral(0.5, &c).unwrap().value;
        let q = f_quasi2d(0.5, &c).unwrap().value;
        assert!(((q - exact) / exact).abs() < 4e-2, "{q} {exact}");
        let exact = f_integral(3.0, &c).unwrap().value;
        let q = f_quasi2d(3.0, &c).unwrap().value;
        assert!(((q - exact) / exact).abs() < 1e-2, "{q} {exact}");
        // psi(z) ~ -1/z: the pole term is positive just above x = 0
        assert!(f_quasi2d(1e-6, &ctx(0.01)).unwrap().value > 1e3);
    }

    #[test]
    fn dispatcher() {
        let r = f_eval(1.0, &ctx(1.0)).unwrap();
        assert!((r.value + 2.0).abs() < 1e-14);
        assert_eq!(r.strategy, Strategy::ClosedCigar);
        assert!(f_eval(-0.5, &ctx(1.0)).unwrap().value.abs() < 1e-14);
        let r = f_eval(-1.0 + 1e-6, &ctx(1.0)).unwrap();
        assert!(r.value.abs() > 1e5);
        let r = f_eval(-1.3 + 1e-6, &ctx(1.3)).unwrap();
        assert_eq!(r.strategy, Strategy::Recurrence);
        assert!(r.value.abs() > 1e5);
        assert!(matches!(f_eval(-2.0, &ctx(1.3)), Err(Error::Pole { .. })));
    }

    #[test]
    fn anchored_series_near_merged_pole() {
        // eta = 1/2: x = -1 is hit by (n, j) = (2, 0) and (0, 1)
        let c = ctx(0.5);
        for d in [1.0 / 1024.0, 2f64.powi(-24), -(2f64.powi(-30))] {
            let a = f_series_anchored(0, 1, d, &c).unwrap().value;
            let b = f_closed_pancake(-1.0 + d, 2).unwrap().value;
            assert!(close(a, b, 1e-9), "{d}: {a} {b}");
        }
        // anchored offsets below the spacing of doubles near the pole stay finite and signed
        let up = f_series_anchored(3, 2, 1e-14, &ctx(1.7)).unwrap().value;
        let dn = f_series_anchored(3, 2, -1e-14, &ctx(1.7)).unwrap().value;
        assert!(up.is_finite() && dn.is_finite() && up * dn < 0.0);
    }

    #[test]
    fn strategies_agree_pairwise() {
        for &x in &[0.3, 1.0, 2.7] {
            for n in 1..=4u32 {
                let eta = n as f64;
                let i = f_integral(x, &ctx(eta)).unwrap().value;
                let s = f_series(x, &ctx(eta)).unwrap().value;
                let c = f_closed_cigar(x, n).unwrap().value;
                assert!((i - s).abs() < 1e-8 && (s - c).abs() < 1e-8, "x={x} n={n}");
                let eta = 1.0 / n as f64;
                let i = f_integral(x, &ctx(eta)).unwrap().value;
                let s = f_series(x, &ctx(eta)).unwrap().value;
                let p = f_closed_pancake(x, n).unwrap().value;
                assert!((i - s).abs() < 1e-8 && (s - p).abs() < 1e-8, "x={x} 1/n={n}");
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]
        #[test]
        fn recurrence_identity(x in -6.0f64..6.0, eta in 0.05f64..20.0) {
            let c = ctx(eta);
            let a = f_eval(x, &c);
            let b = f_eval(x + eta, &c);
            if let (Ok(a), Ok(b)) = (a, b) {
                let r = eta * SQRT_PI * half_ratio(x);
                let lhs = a.value - b.value;
                prop_assert!((lhs - r).abs() <= 1e-9 * r.abs().max(a.value.abs()).max(1.0), "{lhs} {r}");
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn spherical_reduction(x in -5.0f64..5.0) {
            prop_assume!((x - x.round()).abs() > 1e-6 || x > 0.0);
            let v = f_series(x, &ctx(1.0)).unwrap().value;
            let sph = f_spherical(x).unwrap();
            prop_assert!((v - sph).abs() < 1e-9 * sph.abs().max(1.0));
        }

        #[test]
        fn inverse_vanishes_at_poles(n in 0u64..4, j in 0u64..4, eta in 0.3f64..4.0) {
            let c = ctx(eta);
            let near = f_series_anchored(n, j, 1e-10, &c).unwrap().value;
            prop_assert!((1.0 / near).abs() < 1e-6);
        }

        #[test]
        fn cigar_closed_form_is_real(x in 0.05f64..5.0, n in 2u32..=10) {
            let r = cigar_root_sum(x, n, 1e-11).unwrap();
            prop_assert!(r.im.abs() < 1e-9);
        }
    }
}
