//! Exp-sinh quadrature on `(0, inf)` with level doubling, plus helpers for
//! slowly decaying sums and fixed Gauss-Legendre rules.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-10;
const MAX_EVALS: usize = 1 << 20;
const U_MAX: f64 = 5.0;
const MAX_LEVEL: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub abs_err: f64,
    pub n_evals: usize,
}

fn node(u: f64, scale: f64) -> (f64, f64) {
    let e = FRAC_PI_2 * u.sinh();
    let t = e.exp() * scale;
    (t, t * FRAC_PI_2 * u.cosh())
}

/// Integral of `f` over `(0, inf)`; `f` is never evaluated at `0`.
///
/// `decay_rate` sets the length scale `1/decay_rate` of the substitution
/// `t = exp(pi/2 sinh u) / decay_rate`.
pub fn integrate_semi_infinite<F: Fn(f64) -> f64>(f: F, decay_rate: f64, tol: f64) -> Result<QuadResult> {
    let scale = 1.0 / decay_rate;
    let mut n_evals = 0usize;
    let eval = |u: f64, n: &mut usize| -> f64 {
        let (t, w) = node(u, scale);
        if t <= 0.0 || !t.is_finite() || w == 0.0 || !w.is_finite() {
            return 0.0;
        }
        *n += 1;
        let v = f(t) * w;
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };

    let mut h = 0.5;
    let mut sum = eval(0.0, &mut n_evals);
    let mut k = 1;
    while k as f64 * h <= U_MAX {
        let u = k as f64 * h;
        sum += eval(u, &mut n_evals) + eval(-u, &mut n_evals);
        k += 1;
    }
    let mut value = sum * h;
    let mut err = f64::INFINITY;
    for level in 1..=MAX_LEVEL {
        let mut k = 1;
        let mut add = 0.0;
        while (k as f64 - 0.5) * h <= U_MAX {
            let u = (k as f64 - 0.5) * h;
            add += eval(u, &mut n_evals) + eval(-u, &mut n_evals);
            k += 1;
        }
        sum += add;
        h *= 0.5;
        let next = sum * h;
        err = (next - value).abs();
        value = next;
        if level >= 3 && err <= tol.max(8.0 * f64::EPSILON * value.abs()) {
            // the error of the refined sum is far below the last difference
            return Ok(QuadResult { value, abs_err: err, n_evals });
        }
        if n_evals > MAX_EVALS {
            break;
        }
    }
    Err(Error::Convergence { what: "exp-sinh quadrature", partial: value, err })
}

/// Integral of `f` over `(a, inf)`.
pub fn integrate_from<F: Fn(f64) -> f64>(f: F, a: f64, decay_rate: f64, tol: f64) -> Result<QuadResult> {
    integrate_semi_infinite(|t| f(a + t), decay_rate, tol)
}

/// `sum_{k >= start} f(k)` for a smooth term decaying at least like `k^-(1+eps)`.
///
/// Terms below `cut` are added directly; the rest is the midpoint
/// Euler-Maclaurin tail `int_{cut-1/2}^inf f + f'(cut-1/2)/24 - 7 f'''(cut-1/2)/5760`.
pub fn sum_with_tail<F: Fn(f64) -> f64>(f: F, start: usize, cut: usize, tol: f64) -> Result<(f64, f64)> {
    let mut head = 0.0;
    for k in start..cut {
        head += f(k as f64);
    }
    let a = cut as f64 - 0.5;
    let integral = integrate_from(&f, a, 1.0 / cut as f64, tol * 1e-2)?;
    let step = 0.01 * a;
    let d1 = (f(a - 2.0 * step) - 8.0 * f(a - step) + 8.0 * f(a + step) - f(a + 2.0 * step)) / (12.0 * step);
    let d3 = (-f(a - 2.0 * step) + 2.0 * f(a - step) - 2.0 * f(a + step) + f(a + 2.0 * step)) / (2.0 * step.powi(3));
    let corr = d1 / 24.0 - 7.0 * d3 / 5760.0;
    let err = integral.abs_err + (7.0 * d3 / 5760.0).abs();
    Ok((head + integral.value + corr, err))
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Gauss-Legendre rule applied on `[a, b]`.
pub fn integrate_gl<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rule: &(Vec<f64>, Vec<f64>)) -> f64 {
    let (c, r) = (0.5 * (a + b), 0.5 * (b - a));
    rule.0.iter().zip(&rule.1).map(|(x, w)| w * f(c + r * x)).sum::<f64>() * r
}
