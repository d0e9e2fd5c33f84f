//! Second-kind Kummer function through `W(a, b, x) = Gamma(a) U(a, b, x)`.
//!
//! For `a >= A_MIN` the integral `int_0^inf e^{-x s} s^{a-1} (1+s)^{b-a-1} ds`
//! is summed by the trapezoidal rule in `u = ln s` around its peak. Smaller
//! `a` is reached by the contiguous relation in `a`, which is stable in the
//! downward direction.

use crate::error::{domain, Error, Result};
use crate::specfun::gamma::{half_ratio, is_nonpositive_integer, ln_gamma_signed};

const A_MIN: f64 = 1.5;
const LOG_CUTOFF: f64 = 45.0;

fn softplus(u: f64) -> f64 {
    if u > 0.0 {
        u + (-u).exp().ln_1p()
    } else {
        u.exp().ln_1p()
    }
}

fn sigmoid(u: f64) -> f64 {
    if u > 0.0 {
        1.0 / (1.0 + (-u).exp())
    } else {
        let e = u.exp();
        e / (1.0 + e)
    }
}

struct Integrand {
    a: f64,
    c: f64,
    x: f64,
}

impl Integrand {
    fn g(&self, u: f64) -> f64 {
        let xs = if self.x == 0.0 { 0.0 } else { self.x * u.exp() };
        self.a * u + self.c * softplus(u) - xs
    }

    fn dg(&self, u: f64) -> f64 {
        let xs = if self.x == 0.0 { 0.0 } else { self.x * u.exp() };
        self.a + self.c * sigmoid(u) - xs
    }

    fn curvature(&self, u: f64) -> f64 {
        let s = sigmoid(u);
        let xs = if self.x == 0.0 { 0.0 } else { self.x * u.exp() };
        -self.c * s * (1.0 - s) + xs
    }
}

/// `ln W(a, b, x)` by the integral; needs `a > max(0, b - 1)` and `x > 0` unless `b < 1`.
fn ln_w_integral(a: f64, b: f64, x: f64) -> f64 {
    let f = Integrand { a, c: b - a - 1.0, x };
    let (mut lo, mut hi) = (-1.0, 1.0);
    while f.dg(lo) <= 0.0 {
        lo *= 2.0;
    }
    while f.dg(hi) >= 0.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f.dg(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 * (1.0 + mid.abs()) {
            break;
        }
    }
    let peak = 0.5 * (lo + hi);
    let gmax = f.g(peak);
    let width = 1.0 / f.curvature(peak).sqrt();
    let mut h = (0.5 * width).min(0.5);

    let mut left = 0usize;
    while f.g(peak - (left as f64 + 1.0) * h) - gmax > -LOG_CUTOFF {
        left += 1;
    }
    let mut right = 0usize;
    while f.g(peak + (right as f64 + 1.0) * h) - gmax > -LOG_CUTOFF {
        right += 1;
    }
    let (u_lo, u_hi) = (peak - (left as f64 + 1.0) * h, peak + (right as f64 + 1.0) * h);

    let mut sum = 0.0;
    let n = left + right + 3;
    for k in 0..n {
        let u = u_lo + k as f64 * h;
        if u > u_hi + 0.5 * h {
            break;
        }
        sum += (f.g(u) - gmax).exp();
    }
    let mut value = sum * h;
    for _ in 0..4 {
        let mut mids = 0.0;
        let mut u = u_lo + 0.5 * h;
        while u < u_hi {
            mids += (f.g(u) - gmax).exp();
            u += h;
        }
        sum += mids;
        h *= 0.5;
        let refined = sum * h;
        let done = (refined - value).abs() <= 4e-15 * refined;
        value = refined;
        if done {
            break;
        }
    }
    gmax + value.ln()
}

/// `Gamma(a) U(a, b, x)` for `x > 0` (or `x = 0` with `b < 1`).
pub fn w_kummer(a: f64, b: f64, x: f64) -> Result<f64> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(domain(format!("Kummer U needs x >= 0, got {x}")));
    }
    if x == 0.0 && b >= 1.0 {
        return Err(domain("Kummer U diverges at x = 0 for b >= 1"));
    }
    if !(b < 2.0) {
        return Err(domain("Kummer engine supports b < 2"));
    }
    if is_nonpositive_integer(a) {
        return Err(Error::Pole { at: a });
    }
    if x == 0.0 {
        // Gamma(a) Gamma(1-b) / Gamma(a-b+1), only b = 1/2 is used here
        if (b - 0.5).abs() < 1e-15 {
            return Ok(std::f64::consts::PI.sqrt() * half_ratio(a));
        }
        let (l1, s1) = ln_gamma_signed(a);
        let (l2, s2) = ln_gamma_signed(1.0 - b);
        let (l3, s3) = ln_gamma_signed(a - b + 1.0);
        return Ok(s1 * s2 * s3 * (l1 + l2 - l3).exp());
    }
    if a >= A_MIN {
        return Ok(ln_w_integral(a, b, x).exp());
    }
    let steps = (A_MIN - a).ceil();
    let top = a + steps;
    let mut w_hi = ln_w_integral(top + 1.0, b, x).exp();
    let mut w = ln_w_integral(top, b, x).exp();
    let mut c = top;
    while c > a + 0.5 {
        // (c-1) W(c-1) + (b - 2c - x) W(c) + (c - b + 1) W(c+1) = 0
        let w_lo = -((b - 2.0 * c - x) * w + (c - b + 1.0) * w_hi) / (c - 1.0);
        w_hi = w;
        w = w_lo;
        c -= 1.0;
    }
    Ok(w)
}

/// `U(a, b, x)` for `x > 0`, any real `a`.
pub fn hyper_u(a: f64, b: f64, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(domain(format!("Kummer U needs x > 0, got {x}")));
    }
    let to_u = |c: f64| -> f64 {
        let (lg, sg) = ln_gamma_signed(c);
        sg * (ln_w_integral(c, b, x) - lg).exp()
    };
    if a >= A_MIN {
        return Ok(to_u(a));
    }
    let steps = (A_MIN - a).ceil();
    let top = a + steps;
    let mut u_hi = to_u(top + 1.0);
    let mut u = to_u(top);
    let mut c = top;
    while c > a + 0.5 {
        // U(c-1) + (b - 2c - x) U(c) + c (c - b + 1) U(c+1) = 0
        let u_lo = -(b - 2.0 * c - x) * u - c * (c - b + 1.0) * u_hi;
        u_hi = u;
        u = u_lo;
        c -= 1.0;
    }
    Ok(u)
}

/// Logarithmic-case Kummer function `U(a, 1, x)`.
pub fn hyper_u_b1(a: f64, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(domain(format!("U(a,1,x) diverges logarithmically at x = {x}")));
    }
    hyper_u(a, 1.0, x)
}

/// Parabolic cylinder function `D_nu(x)` for `x >= 0`.
pub fn parabolic_cylinder_d(nu: f64, x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(domain(format!("parabolic_cylinder_d needs x >= 0, got {x}")));
    }
    let a = -0.5 * nu;
    let pref = (0.5 * nu * std::f64::consts::LN_2 - 0.25 * x * x).exp();
    if x == 0.0 {
        // U(a, 1/2, 0) = sqrt(pi) / Gamma(a + 1/2)
        let (lg, sg) = ln_gamma_signed(a + 0.5);
        if lg.is_infinite() {
            return Ok(0.0);
        }
        return Ok(pref * std::f64::consts::PI.sqrt() * sg * (-lg).exp());
    }
    Ok(pref * hyper_u(a, 0.5, 0.5 * x * x)?)
}
