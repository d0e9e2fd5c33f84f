use crate::error::{domain, Result};
use crate::specfun::gamma::EULER_GAMMA;

const SERIES_MAX: f64 = 2.0;

fn k_integral(nu: f64, x: f64) -> f64 {
    // e^{-x} int_0^inf e^{-2x sinh^2(t/2)} cosh(nu t) dt
    let h = 0.125;
    let mut sum = 0.5;
    let mut k = 1;
    loop {
        let t = k as f64 * h;
        let s = (0.5 * t).sinh();
        let term = (-2.0 * x * s * s).exp() * (nu * t).cosh();
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
        k += 1;
    }
    (-x).exp() * sum * h
}

/// Modified Bessel function `K_0(x)`.
pub fn bessel_k0(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(domain(format!("bessel_k0 needs x > 0, got {x}")));
    }
    if x > SERIES_MAX {
        return Ok(k_integral(0.0, x));
    }
    let q = 0.25 * x * x;
    let (mut term, mut i0, mut tail, mut harmonic) = (1.0, 1.0, 0.0, 0.0);
    for k in 1..60 {
        let kf = k as f64;
        term *= q / (kf * kf);
        harmonic += 1.0 / kf;
        i0 += term;
        tail += term * harmonic;
        if term < 1e-18 {
            break;
        }
    }
    Ok(-((0.5 * x).ln() + EULER_GAMMA) * i0 + tail)
}

/// Modified Bessel function `K_1(x)`.
pub fn bessel_k1(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(domain(format!("bessel_k1 needs x > 0, got {x}")));
    }
    if x > SERIES_MAX {
        return Ok(k_integral(1.0, x));
    }
    let q = 0.25 * x * x;
    // term_k = q^k / (k! (k+1)!)
    let (mut term, mut harmonic) = (1.0, 0.0);
    let mut i1 = 0.0;
    let mut tail = 0.0;
    for k in 0..60 {
        let kf = k as f64;
        if k > 0 {
            term *= q / (kf * (kf + 1.0));
            harmonic += 1.0 / kf;
        }
        i1 += term;
        // psi(k+1) + psi(k+2) = -2 gamma + 2 H_k + 1/(k+1)
        tail += term * (-2.0 * EULER_GAMMA + 2.0 * harmonic + 1.0 / (kf + 1.0));
        if term < 1e-18 {
            break;
        }
    }
    Ok(1.0 / x + (0.5 * x).ln() * 0.5 * x * i1 - 0.25 * x * tail)
}
