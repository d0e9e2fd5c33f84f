use std::f64::consts::PI;

use crate::error::{domain, Error, Result};

pub(crate) const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// B_{2k} / (2k (2k-1)) for the Stirling series.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

/// Coefficients of `sqrt(y) * Gamma(y) / Gamma(y + 1/2)` in powers of `1/y`.
pub(crate) const RATIO_ASYMPTOTIC: [f64; 14] = [
    1.0,
    1.0 / 8.0,
    1.0 / 128.0,
    -5.0 / 1024.0,
    -21.0 / 32768.0,
    399.0 / 262_144.0,
    869.0 / 4_194_304.0,
    -39325.0 / 33_554_432.0,
    -334_477.0 / 2_147_483_648.0,
    28_717_403.0 / 17_179_869_184.0,
    59_697_183.0 / 274_877_906_944.0,
    -8_400_372_435.0 / 2_199_023_255_552.0,
    -34_429_291_905.0 / 70_368_744_177_664.0,
    7_199_255_611_995.0 / 562_949_953_421_312.0,
];

/// `sin(pi x)` with exact argument reduction.
pub fn sinpi(x: f64) -> f64 {
    let r = x - 2.0 * (0.5 * x).round();
    if r > 0.5 {
        (PI * (1.0 - r)).sin()
    } else if r < -0.5 {
        -(PI * (1.0 + r)).sin()
    } else {
        (PI * r).sin()
    }
}

/// `cos(pi x)` with exact argument reduction.
pub fn cospi(x: f64) -> f64 {
    let r = (x - 2.0 * (0.5 * x).round()).abs();
    (PI * (0.5 - r)).sin()
}

pub fn tanpi(x: f64) -> f64 {
    sinpi(x) / cospi(x)
}

pub(crate) fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

fn ln_gamma_positive(x: f64) -> f64 {
    if x >= 10.0 {
        let inv = 1.0 / x;
        let inv2 = inv * inv;
        let mut corr = 0.0;
        let mut p = inv;
        for c in STIRLING {
            corr += c * p;
            p *= inv2;
        }
        (x - 0.5) * x.ln() - x + LN_SQRT_2PI + corr
    } else if x < 0.5 {
        // keep Lanczos in its accurate range
        ln_gamma_positive(x + 1.0) - x.ln()
    } else {
        let z = x - 1.0;
        let mut acc = LANCZOS[0];
        for (i, c) in LANCZOS.iter().enumerate().skip(1) {
            acc += c / (z + i as f64);
        }
        let t = z + LANCZOS_G + 0.5;
        LN_SQRT_2PI + (z + 0.5) * t.ln() - t + acc.ln()
    }
}

/// `(ln|Gamma(x)|, sign Gamma(x))`; `+inf` at the poles.
pub fn ln_gamma_signed(x: f64) -> (f64, f64) {
    if is_nonpositive_integer(x) {
        return (f64::INFINITY, 1.0);
    }
    if x > 0.0 {
        return (ln_gamma_positive(x), 1.0);
    }
    let s = sinpi(x);
    let lg = PI.ln() - s.abs().ln() - ln_gamma_positive(1.0 - x);
    (lg, s.signum())
}

pub fn ln_gamma(x: f64) -> f64 {
    ln_gamma_signed(x).0
}

pub fn gamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        return f64::NAN;
    }
    let (l, s) = ln_gamma_signed(x);
    s * l.exp()
}

/// `ln Gamma(x) - ln Gamma(y)` for `x, y >= 10`, without cancellation when close.
fn ln_gamma_diff_large(x: f64, y: f64) -> f64 {
    let d = x - y;
    let mut corr = 0.0;
    let (ix, iy) = (1.0 / x, 1.0 / y);
    let (mut px, mut py) = (ix, iy);
    for c in STIRLING {
        corr += c * (px - py);
        px *= ix * ix;
        py *= iy * iy;
    }
    d * x.ln() + (y - 0.5) * (d / y).ln_1p() - d + corr
}

/// `Gamma(x) / Gamma(y)` in log space with sign tracking.
pub fn gamma_ratio(x: f64, y: f64) -> Result<f64> {
    let px = is_nonpositive_integer(x);
    let py = is_nonpositive_integer(y);
    match (px, py) {
        (true, true) => {
            // common-shift limit of Gamma(-n + e) / Gamma(-m + e)
            let (n, m) = (-x, -y);
            let sign = if (n - m) as i64 % 2 == 0 { 1.0 } else { -1.0 };
            let v = ln_gamma_positive(m + 1.0) - ln_gamma_positive(n + 1.0);
            if v.is_nan() {
                return Err(domain("indeterminate gamma ratio"));
            }
            Ok(sign * v.exp())
        }
        (true, false) => Ok(f64::INFINITY * ln_gamma_signed(y).1),
        (false, true) => Ok(0.0),
        (false, false) => {
            if x >= 10.0 && y >= 10.0 {
                return Ok(ln_gamma_diff_large(x, y).exp());
            }
            let (lx, sx) = ln_gamma_signed(x);
            let (ly, sy) = ln_gamma_signed(y);
            Ok(sx * sy * (lx - ly).exp())
        }
    }
}

/// `Gamma(y) / Gamma(y + 1/2)`; infinite at the poles of `Gamma(y)`.
pub fn half_ratio(y: f64) -> f64 {
    if y >= 20.0 {
        let inv = 1.0 / y;
        let mut s = 0.0;
        for c in RATIO_ASYMPTOTIC.iter().rev() {
            s = s * inv + c;
        }
        return s / y.sqrt();
    }
    if y > 0.0 {
        let n = (20.0 - y).ceil();
        let mut v = half_ratio(y + n);
        let mut k = n - 1.0;
        while k >= 0.0 {
            v *= (y + k + 0.5) / (y + k);
            k -= 1.0;
        }
        return v;
    }
    if is_nonpositive_integer(y) {
        return f64::INFINITY;
    }
    half_ratio(0.5 - y) / tanpi(y)
}

/// `Gamma(-j + d) / Gamma(-j + d + 1/2)` evaluated from the offset `d` itself.
pub fn half_ratio_near_pole(j: u64, d: f64) -> f64 {
    half_ratio(0.5 + j as f64 - d) / tanpi(d)
}

/// Digamma function; `Pole` at nonpositive integers.
pub fn digamma(x: f64) -> Result<f64> {
    if is_nonpositive_integer(x) {
        return Err(Error::Pole { at: x });
    }
    if x < 0.0 {
        return Ok(digamma(1.0 - x)? - PI / tanpi(x));
    }
    let mut acc = 0.0;
    let mut y = x;
    while y < 10.0 {
        acc -= 1.0 / y;
        y += 1.0;
    }
    let inv2 = 1.0 / (y * y);
    let tail = inv2
        * (1.0 / 12.0
            - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0 - inv2 * (691.0 / 32760.0 - inv2 / 12.0))))));
    Ok(acc + y.ln() - 0.5 / y - tail)
}

/// `[psi((x+1)/2) - psi(x/2)] / 2`, the alternating sum of `1/(x+k)`.
pub fn beta_psi(x: f64) -> Result<f64> {
    if x >= 25.0 {
        // 1/(2x) + sum_n (4^n - 1) B_{2n} / (2n) x^{-2n}
        const C: [f64; 7] = [0.25, -0.125, 0.25, -17.0 / 16.0, 31.0 / 4.0, -4095.0 * 691.0 / (2730.0 * 12.0), 16383.0 * 7.0 / (6.0 * 14.0)];
        let inv2 = 1.0 / (x * x);
        let tail = C.iter().rev().fold(0.0, |acc, c| (acc + c) * inv2);
        return Ok(0.5 / x + tail);
    }
    let a = digamma(0.5 * (x + 1.0)).map_err(|_| Error::Domain(format!("beta_psi pole at {x}")))?;
    let b = digamma(0.5 * x).map_err(|_| Error::Domain(format!("beta_psi pole at {x}")))?;
    Ok(0.5 * (a - b))
}
