use crate::error::{domain, Error, Result};
use crate::specfun::FnEval;

/// B_{2j} / (2j)! for j = 1..=7.
const BERNOULLI_OVER_FACTORIAL: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1_209_600.0,
    1.0 / 47_900_160.0,
    -691.0 / 1_307_674_368_000.0,
    1.0 / 74_724_249_600.0,
];

const SHIFT_TARGET: f64 = 20.0;

/// Euler-Maclaurin tail `sum_{k>=0} (k + b)^-s` for `b >= SHIFT_TARGET`.
fn em_tail(s: f64, b: f64) -> (f64, f64) {
    let bs = b.powf(-s);
    let mut v = b * bs / (s - 1.0) + 0.5 * bs;
    // rising factorial s (s+1) ... (s + 2j - 2) times b^(-s-2j+1)
    let mut rising = s;
    let mut p = bs / b;
    let inv2 = 1.0 / (b * b);
    for (j, c) in BERNOULLI_OVER_FACTORIAL.iter().enumerate().take(6) {
        v += c * rising * p;
        let k = 2.0 * j as f64 + 1.0;
        rising *= (s + k) * (s + k + 1.0);
        p *= inv2;
    }
    let err = (BERNOULLI_OVER_FACTORIAL[6] * rising * p).abs() * 2.0;
    (v, err)
}

/// Hurwitz zeta `sum_{k>=0} (k + a)^-s` for `a > 0`, `s != 1`.
pub fn hurwitz_zeta_eval(s: f64, a: f64) -> Result<FnEval> {
    if s == 1.0 || !s.is_finite() {
        return Err(domain(format!("hurwitz_zeta needs s != 1, got {s}")));
    }
    if !(a > 0.0) {
        return Err(domain(format!("hurwitz_zeta needs a > 0, got {a}")));
    }
    let mut head = 0.0;
    let mut b = a;
    while b < SHIFT_TARGET {
        head += b.powf(-s);
        b += 1.0;
    }
    let (tail, err) = em_tail(s, b);
    Ok(FnEval { value: head + tail, abs_err: err + f64::EPSILON * (head.abs() + tail.abs()) })
}

pub fn hurwitz_zeta(s: f64, a: f64) -> Result<f64> {
    hurwitz_zeta_eval(s, a).map(|e| e.value)
}

/// Hurwitz zeta for integer `s >= 2` continued to negative non-integer `a`.
pub fn hurwitz_zeta_int(s: i32, a: f64) -> Result<f64> {
    if s < 2 {
        return Err(domain("hurwitz_zeta_int needs s >= 2"));
    }
    if a <= 0.0 && a == a.floor() {
        return Err(Error::Pole { at: a });
    }
    let mut head = 0.0;
    let mut b = a;
    while b <= 0.0 {
        head += b.powi(-s);
        b += 1.0;
    }
    Ok(head + hurwitz_zeta(s as f64, b)?)
}
