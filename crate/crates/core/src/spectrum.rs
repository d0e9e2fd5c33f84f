//! Eigenenergies of the interacting `m = 0` channel and the unperturbed states.
//!
//! In the shifted energy `E` the function `G(E) = F(-E/2)` has poles at the
//! oscillator levels `E = 2(n eta + j)` and rises from `-inf` to `+inf` between
//! consecutive poles, so every branch owns exactly one root of `G(E) = -sqrt(pi)/a`.

use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::fcal::{f_series, f_series_anchored, FContext};
use crate::units::{ShiftedEnergy, TrapGeometry};

const SQRT_PI: f64 = 1.772_453_850_905_516;
const MERGE_REL: f64 = 1e-10;
const MAX_ITER: usize = 200;

/// One distinct pole of `G`, with a representative lattice point `(n, j)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pole {
    /// Shifted energy `2 (n eta + j)`.
    pub energy: f64,
    pub n: u64,
    pub j: u64,
    /// Number of lattice points `(n, j)` merged into this pole.
    pub multiplicity: usize,
}

/// The lowest `count` distinct poles of `G`, ascending.
pub fn pole_lattice(eta: f64, count: usize) -> Vec<Pole> {
    let limit = count as f64 * eta.min(1.0);
    let mut raw = Vec::new();
    let mut n = 0u64;
    while n as f64 * eta <= limit {
        let mut j = 0u64;
        while n as f64 * eta + j as f64 <= limit {
            raw.push((n as f64 * eta + j as f64, n, j));
            j += 1;
        }
        n += 1;
    }
    raw.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut poles: Vec<Pole> = Vec::new();
    for (v, n, j) in raw {
        match poles.last_mut() {
            Some(p) if (2.0 * v - p.energy).abs() <= MERGE_REL * p.energy.max(1.0) => p.multiplicity += 1,
            _ => poles.push(Pole { energy: 2.0 * v, n, j, multiplicity: 1 }),
        }
    }
    poles.truncate(count);
    poles
}

/// A solved root with the bracket that identifies its branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenBranch {
    pub index: usize,
    /// Bracket in `x = -E/2`, ascending: `(x at the upper pole, x at the lower pole)`.
    pub bracket: (f64, f64),
    pub energy: ShiftedEnergy,
    /// `|G(E) + sqrt(pi)/a|`, zero for the symbolic `a = 0` limits.
    pub residual: f64,
}

/// Brent's method on `[a, b]` with `f(a)` and `f(b)` of opposite sign.
pub(crate) fn brent<F: FnMut(f64) -> Result<f64>>(mut f: F, mut a: f64, mut b: f64, xtol: f64) -> Result<f64> {
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoRoot(format!("no sign change on [{a}, {b}]")));
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..MAX_ITER {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b)?;
    }
    Err(Error::Convergence { what: "brent root search", partial: b, err: (c - b).abs() })
}

/// Root of `g(s) = 0` on `s in (0, s_max]`, searched in `u = ln s`.
///
/// `rising` says whether `g` increases with `s`. Returns `Ok(None)` when the root
/// is closer to `s = 0` than the smallest positive double.
fn root_from_pole<G: FnMut(f64) -> Result<f64>>(mut g: G, s_max: f64, rising: bool) -> Result<Option<f64>> {
    let at_max = g(s_max)?;
    if at_max == 0.0 {
        return Ok(Some(s_max));
    }
    let wrong_side = |v: f64| if rising { v < 0.0 } else { v > 0.0 };
    if wrong_side(at_max) {
        return Err(Error::NoRoot(format!("target not reached within offset {s_max} of the pole")));
    }
    let mut hi = s_max;
    let mut lo = s_max;
    loop {
        lo *= 1e-4;
        if lo < 1e-300 {
            return Ok(None);
        }
        let v = g(lo)?;
        if v == 0.0 {
            return Ok(Some(lo));
        }
        if wrong_side(v) {
            break;
        }
        hi = lo;
    }
    let u = brent(|u| g(u.exp()), lo.ln(), hi.ln(), 1e-14)?;
    Ok(Some(u.exp()))
}

/// Root of `h` on `(lo, hi)` for `h` rising from `-inf` to `+inf` across the interval.
///
/// `lo` may be `-inf`. Used by the effective low-dimensional models.
pub(crate) fn increasing_root<H: FnMut(f64) -> Result<f64>>(mut h: H, lo: f64, hi: f64, xtol: f64) -> Result<f64> {
    let (a, b) = if lo == f64::NEG_INFINITY {
        let mut step = 1.0;
        let mut b = hi;
        let mut a = hi - step;
        loop {
            if h(a)? < 0.0 {
                break;
            }
            b = a;
            step *= 4.0;
            a = hi - step;
            if step > 1e300 {
                return Err(Error::NoRoot(format!("no root below {hi}")));
            }
        }
        if b == hi {
            let mut off = 0.5 * (hi - a);
            loop {
                let p = hi - off;
                if h(p)? > 0.0 {
                    b = p;
                    break;
                }
                a = p;
                off *= 0.25;
                if off < f64::EPSILON * hi.abs().max(1e-300) {
                    return Ok(hi);
                }
            }
        }
        (a, b)
    } else {
        let half = 0.5 * (hi - lo);
        let mid = lo + half;
        let hm = h(mid)?;
        if hm == 0.0 {
            return Ok(mid);
        }
        let mut off = half;
        if hm > 0.0 {
            loop {
                off *= 0.25;
                let p = lo + off;
                if p <= lo {
                    return Ok(lo);
                }
                if h(p)? < 0.0 {
                    break (p, lo + 4.0 * off);
                }
            }
        } else {
            loop {
                off *= 0.25;
                let p = hi - off;
                if p >= hi {
                    return Ok(hi);
                }
                if h(p)? > 0.0 {
                    break (hi - 4.0 * off, p);
                }
            }
        }
    };
    brent(h, a, b, xtol)
}

fn validate(inv_a: f64, tol: f64) -> Result<()> {
    if inv_a.is_nan() {
        return Err(domain("inverse scattering length is NaN"));
    }
    if !(tol > 0.0) {
        return Err(domain(format!("tolerance must be positive, got {tol}")));
    }
    Ok(())
}

/// Solve branch `branch` (0 = lowest, bound for `a > 0`) at inverse scattering length `inv_a`.
pub fn solve_branch_detailed(inv_a: f64, branch: usize, trap: &TrapGeometry, tol: f64) -> Result<EigenBranch> {
    validate(inv_a, tol)?;
    let ctx = FContext::new(*trap);
    let target = -SQRT_PI * inv_a;
    let poles = pole_lattice(trap.eta(), branch + 1);
    let make = |e: f64, residual: f64, bracket: (f64, f64)| EigenBranch {
        index: branch,
        bracket,
        energy: ShiftedEnergy::new(e, trap),
        residual,
    };

    if branch == 0 {
        let bracket = (0.0, f64::INFINITY);
        if inv_a == f64::INFINITY {
            return Err(Error::NoRoot("the bound state is infinitely deep at a = 0+".into()));
        }
        if inv_a == f64::NEG_INFINITY {
            return Ok(make(0.0, 0.0, bracket));
        }
        // near the pole at zero: E = -s, x = s/2
        let g_near = |s: f64| Ok(f_series_anchored(0, 0, 0.5 * s, &ctx)?.value - target);
        let at_one = g_near(1.0)?;
        if at_one <= 0.0 {
            let s = root_from_pole(g_near, 1.0, false)?;
            let e = s.map_or(0.0, |s| -s);
            let residual = s.map_or(0.0, |s| g_near(s).map(f64::abs).unwrap_or(f64::NAN));
            return Ok(make(e, residual, bracket));
        }
        // deep region: E = -s with s >= 1
        let g_deep = |u: f64| Ok(f_series(0.5 * u.exp(), &ctx)?.value - target);
        let mut hi = 0.0f64;
        loop {
            hi += 2.0f64.ln() * 4.0;
            if hi > 1400.0 {
                return Err(Error::NoRoot("bound state deeper than representable".into()));
            }
            if g_deep(hi)? <= 0.0 {
                break;
            }
        }
        let u = brent(g_deep, 0.0, hi, 1e-14)?;
        let residual = g_deep(u)?.abs();
        return Ok(make(-u.exp(), residual, bracket));
    }

    let lower = poles[branch - 1];
    let upper = poles[branch];
    let bracket = (-0.5 * upper.energy, -0.5 * lower.energy);
    if inv_a == f64::INFINITY {
        return Ok(make(lower.energy, 0.0, bracket));
    }
    if inv_a == f64::NEG_INFINITY {
        return Ok(make(upper.energy, 0.0, bracket));
    }
    let half = 0.5 * (upper.energy - lower.energy);
    // E = lower + s, i.e. x offset -s/2 from the lower pole
    let g_low = |s: f64| Ok(f_series_anchored(lower.n, lower.j, -0.5 * s, &ctx)?.value - target);
    // E = upper - s, i.e. x offset +s/2 from the upper pole
    let g_up = |s: f64| Ok(f_series_anchored(upper.n, upper.j, 0.5 * s, &ctx)?.value - target);
    let mid = g_low(half)?;
    if mid == 0.0 {
        return Ok(make(lower.energy + half, 0.0, bracket));
    }
    let (e, residual) = if mid > 0.0 {
        match root_from_pole(g_low, half, true)? {
            Some(s) => (lower.energy + s, g_low(s)?.abs()),
            None => (lower.energy, 0.0),
        }
    } else {
        match root_from_pole(g_up, half, false)? {
            Some(s) => (upper.energy - s, g_up(s)?.abs()),
            None => (upper.energy, 0.0),
        }
    };
    Ok(make(e, residual, bracket))
}

/// Shifted energy of branch `branch` at inverse scattering length `inv_a`.
pub fn solve_branch(inv_a: f64, branch: usize, trap: &TrapGeometry, tol: f64) -> Result<ShiftedEnergy> {
    let b = solve_branch_detailed(inv_a, branch, trap, tol)?;
    let scale = (SQRT_PI * inv_a).abs().max(1.0);
    if b.residual > tol.max(1e-8) * scale {
        return Err(Error::Convergence { what: "spectrum root residual", partial: b.energy.value, err: b.residual });
    }
    Ok(b.energy)
}

/// One solved grid point of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub energy: ShiftedEnergy,
    pub residual: f64,
}

/// Branch energies over a grid of inverse scattering lengths.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSweep {
    pub inv_a_grid: Vec<f64>,
    /// `branches[b][i]` is branch `b` at `inv_a_grid[i]`; `None` marks a failed solve.
    pub branches: Vec<Vec<Option<SweepPoint>>>,
    pub eta: f64,
}

impl SpectrumSweep {
    pub fn failures(&self) -> usize {
        self.branches.iter().flatten().filter(|p| p.is_none()).count()
    }
}

/// Solve `n_branches` branches on every grid point, in parallel.
///
/// Branch identity comes from the pole brackets, so points need no seeding and
/// failures leave gaps without stopping the sweep.
pub fn sweep_spectrum(inv_a_grid: &[f64], n_branches: usize, trap: &TrapGeometry) -> SpectrumSweep {
    let branches = (0..n_branches)
        .into_par_iter()
        .map(|b| {
            inv_a_grid
                .par_iter()
                .map(|&ia| {
                    solve_branch_detailed(ia, b, trap, 1e-10)
                        .ok()
                        .map(|r| SweepPoint { energy: r.energy, residual: r.residual })
                })
                .collect()
        })
        .collect();
    SpectrumSweep { inv_a_grid: inv_a_grid.to_vec(), branches, eta: trap.eta() }
}

/// An oscillator state of the relative motion that the contact interaction leaves unchanged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnperturbedState {
    pub n: u64,
    pub m: i64,
    pub k: u64,
    /// Total energy `1/2 + k + eta (2n + |m| + 1)`.
    pub energy: f64,
    /// For `m = 0`, even `k`: size of the degenerate multiplet, of which all but one state stay unperturbed.
    pub multiplicity: usize,
}

/// Every unperturbed state with energy at most `e_max`, ascending in energy.
pub fn unperturbed_states(e_max: f64, trap: &TrapGeometry) -> Vec<UnperturbedState> {
    let eta = trap.eta();
    let mut out = Vec::new();
    if !e_max.is_finite() {
        return out;
    }
    let mut m_abs = 0u64;
    loop {
        let base_m = 0.5 + eta * (m_abs as f64 + 1.0);
        if base_m > e_max {
            break;
        }
        let mut n = 0u64;
        while base_m + 2.0 * eta * n as f64 <= e_max {
            let mut k = 0u64;
            loop {
                let energy = base_m + 2.0 * eta * n as f64 + k as f64;
                if energy > e_max {
                    break;
                }
                if m_abs > 0 {
                    for m in [-(m_abs as i64), m_abs as i64] {
                        out.push(UnperturbedState { n, m, k, energy, multiplicity: 1 });
                    }
                } else if k % 2 == 1 {
                    out.push(UnperturbedState { n, m: 0, k, energy, multiplicity: 1 });
                } else {
                    // counted below once the multiplet size is known
                    out.push(UnperturbedState { n, m: 0, k, energy, multiplicity: 0 });
                }
                k += 1;
            }
            n += 1;
        }
        m_abs += 1;
    }
    let even: Vec<f64> = out.iter().filter(|s| s.multiplicity == 0).map(|s| s.energy).collect();
    for s in out.iter_mut().filter(|s| s.multiplicity == 0) {
        s.multiplicity = even.iter().filter(|&&e| (e - s.energy).abs() <= MERGE_REL * e.max(1.0)).count();
    }
    out.retain(|s| !(s.m == 0 && s.k % 2 == 0 && s.multiplicity < 2));
    out.sort_by(|a, b| a.energy.total_cmp(&b.energy).then(a.m.cmp(&b.m)));
    out
}
