//! Per-command planning (all keys read and validated) and execution.

use std::f64::consts::PI;

use rayon::prelude::*;
use trapped_pair_core::feshbach::{divergence_locus, sweep_feshbach, FeshbachParams};
use trapped_pair_core::fcal::{f_eval, f_spherical, phi_eval, FContext};
use trapped_pair_core::lowdim::{
    a1d_static, a2d_static, solve_1d, solve_1d_energy_dependent, solve_2d, solve_quasi2d_excited,
};
use trapped_pair_core::specfun::{
    bessel_k0, beta_psi, digamma, gamma, half_ratio, hermite, hurwitz_zeta, hyper_u, laguerre, parabolic_cylinder_d,
};
use trapped_pair_core::spectrum::{solve_branch_detailed, sweep_spectrum};
use trapped_pair_core::units::constants::{ATOMIC_MASS_UNIT, BOHR_MAGNETON, BOHR_RADIUS, RB87_MASS_U};
use trapped_pair_core::wavefun::{
    norm_axial, norm_radial, psi_eval, psi_q1d_bound, psi_q1d_excited, psi_q2d_bound, psi_q2d_excited,
};
use trapped_pair_core::{ShiftedEnergy, TrapGeometry};

use crate::config::{bad, Config};
use crate::error::CliError;
use crate::output::{Cell, Table};

/// A validated run, ready to execute.
pub type Job = Box<dyn FnOnce() -> Result<Table, CliError> + Send>;

pub const COMMANDS: [&str; 5] = ["spectrum", "wavefunction", "lowdim-compare", "feshbach", "specfun-check"];

pub fn plan(command: &str, cfg: &Config) -> Result<Job, CliError> {
    match command {
        "spectrum" => plan_spectrum(cfg),
        "wavefunction" => plan_wavefunction(cfg),
        "lowdim-compare" => plan_lowdim(cfg),
        "feshbach" => plan_feshbach(cfg),
        "specfun-check" => Ok(Box::new(|| Ok(specfun_check()))),
        other => Err(bad("command", format!("unknown command `{other}`; expected one of {}", COMMANDS.join(", ")))),
    }
}

fn trap(cfg: &Config) -> Result<TrapGeometry, CliError> {
    let eta = cfg.f64("trap.eta")?;
    TrapGeometry::new(eta).map_err(|e| bad("trap.eta", e.to_string()))
}

fn tolerance(cfg: &Config, default: f64) -> Result<f64, CliError> {
    let tol = cfg.f64_or("solver.tol", default)?;
    if !(tol > 0.0 && tol < 1.0) {
        return Err(bad("solver.tol", format!("must lie in (0, 1), got {tol}")));
    }
    Ok(tol)
}

fn nan_if_err<T>(r: &Result<T, trapped_pair_core::Error>, f: impl Fn(&T) -> f64) -> f64 {
    r.as_ref().map_or(f64::NAN, f)
}

fn plan_spectrum(cfg: &Config) -> Result<Job, CliError> {
    let etas = cfg.list("trap.eta")?.ok_or_else(|| bad("trap.eta", "required key is missing".into()))?;
    let traps = etas
        .iter()
        .map(|&eta| TrapGeometry::new(eta).map_err(|e| bad("trap.eta", e.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    let grid = cfg.grid("sweep.inv_a")?.0;
    let n_branches = cfg.usize_or("spectrum.branches", 6)?;
    Ok(Box::new(move || {
        let several = traps.len() > 1;
        let mut cols = vec!["inv_a", "branch", "E_total", "E_shifted", "residual"];
        if several {
            cols.insert(0, "eta");
        }
        let mut table = Table::new(&cols);
        for trap in &traps {
            let sweep = sweep_spectrum(&grid, n_branches, trap);
            for (b, points) in sweep.branches.iter().enumerate() {
                for (&ia, p) in grid.iter().zip(points) {
                    let (total, shifted, residual) = match p {
                        Some(p) => (p.energy.total(), p.energy.value, p.residual),
                        None => {
                            table.gaps += 1;
                            (f64::NAN, f64::NAN, f64::NAN)
                        }
                    };
                    let mut row = vec![Cell::Num(ia), Cell::Int(b as i64), Cell::Num(total), Cell::Num(shifted), Cell::Num(residual)];
                    if several {
                        row.insert(0, Cell::Num(trap.eta()));
                    }
                    table.push(row);
                }
            }
        }
        Ok(table)
    }))
}

#[derive(Clone, Copy, PartialEq)]
enum Model {
    None,
    Q1D,
    Q2D,
}

fn plan_wavefunction(cfg: &Config) -> Result<Job, CliError> {
    let trap = trap(cfg)?;
    let inv_a = cfg.f64_or("state.inv_a", 0.0)?;
    let branch = cfg.usize_or("state.branch", 0)?;
    let tol = tolerance(cfg, 1e-10)?;
    let normalize = cfg.bool_or("wavefunction.normalize", true)?;
    let model = match cfg.string_or("wavefunction.model", "none").as_str() {
        "none" => Model::None,
        "q1d" => Model::Q1D,
        "q2d" => Model::Q2D,
        other => return Err(bad("wavefunction.model", format!("expected none, q1d or q2d, got `{other}`"))),
    };
    let axial_cuts = cfg.list("grid.axial_cuts.rho")?;
    let radial_cuts = cfg.list("grid.radial_cuts.z")?;
    let points: Vec<(f64, f64)> = if axial_cuts.is_none() && radial_cuts.is_none() {
        let rhos = cfg.grid("grid.rho")?.0;
        let zs = cfg.grid("grid.z")?.0;
        rhos.iter().flat_map(|&r| zs.iter().map(move |&z| (r, z))).collect()
    } else {
        let mut pts = Vec::new();
        if let Some(rhos) = axial_cuts {
            let zs = cfg.grid("grid.z")?.0;
            pts.extend(rhos.iter().flat_map(|&r| zs.iter().map(move |&z| (r, z))));
        }
        if let Some(zs) = radial_cuts {
            let rhos = cfg.grid("grid.rho")?.0;
            pts.extend(zs.iter().flat_map(|&z| rhos.iter().map(move |&r| (r, z))));
        }
        pts
    };
    if let Some(&(r, z)) = points.iter().find(|(r, z)| *r < 0.0 || !r.is_finite() || !z.is_finite()) {
        return Err(bad("grid.rho", format!("points need finite rho >= 0 and z, got ({r}, {z})")));
    }
    Ok(Box::new(move || {
        let state = solve_branch_detailed(inv_a, branch, &trap, 1e-13)?;
        let energy = state.energy;
        let factor = if normalize {
            let norm = if trap.eta() >= 1.0 { norm_axial(energy, &trap, 1e-10)? } else { norm_radial(energy, &trap, 1e-10)? };
            norm.factor()
        } else {
            1.0
        };
        let mut cols = vec!["rho", "z", "psi", "r_psi", "residual"];
        if model != Model::None {
            cols.push("psi_model");
        }
        let mut table = Table::new(&cols);
        let values: Vec<(f64, Option<f64>)> = points
            .par_iter()
            .map(|&(rho, z)| {
                let exact = psi_eval(energy, rho, z, &trap, tol).map(|p| p.value * factor).unwrap_or(f64::NAN);
                let approx = match model {
                    Model::None => None,
                    Model::Q1D => Some(q1d(energy, rho, z, &trap, tol).map_or(f64::NAN, |v| v * factor)),
                    Model::Q2D => Some(q2d(energy, rho, z, &trap, tol).map_or(f64::NAN, |v| v * factor)),
                };
                (exact, approx)
            })
            .collect();
        for (&(rho, z), (psi, approx)) in points.iter().zip(values) {
            if psi.is_nan() {
                table.gaps += 1;
            }
            let r = rho.hypot(z);
            let mut row = vec![Cell::Num(rho), Cell::Num(z), Cell::Num(psi), Cell::Num(r * psi), Cell::Num(state.residual)];
            if let Some(v) = approx {
                row.push(Cell::Num(v));
            }
            table.push(row);
        }
        Ok(table)
    }))
}

fn q1d(energy: ShiftedEnergy, rho: f64, z: f64, trap: &TrapGeometry, tol: f64) -> trapped_pair_core::Result<f64> {
    if energy.is_bound() {
        psi_q1d_bound(energy, rho, z, trap, tol).map(|p| p.value)
    } else {
        psi_q1d_excited(energy, rho, z, trap).map(|p| p.value)
    }
}

fn q2d(energy: ShiftedEnergy, rho: f64, z: f64, trap: &TrapGeometry, tol: f64) -> trapped_pair_core::Result<f64> {
    if energy.is_bound() {
        psi_q2d_bound(energy, rho, z, trap, tol).map(|p| p.value)
    } else {
        psi_q2d_excited(energy, rho, z, trap).map(|p| p.value)
    }
}

fn plan_lowdim(cfg: &Config) -> Result<Job, CliError> {
    let trap = trap(cfg)?;
    let grid = cfg.grid("sweep.inv_a")?.0;
    let n_branches = cfg.usize_or("lowdim.branches", 3)?;
    let tol = tolerance(cfg, 1e-12)?;
    let model = match cfg.string_or("lowdim.model", "auto").as_str() {
        "auto" if trap.eta() >= 1.0 => Model::Q1D,
        "auto" => Model::Q2D,
        "q1d" => Model::Q1D,
        "q2d" => Model::Q2D,
        other => return Err(bad("lowdim.model", format!("expected auto, q1d or q2d, got `{other}`"))),
    };
    Ok(Box::new(move || {
        let mut table = Table::new(&["inv_a", "branch", "E_exact", "E_model", "E_model_static", "residual"]);
        let rows: Vec<Vec<[f64; 4]>> = grid
            .par_iter()
            .map(|&ia| {
                let (dependent, static_levels) = match model {
                    Model::Q1D => {
                        let dep: Vec<f64> = (0..n_branches)
                            .map(|b| nan_if_err(&solve_1d_energy_dependent(ia, b, &trap, tol), |e| e.value))
                            .collect();
                        (dep, solve_1d(&a1d_static(ia, &trap), n_branches + 1, tol).unwrap_or_default())
                    }
                    _ => {
                        let mut dep = vec![f64::NAN; n_branches];
                        for l in solve_quasi2d_excited(ia, &trap, n_branches, tol).unwrap_or_default() {
                            if l.branch < n_branches {
                                dep[l.branch] = l.energy.value;
                            }
                        }
                        (dep, solve_2d(&a2d_static(ia), &trap, n_branches, tol).unwrap_or_default())
                    }
                };
                (0..n_branches)
                    .map(|b| {
                        let exact = solve_branch_detailed(ia, b, &trap, 1e-12);
                        let stat = static_levels.iter().find(|l| l.branch == b).map_or(f64::NAN, |l| l.energy.value);
                        [nan_if_err(&exact, |r| r.energy.value), dependent[b], stat, nan_if_err(&exact, |r| r.residual)]
                    })
                    .collect()
            })
            .collect();
        for b in 0..n_branches {
            for (&ia, per_b) in grid.iter().zip(&rows) {
                let [exact, dep, stat, residual] = per_b[b];
                if exact.is_nan() {
                    table.gaps += 1;
                }
                table.push(vec![Cell::Num(ia), Cell::Int(b as i64), Cell::Num(exact), Cell::Num(dep), Cell::Num(stat), Cell::Num(residual)]);
            }
        }
        Ok(table)
    }))
}

fn feshbach_setup(cfg: &Config) -> Result<(TrapGeometry, FeshbachParams), CliError> {
    let eta = cfg.f64("trap.eta")?;
    let delta_b = cfg.f64("feshbach.delta_b_mt")? * 1e-3;
    let b0 = cfg.f64("feshbach.b0_mt")? * 1e-3;
    match cfg.string_or("feshbach.units", "lab").as_str() {
        "lab" => {
            let f_z = cfg.f64("trap.f_z_khz")? * 1e3;
            let mass = cfg.f64_or("feshbach.mass_u", RB87_MASS_U)? * ATOMIC_MASS_UNIT;
            let trap = TrapGeometry::with_physical(eta, 2.0 * PI * f_z, 0.5 * mass).map_err(|e| bad("trap.f_z_khz", e.to_string()))?;
            let a_bg = match (cfg.opt_f64("feshbach.a_bg_a0")?, cfg.opt_f64("feshbach.a_bg_nm")?) {
                (Some(a0), None) => a0 * BOHR_RADIUS,
                (None, Some(nm)) => nm * 1e-9,
                (Some(_), Some(_)) => return Err(bad("feshbach.a_bg_nm", "give either a_bg_a0 or a_bg_nm, not both".into())),
                (None, None) => return Err(bad("feshbach.a_bg_a0", "required key is missing".into())),
            };
            let slope = cfg.f64("feshbach.em_slope_mub")? * BOHR_MAGNETON;
            let params = FeshbachParams::from_si(a_bg, delta_b, b0, slope, &trap).map_err(|e| bad("feshbach", e.to_string()))?;
            Ok((trap, params))
        }
        "trap" => {
            let trap = TrapGeometry::new(eta).map_err(|e| bad("trap.eta", e.to_string()))?;
            let a_bg = cfg.f64("feshbach.a_bg")?;
            let slope = cfg.f64("feshbach.em_slope")? * 1e3;
            let e_b = cfg.f64_or("feshbach.e_b", 0.5 / (a_bg * a_bg))?;
            let params = FeshbachParams::new(a_bg, delta_b, b0, slope, e_b).map_err(|e| bad("feshbach", e.to_string()))?;
            Ok((trap, params))
        }
        other => Err(bad("feshbach.units", format!("expected lab or trap, got `{other}`"))),
    }
}

fn plan_feshbach(cfg: &Config) -> Result<Job, CliError> {
    let (trap, params) = feshbach_setup(cfg)?;
    let grid_mt = cfg.grid("sweep.b_mt")?.0;
    if grid_mt.iter().any(|b| !b.is_finite()) {
        return Err(bad("sweep.b_mt.values", "fields must be finite".into()));
    }
    let n_branches = cfg.usize_or("feshbach.branches", 6)?;
    Ok(Box::new(move || {
        let grid_t: Vec<f64> = grid_mt.iter().map(|b| b * 1e-3).collect();
        let sweep = sweep_feshbach(&params, &trap, &grid_t, n_branches);
        let mut table = Table::new(&["B", "branch", "E", "a_eff", "is_divergence_locus", "residual"]);
        for (k, levels) in sweep.branches.iter().enumerate() {
            for (&b, level) in grid_mt.iter().zip(levels) {
                let (e, a, r) = match level {
                    Some(l) => (l.energy.total(), l.a_eff, l.residual),
                    None => {
                        table.gaps += 1;
                        (f64::NAN, f64::NAN, f64::NAN)
                    }
                };
                table.push(vec![Cell::Num(b), Cell::Int(k as i64), Cell::Num(e), Cell::Num(a), Cell::Int(0), Cell::Num(r)]);
            }
        }
        // one locus point per field value of the sweep window
        let ends: Vec<f64> = [grid_t[0], grid_t[grid_t.len() - 1]]
            .iter()
            .filter_map(|&b| params.divergence_energy(b))
            .map(|e| e - trap.e_zero())
            .collect();
        let locus = match ends[..] {
            [a, b] => divergence_locus(&params, &trap, a.min(b), a.max(b), grid_t.len()),
            _ => Vec::new(),
        };
        for (e, b_star) in &locus {
            table.push(vec![
                Cell::Num(b_star * 1e3),
                Cell::Int(-1),
                Cell::Num(e.total()),
                Cell::Num(f64::INFINITY),
                Cell::Int(1),
                Cell::Num(f64::NAN),
            ]);
        }
        Ok(table)
    }))
}

/// Frozen high-precision references for the special-function layer.
fn specfun_check() -> Table {
    let ctx = |eta: f64| FContext::new(TrapGeometry::new(eta).expect("positive eta"));
    let checks: Vec<(&str, trapped_pair_core::Result<f64>, f64, f64)> = vec![
        ("hurwitz_zeta(1/2;1)", hurwitz_zeta(0.5, 1.0), -1.460_354_508_809_586_8, 1e-12),
        ("hurwitz_zeta(3/2;0.3)", hurwitz_zeta(1.5, 0.3), 8.237_761_671_459_723, 1e-12),
        ("digamma(1/2)", digamma(0.5), -1.963_510_026_021_423_5, 1e-13),
        ("digamma(-3/2)", digamma(-1.5), 0.703_156_640_645_243_2, 1e-12),
        ("gamma(-5/2)", Ok(gamma(-2.5)), -0.945_308_720_482_941_9, 1e-13),
        ("gamma(3.7)/gamma(4.2)", Ok(half_ratio(3.7)), 0.537_684_506_328_526_6, 1e-13),
        ("beta_psi(1)", beta_psi(1.0), std::f64::consts::LN_2, 1e-13),
        ("beta_psi(5/2)", beta_psi(2.5), 0.237_462_993_461_563_3, 1e-12),
        ("bessel_k0(1)", bessel_k0(1.0), 0.421_024_438_240_708_3, 1e-13),
        ("bessel_k0(0.01)", bessel_k0(0.01), 4.721_244_730_161_095, 1e-13),
        ("hyper_u(1.3;1;2.5)", hyper_u(1.3, 1.0, 2.5), 0.195_165_270_509_746_9, 1e-10),
        ("hyper_u(0.7;1/2;0.4)", hyper_u(0.7, 0.5, 0.4), 0.905_614_808_348_732_5, 1e-10),
        ("parabolic_cylinder_d(1/2;1.2)", parabolic_cylinder_d(0.5, 1.2), 0.811_362_450_801_331_8, 1e-10),
        ("parabolic_cylinder_d(-1.7;2)", parabolic_cylinder_d(-1.7, 2.0), 0.078_606_181_389_534_86, 1e-10),
        ("laguerre(7;3.1)", Ok(laguerre(7, 3.1)), -0.914_078_940_892_857_3, 1e-12),
        ("hermite(6;0.7)", Ok(hermite(6, 0.7)), 125.081_536, 1e-13),
        ("phi(0)", phi_eval(0.0), 1.937_789_783_74, 1e-10),
        ("phi(1)", phi_eval(1.0), 3.095_877_626_642_592, 1e-9),
        ("F_sph(0.3)", f_spherical(0.3), 1.821_777_235_184_868_8, 1e-12),
        ("F(0.3;eta=1)", f_eval(0.3, &ctx(1.0)).map(|r| r.value), 1.821_777_235_184_868_8, 1e-9),
        ("F(-1.3;eta=1)", f_eval(-1.3, &ctx(1.0)).map(|r| r.value), -3.700_867_312_749_310_2, 1e-9),
    ];
    let mut table = Table::new(&["check", "value", "reference", "rel_error", "tolerance", "pass"]);
    for (name, value, reference, tol) in checks {
        let v = value.unwrap_or(f64::NAN);
        let rel = ((v - reference) / reference).abs();
        let pass = rel <= tol;
        if !pass {
            table.gaps += 1;
        }
        table.push(vec![
            Cell::Text(name.into()),
            Cell::Num(v),
            Cell::Num(reference),
            Cell::Num(rel),
            Cell::Num(tol),
            Cell::Int(pass as i64),
        ]);
    }
    table
}
