//! Built-in configurations that regenerate the figure data sets.

/// `(command, key-value pairs)` of a named preset.
pub fn preset(name: &str) -> Option<(&'static str, Vec<(&'static str, &'static str)>)> {
    let spectrum_grid = [("sweep.inv_a.min", "-5"), ("sweep.inv_a.max", "5"), ("sweep.inv_a.n", "201")];
    let p = match name {
        "fig1" => ("spectrum", vec![("trap.eta", "5"), ("spectrum.branches", "12")]),
        "fig2" => ("spectrum", vec![("trap.eta", "1.1,1"), ("spectrum.branches", "10")]),
        "fig3" => ("lowdim-compare", vec![("trap.eta", "10"), ("lowdim.branches", "3")]),
        "fig4" => ("lowdim-compare", vec![("trap.eta", "0.1"), ("lowdim.branches", "3")]),
        "fig5" | "fig6" => (
            "wavefunction",
            vec![
                ("trap.eta", "100"),
                ("state.inv_a", "0"),
                ("state.branch", if name == "fig5" { "0" } else { "1" }),
                ("grid.rho.min", "0.005"),
                ("grid.rho.max", "0.3"),
                ("grid.rho.n", "60"),
                ("grid.z.min", "0"),
                ("grid.z.max", "3"),
                ("grid.z.n", "61"),
            ],
        ),
        "fig7" => (
            "wavefunction",
            vec![
                ("trap.eta", "100"),
                ("state.inv_a", "0"),
                ("state.branch", "1"),
                ("wavefunction.model", "q1d"),
                ("grid.axial_cuts.rho", "0,0.08,0.16"),
                ("grid.radial_cuts.z", "0,0.5,1"),
                ("grid.z.min", "0.01"),
                ("grid.z.max", "3"),
                ("grid.z.n", "150"),
                ("grid.rho.min", "0.002"),
                ("grid.rho.max", "0.3"),
                ("grid.rho.n", "150"),
            ],
        ),
        "fig8" | "fig9" => (
            "wavefunction",
            vec![
                ("trap.eta", "0.01"),
                ("state.inv_a", "0"),
                ("state.branch", if name == "fig8" { "0" } else { "1" }),
                ("grid.rho.min", "0.1"),
                ("grid.rho.max", "30"),
                ("grid.rho.n", "60"),
                ("grid.z.min", "0"),
                ("grid.z.max", "3"),
                ("grid.z.n", "31"),
            ],
        ),
        "fig10" => (
            "wavefunction",
            vec![
                ("trap.eta", "0.01"),
                ("state.inv_a", "0"),
                ("state.branch", "1"),
                ("wavefunction.model", "q2d"),
                ("grid.radial_cuts.z", "0,1,2"),
                ("grid.axial_cuts.rho", "0.1,5,10"),
                ("grid.rho.min", "0.05"),
                ("grid.rho.max", "30"),
                ("grid.rho.n", "150"),
                ("grid.z.min", "0"),
                ("grid.z.max", "3"),
                ("grid.z.n", "150"),
            ],
        ),
        // synthetic resonance near 100 mT; the literature Rb parameters are inputs, not built in
        "fig11" => (
            "feshbach",
            vec![
                ("trap.eta", "100"),
                ("trap.f_z_khz", "5"),
                ("feshbach.a_bg_a0", "100"),
                ("feshbach.delta_b_mt", "2e-4"),
                ("feshbach.b0_mt", "100"),
                ("feshbach.em_slope_mub", "2"),
                ("feshbach.branches", "10"),
                ("sweep.b_mt.min", "100.0170"),
                ("sweep.b_mt.max", "100.0215"),
                ("sweep.b_mt.n", "181"),
            ],
        ),
        "fig12" => (
            "feshbach",
            vec![
                ("trap.eta", "0.01"),
                ("trap.f_z_khz", "500"),
                ("feshbach.a_bg_a0", "100"),
                ("feshbach.delta_b_mt", "2e-4"),
                ("feshbach.b0_mt", "100"),
                ("feshbach.em_slope_mub", "2"),
                ("feshbach.branches", "10"),
                ("sweep.b_mt.min", "100.0085"),
                ("sweep.b_mt.max", "100.0130"),
                ("sweep.b_mt.n", "121"),
            ],
        ),
        _ => return None,
    };
    let (command, mut pairs) = p;
    if matches!(command, "spectrum" | "lowdim-compare") {
        pairs.extend(spectrum_grid);
    }
    Some((command, pairs))
}

pub const PRESETS: [&str; 12] =
    ["fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10", "fig11", "fig12"];
