//! Susceptibility spectra of the medium, the adiabatic combination seen by
//! matched fields, and the width of the transparency window.

use dlambda::model::{Detunings, Signal};
use dlambda::scenario::{ScenarioConfig, ScenarioKind};
use dlambda::susceptibility::{
    absorption_ratio, adiabatic_field_ratio, chi_adiabatic, chi_matrix, default_omega_grid, transparency_window,
};

fn main() -> dlambda::Result<()> {
    let cfg = ScenarioConfig::preset(ScenarioKind::Transmission);
    let sys = cfg.system()?;
    let o2 = sys.rabi_factor(Signal::One) * cfg.controls[0].base_amplitude;
    let o4 = sys.rabi_factor(Signal::Three) * cfg.controls[1].base_amplitude;
    let omega = (o2.norm_sqr() + o4.norm_sqr()).sqrt();
    let grid = default_omega_grid(omega);
    let ratio = adiabatic_field_ratio(&sys, o2, o4)?;

    let lossy = sys.detunings();
    let m = chi_matrix(&grid, &lossy, o2, o4, &sys, false)?;
    let chi = m.combined(ratio);
    let win = transparency_window(&grid, &absorption_ratio(&grid, &chi, lossy.delta1, &sys), 0.5)?;
    println!("Omega = {omega:.4e}, transparency half-width {:.4e} ({:.3} Omega)", win.half_width, win.half_width / omega);

    let ideal = chi_matrix(&grid, &Detunings::zero(), o2, o4, &sys, false)?;
    let adia = chi_adiabatic(&grid, o2, o4, &sys)?;
    for f in [0.01, 0.1, 0.5, 2.0] {
        let i = grid.iter().position(|&w| w >= f * omega).unwrap();
        println!(
            "omega = {:+.3e}: chi11 = {:+.4e}, chi11 + chi13 r = {:+.4e}, closed form {:+.4e}",
            grid[i],
            ideal.chi11[i].re,
            ideal.combined(ratio)[i].re,
            adia[i].re
        );
    }
    Ok(())
}
