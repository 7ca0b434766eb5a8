//! Atomic-unit conversions for the standard parameter set, and the derived
//! dipoles, couplings and group velocity of the reference atom.

use dlambda::model::{reference_scheme, si_conversion, DoubleLambda, PhysicalConstants, QuantityKind, Signal};
use dlambda::polariton::mixing_angles;

fn main() -> dlambda::Result<()> {
    let rows = [
        ("sample length", 1e7, QuantityKind::Length, 1e3, "mm"),
        ("pulse duration", 1e11, QuantityKind::Time, 1e6, "us"),
        ("density", 3e-13, QuantityKind::Density, 1e-6, "cm^-3"),
        ("control field", 1.2e-9, QuantityKind::ElectricField, 1.0, "V/m"),
    ];
    for (name, v, kind, scale, unit) in rows {
        println!("{name:>15}: {v:e} a.u. = {:.4e} {unit}", si_conversion(v, kind) * scale);
    }

    let k = PhysicalConstants::atomic();
    let sys = DoubleLambda::new(k, reference_scheme(&k)?, 3e-13, 1e7)?;
    for (i, d) in sys.scheme.dipoles.iter().enumerate() {
        println!("dipole {}: {:.5e} a.u.", i + 1, d.norm());
    }
    println!("kappa1 = {:.5e}, kappa3 = {:.5e}", sys.medium.kappa(Signal::One), sys.medium.kappa(Signal::Three));
    let u2 = sys.control_factor(Signal::One) * 1.2e-9;
    let u4 = sys.control_factor(Signal::Three) * 1.8e-9;
    let a = mixing_angles(u2, u4);
    println!(
        "|U2| = {:.4}, |U4| = {:.4}, cos^2(theta) = {:.4e}, v = {:.4e} a.u.",
        u2.norm(),
        u4.norm(),
        a.cos2_theta(),
        a.group_velocity(k.c)
    );
    Ok(())
}
