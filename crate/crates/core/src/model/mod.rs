//! Physical constants, unit conversion and the atomic model.

pub mod atom;
pub mod units;

pub use atom::{
    coupling_constant, denormalize_signal, dipole_from_linewidth, linewidth_from_dipole, normalize_control,
    normalize_signal, rabi_frequency, reference_scheme, Detunings, DoubleLambda, LevelScheme, MediumSpec, Signal,
    WidthSplit, RESONANCE_TOLERANCE,
};
pub use units::{from_si, intensity, si_conversion, si_conversion_named, PhysicalConstants, QuantityKind};
