//! Hartree atomic units and their conversion to SI.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Speed of light in atomic units.
pub const C_ATOMIC: f64 = 137.035999;

/// Bohr radius in metres.
pub const BOHR_RADIUS_M: f64 = 5.291_772_109_03e-11;
/// Atomic unit of time in seconds.
pub const ATOMIC_TIME_S: f64 = 2.418_884_326_585_7e-17;
/// Hartree energy in joules.
pub const HARTREE_J: f64 = 4.359_744_722_207_1e-18;
/// Atomic unit of electric field in V/m.
pub const ATOMIC_FIELD_V_PER_M: f64 = 5.142_206_747_63e11;

/// The three constants that appear in the coupling formulas.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalConstants {
    pub c: f64,
    pub hbar: f64,
    pub eps0: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::atomic()
    }
}

impl PhysicalConstants {
    /// ħ = 1, 4πε₀ = 1, c = 137.035999.
    pub fn atomic() -> Self {
        PhysicalConstants { c: C_ATOMIC, hbar: 1.0, eps0: 1.0 / (4.0 * PI) }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("c", self.c), ("hbar", self.hbar), ("eps0", self.eps0)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("constant {name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    pub fn is_atomic(&self) -> bool {
        self.hbar == 1.0 && 4.0 * PI * self.eps0 == 1.0
    }
}

/// Physical quantity kinds understood by [`si_conversion`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuantityKind {
    Length,
    Time,
    Energy,
    ElectricField,
    /// Number density, converted to m⁻³.
    Density,
    /// Intensity, converted to W/m².
    PowerDensity,
}

impl QuantityKind {
    pub const ALL: [QuantityKind; 6] = [
        QuantityKind::Length,
        QuantityKind::Time,
        QuantityKind::Energy,
        QuantityKind::ElectricField,
        QuantityKind::Density,
        QuantityKind::PowerDensity,
    ];

    /// SI value of one atomic unit of this quantity.
    pub fn si_per_atomic_unit(self) -> f64 {
        match self {
            QuantityKind::Length => BOHR_RADIUS_M,
            QuantityKind::Time => ATOMIC_TIME_S,
            QuantityKind::Energy => HARTREE_J,
            QuantityKind::ElectricField => ATOMIC_FIELD_V_PER_M,
            QuantityKind::Density => BOHR_RADIUS_M.powi(-3),
            QuantityKind::PowerDensity => HARTREE_J / (ATOMIC_TIME_S * BOHR_RADIUS_M * BOHR_RADIUS_M),
        }
    }

    pub fn si_unit(self) -> &'static str {
        match self {
            QuantityKind::Length => "m",
            QuantityKind::Time => "s",
            QuantityKind::Energy => "J",
            QuantityKind::ElectricField => "V/m",
            QuantityKind::Density => "m^-3",
            QuantityKind::PowerDensity => "W/m^2",
        }
    }

    fn name(self) -> &'static str {
        match self {
            QuantityKind::Length => "length",
            QuantityKind::Time => "time",
            QuantityKind::Energy => "energy",
            QuantityKind::ElectricField => "electric-field",
            QuantityKind::Density => "density",
            QuantityKind::PowerDensity => "power-density",
        }
    }
}

impl fmt::Display for QuantityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for QuantityKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        QuantityKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                Error::Usage(format!(
                    "unknown quantity kind '{s}' (expected one of length, time, energy, \
                     electric-field, density, power-density)"
                ))
            })
    }
}

/// Converts a value in atomic units to SI.
pub fn si_conversion(value: f64, kind: QuantityKind) -> f64 {
    value * kind.si_per_atomic_unit()
}

/// Inverse of [`si_conversion`].
pub fn from_si(value: f64, kind: QuantityKind) -> f64 {
    value / kind.si_per_atomic_unit()
}

/// String-keyed variant used by the configuration and CLI layers.
pub fn si_conversion_named(value: f64, kind: &str) -> Result<f64> {
    Ok(si_conversion(value, kind.parse()?))
}

/// Cycle-averaged intensity ½cε₀|E|² of a field envelope, in atomic units.
pub fn intensity(amplitude: f64, constants: &PhysicalConstants) -> f64 {
    0.5 * constants.c * constants.eps0 * amplitude * amplitude
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn atomic_constants_are_exact() {
        let k = PhysicalConstants::atomic();
        assert!(k.is_atomic());
        k.validate().unwrap();
        assert_eq!(k.hbar, 1.0);
    }

    #[test]
    fn non_positive_constant_rejected() {
        let k = PhysicalConstants { eps0: 0.0, ..PhysicalConstants::atomic() };
        assert!(matches!(k.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn conversions_round_trip() {
        for kind in QuantityKind::ALL {
            for v in [3e-13, 1.0, 1e7, 1e11] {
                assert_relative_eq!(from_si(si_conversion(v, kind), kind), v, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn unknown_kind_is_usage_error() {
        assert!(matches!(si_conversion_named(1.0, "luminosity"), Err(Error::Usage(_))));
        assert_eq!("electric-field".parse::<QuantityKind>().unwrap(), QuantityKind::ElectricField);
    }

    #[test]
    fn sample_length_and_pulse_duration() {
        // 1e7 a.u. is 0.529 mm (usually rounded to half a millimetre), 1e11 a.u. about 2.4 microseconds
        let mm = si_conversion(1e7, QuantityKind::Length) * 1e3;
        assert!((mm - 0.529177).abs() < 1e-6, "{mm}");
        let us = si_conversion(1e11, QuantityKind::Time) * 1e6;
        assert!((us - 2.4).abs() / 2.4 < 0.05, "{us}");
        let per_cm3 = si_conversion(3e-13, QuantityKind::Density) * 1e-6;
        assert!((per_cm3 - 2.03e12).abs() / 2.03e12 < 0.01, "{per_cm3}");
    }

    #[test]
    fn signal_intensity_matches_quoted_power_density() {
        let k = PhysicalConstants::atomic();
        let w_per_cm2 = si_conversion(intensity(1e-10, &k), QuantityKind::PowerDensity) * 1e-4;
        assert!((w_per_cm2 - 3.5e-4).abs() / 3.5e-4 < 0.02, "{w_per_cm2}");
    }
}
