//! The four-level double-Λ atom, its couplings to the four fields and the
//! normalised field variables used by the propagation equations.
//!
//! Level b is the ground state, c the metastable lower state, a and d the two
//! upper states. Transition 1 is a–b, 2 is a–c, 3 is d–b and 4 is d–c; fields 1
//! and 3 are the weak signals, 2 and 4 the controls.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::units::PhysicalConstants;
use crate::error::{Error, Result};

/// Default relative tolerance of the four-photon resonance check.
pub const RESONANCE_TOLERANCE: f64 = 1e-15;

/// Transition dipole magnitude from a spontaneous decay rate,
/// d = sqrt(3π ε₀ ħ c³ Γ / ω³).
pub fn dipole_from_linewidth(gamma: f64, omega: f64, k: &PhysicalConstants) -> Result<f64> {
    if !(gamma > 0.0 && omega > 0.0) {
        return Err(Error::Domain(format!(
            "linewidth and frequency must be positive (gamma = {gamma}, omega = {omega})"
        )));
    }
    Ok((3.0 * PI * k.eps0 * k.hbar * k.c.powi(3) * gamma / omega.powi(3)).sqrt())
}

/// Spontaneous decay rate Γ = ω³|d|²/(3π ε₀ ħ c³).
pub fn linewidth_from_dipole(d: f64, omega: f64, k: &PhysicalConstants) -> Result<f64> {
    if !(d > 0.0 && omega > 0.0) {
        return Err(Error::Domain(format!(
            "dipole and frequency must be positive (d = {d}, omega = {omega})"
        )));
    }
    Ok(omega.powi(3) * d * d / (3.0 * PI * k.eps0 * k.hbar * k.c.powi(3)))
}

/// Field–medium coupling κ = sqrt(|d|² ω N / (4 ε₀ ħ)).
pub fn coupling_constant(d: Complex64, omega: f64, density: f64, k: &PhysicalConstants) -> Result<f64> {
    if !(d.norm() > 0.0 && omega > 0.0 && density > 0.0) {
        return Err(Error::Domain(format!(
            "coupling needs a non-zero dipole, positive frequency and density \
             (|d| = {}, omega = {omega}, N = {density}); an empty medium is vacuum",
            d.norm()
        )));
    }
    Ok((d.norm_sqr() * omega * density / (4.0 * k.eps0 * k.hbar)).sqrt())
}

fn check_kappa(kappa: f64) -> Result<()> {
    if kappa > 0.0 && kappa.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("coupling constant must be positive, got {kappa}")))
    }
}

/// R = ε d* / (2ħκ) for a signal field.
pub fn normalize_signal(epsilon: Complex64, d: Complex64, kappa: f64, k: &PhysicalConstants) -> Result<Complex64> {
    check_kappa(kappa)?;
    Ok(epsilon * d.conj() / (2.0 * k.hbar * kappa))
}

/// Inverse of [`normalize_signal`].
pub fn denormalize_signal(r: Complex64, d: Complex64, kappa: f64, k: &PhysicalConstants) -> Result<Complex64> {
    check_kappa(kappa)?;
    if d.norm() == 0.0 {
        return Err(Error::Domain("cannot recover a field through a zero dipole".into()));
    }
    Ok(r * 2.0 * k.hbar * kappa / d.conj())
}

/// U = ε d* / (2ħκ) for a control field. The control on transition 2 is
/// normalised by κ₁ and the one on transition 4 by κ₃, i.e. by the coupling
/// of the signal that shares its upper level.
pub fn normalize_control(
    epsilon: Complex64,
    d: Complex64,
    kappa_signal: f64,
    k: &PhysicalConstants,
) -> Result<Complex64> {
    normalize_signal(epsilon, d, kappa_signal, k)
}

/// Ω = ε d* / (2ħ).
pub fn rabi_frequency(epsilon: Complex64, d: Complex64, k: &PhysicalConstants) -> Complex64 {
    epsilon * d.conj() / (2.0 * k.hbar)
}

/// How the width of each upper level is shared between its two decay channels.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum WidthSplit {
    /// Each channel carries half of the total upper-level width.
    Equal,
    /// Every channel carries the full quoted width (level width is twice the quote).
    PerChannel,
    /// Explicit channel rates a→b, a→c, d→b, d→c.
    Explicit { ab: f64, ac: f64, db: f64, dc: f64 },
}

impl Default for WidthSplit {
    fn default() -> Self {
        WidthSplit::Equal
    }
}

/// Level energies, dipoles, widths and carrier frequencies of the atom.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelScheme {
    pub e_a: f64,
    pub e_b: f64,
    pub e_c: f64,
    pub e_d: f64,
    /// Dipoles of transitions ab, ac, db, dc.
    pub dipoles: [Complex64; 4],
    /// Total width of level a.
    pub gamma_a: f64,
    /// Total width of level d.
    pub gamma_d: f64,
    /// Relaxation rate of the b–c coherence.
    pub gamma_bc: f64,
    /// Carrier frequencies of fields 1..4.
    pub carriers: [f64; 4],
}

impl LevelScheme {
    /// Builds a scheme whose dipoles follow from the spontaneous widths, with all
    /// four carriers tuned to their transitions.
    pub fn from_widths(
        energies: [f64; 4],
        upper_width: f64,
        split: WidthSplit,
        gamma_bc: f64,
        dipole_phases: [f64; 4],
        k: &PhysicalConstants,
    ) -> Result<Self> {
        let [e_a, e_b, e_c, e_d] = energies;
        let transitions = [e_a - e_b, e_a - e_c, e_d - e_b, e_d - e_c].map(|de| de / k.hbar);
        let channels = match split {
            WidthSplit::Equal => [0.5 * upper_width; 4],
            WidthSplit::PerChannel => [upper_width; 4],
            WidthSplit::Explicit { ab, ac, db, dc } => [ab, ac, db, dc],
        };
        let mut dipoles = [Complex64::new(0.0, 0.0); 4];
        for j in 0..4 {
            let d = dipole_from_linewidth(channels[j], transitions[j], k)?;
            dipoles[j] = Complex64::from_polar(d, dipole_phases[j]);
        }
        let scheme = LevelScheme {
            e_a,
            e_b,
            e_c,
            e_d,
            dipoles,
            gamma_a: channels[0] + channels[1],
            gamma_d: channels[2] + channels[3],
            gamma_bc,
            carriers: transitions,
        };
        scheme.validate(RESONANCE_TOLERANCE)?;
        Ok(scheme)
    }

    /// Transition frequencies ab, ac, db, dc.
    pub fn transition_frequencies(&self, k: &PhysicalConstants) -> [f64; 4] {
        [
            self.e_a - self.e_b,
            self.e_a - self.e_c,
            self.e_d - self.e_b,
            self.e_d - self.e_c,
        ]
        .map(|de| de / k.hbar)
    }

    pub fn validate(&self, resonance_tol: f64) -> Result<()> {
        let ordered = self.e_b < self.e_c && self.e_c < self.e_a && self.e_c < self.e_d;
        if !ordered {
            return Err(Error::Config(format!(
                "level order must be E_b < E_c < E_a and E_c < E_d (got a = {}, b = {}, c = {}, d = {})",
                self.e_a, self.e_b, self.e_c, self.e_d
            )));
        }
        for (name, w) in [("gamma_a", self.gamma_a), ("gamma_d", self.gamma_d), ("gamma_bc", self.gamma_bc)] {
            if !(w >= 0.0 && w.is_finite()) {
                return Err(Error::Config(format!("{name} must be non-negative, got {w}")));
            }
        }
        if self.carriers.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
            return Err(Error::Config(format!("carrier frequencies must be positive: {:?}", self.carriers)));
        }
        let [w1, w2, w3, w4] = self.carriers;
        let scale = w1.max(w2).max(w3).max(w4);
        let mismatch = ((w1 - w2) - (w3 - w4)).abs();
        if mismatch > resonance_tol * scale {
            return Err(Error::Config(format!(
                "four-photon resonance violated: (w1 - w2) - (w3 - w4) = {mismatch:e}"
            )));
        }
        Ok(())
    }
}

/// One- and two-photon detunings including the relaxation rates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Detunings {
    pub delta1: Complex64,
    pub delta3: Complex64,
    pub delta: Complex64,
}

impl Detunings {
    pub fn new(delta1: Complex64, delta3: Complex64, delta: Complex64) -> Result<Self> {
        for (name, v) in [("delta1", delta1), ("delta3", delta3), ("delta", delta)] {
            if v.im > 0.0 || !v.is_finite() {
                return Err(Error::Config(format!(
                    "detuning {name} = {v} must be finite with non-positive imaginary part"
                )));
            }
        }
        Ok(Detunings { delta1, delta3, delta })
    }

    pub fn zero() -> Self {
        let z = Complex64::new(0.0, 0.0);
        Detunings { delta1: z, delta3: z, delta: z }
    }

    /// ħΔ₁ = E_b − E_a + ħω₁ − (i/2)Γᵃ, ħΔ₃ = E_b − E_d + ħω₃ − (i/2)Γᵈ,
    /// ħδ = E_b − E_c + ħω₁ − ħω₂ − iγ.
    pub fn from_scheme(s: &LevelScheme, k: &PhysicalConstants) -> Self {
        // written as carrier minus transition frequency so that a resonant
        // scheme gives exact zeros
        let [w_ab, w_ac, w_db, _] = s.transition_frequencies(k);
        let [w1, w2, w3, _] = s.carriers;
        let (d1, d2) = (w1 - w_ab, w2 - w_ac);
        Detunings {
            delta1: Complex64::new(d1, -0.5 * s.gamma_a),
            delta3: Complex64::new(w3 - w_db, -0.5 * s.gamma_d),
            delta: Complex64::new(d1 - d2, -s.gamma_bc),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.delta1 == Complex64::new(0.0, 0.0)
            && self.delta3 == Complex64::new(0.0, 0.0)
            && self.delta == Complex64::new(0.0, 0.0)
    }
}

/// Atom density, sample length and the derived signal couplings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MediumSpec {
    pub density: f64,
    pub length: f64,
    pub kappa1: f64,
    pub kappa3: f64,
}

impl MediumSpec {
    pub fn new(density: f64, length: f64, scheme: &LevelScheme, k: &PhysicalConstants) -> Result<Self> {
        if !(density > 0.0 && length > 0.0) {
            return Err(Error::Config(format!(
                "density and length must be positive (N = {density}, L = {length})"
            )));
        }
        let kappa1 = coupling_constant(scheme.dipoles[0], scheme.carriers[0], density, k)?;
        let kappa3 = coupling_constant(scheme.dipoles[2], scheme.carriers[2], density, k)?;
        Ok(MediumSpec { density, length, kappa1, kappa3 })
    }

    pub fn kappa(&self, signal: Signal) -> f64 {
        match signal {
            Signal::One => self.kappa1,
            Signal::Three => self.kappa3,
        }
    }
}

/// Selects one of the two signal channels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Signal {
    One,
    Three,
}

impl Signal {
    pub fn index(self) -> usize {
        match self {
            Signal::One => 0,
            Signal::Three => 1,
        }
    }
}

/// Bundles constants, atom and medium, and converts lab-frame field amplitudes to
/// the normalised variables R₁, R₃, U₂, U₄ and the Rabi frequencies Ω₂, Ω₄.
#[derive(Clone, Debug, PartialEq)]
pub struct DoubleLambda {
    pub constants: PhysicalConstants,
    pub scheme: LevelScheme,
    pub medium: MediumSpec,
}

impl DoubleLambda {
    pub fn new(constants: PhysicalConstants, scheme: LevelScheme, density: f64, length: f64) -> Result<Self> {
        constants.validate()?;
        let medium = MediumSpec::new(density, length, &scheme, &constants)?;
        Ok(DoubleLambda { constants, scheme, medium })
    }

    /// Factor turning a signal field amplitude into R.
    pub fn signal_factor(&self, signal: Signal) -> Complex64 {
        let d = match signal {
            Signal::One => self.scheme.dipoles[0],
            Signal::Three => self.scheme.dipoles[2],
        };
        d.conj() / (2.0 * self.constants.hbar * self.medium.kappa(signal))
    }

    /// Factor turning a control field amplitude into U (control 2 pairs with
    /// signal 1, control 4 with signal 3).
    pub fn control_factor(&self, signal: Signal) -> Complex64 {
        let d = match signal {
            Signal::One => self.scheme.dipoles[1],
            Signal::Three => self.scheme.dipoles[3],
        };
        d.conj() / (2.0 * self.constants.hbar * self.medium.kappa(signal))
    }

    /// Factor turning a control field amplitude into its Rabi frequency.
    pub fn rabi_factor(&self, signal: Signal) -> Complex64 {
        self.control_factor(signal) * self.medium.kappa(signal)
    }

    pub fn detunings(&self) -> Detunings {
        Detunings::from_scheme(&self.scheme, &self.constants)
    }
}

/// The atom used throughout the numerical illustrations: E_a = −0.10,
/// E_b = −0.20, E_c = −0.18, E_d = −0.05, upper widths 2.4×10⁻⁹, no lower
/// coherence relaxation.
pub fn reference_scheme(k: &PhysicalConstants) -> Result<LevelScheme> {
    LevelScheme::from_widths([-0.10, -0.20, -0.18, -0.05], 2.4e-9, WidthSplit::Equal, 0.0, [0.0; 4], k)
}
