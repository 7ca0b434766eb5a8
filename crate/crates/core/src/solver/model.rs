//! Linear atomic dynamics driven by the two signal fields.
//!
//! Every model has the form dy/dt' = A(t) y + B R with field source S = C y,
//! where y holds three atomic amplitudes and R = (R₁, R₃).

use nalgebra::{Matrix2x3, Matrix3, Matrix3x2, Vector3};
use num_complex::Complex64;

use crate::model::{Detunings, DoubleLambda, Signal};
use crate::pulse::ControlSchedule;

pub type C64 = Complex64;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const I: C64 = C64 { re: 0.0, im: 1.0 };

pub trait AtomicModel: Sync {
    /// A(t) at lab time `t`.
    fn dynamics(&self, t: f64) -> Matrix3<C64>;
    fn drive(&self) -> Matrix3x2<C64>;
    fn source(&self) -> Matrix2x3<C64>;
    /// (S₁, S₃, σ_bc) for a state vector.
    fn observables(&self, y: &Vector3<C64>) -> [C64; 3];
    /// Largest effective Rabi frequency sqrt(|Ω₂|² + |Ω₄|²) over the run.
    fn rabi_max(&self) -> f64;
}

/// Normalised control amplitudes U₂(t), U₄(t) (or Ω₂, Ω₄ with Rabi factors).
#[derive(Clone, Debug)]
pub struct ControlPair {
    pub schedules: [ControlSchedule; 2],
    pub factors: [C64; 2],
}

impl ControlPair {
    pub fn normalized(system: &DoubleLambda, schedules: &[ControlSchedule; 2]) -> Self {
        ControlPair {
            schedules: *schedules,
            factors: [system.control_factor(Signal::One), system.control_factor(Signal::Three)],
        }
    }

    pub fn rabi(system: &DoubleLambda, schedules: &[ControlSchedule; 2]) -> Self {
        ControlPair {
            schedules: *schedules,
            factors: [system.rabi_factor(Signal::One), system.rabi_factor(Signal::Three)],
        }
    }

    #[inline]
    pub fn at(&self, t: f64) -> [C64; 2] {
        [
            self.factors[0] * self.schedules[0].value(t),
            self.factors[1] * self.schedules[1].value(t),
        ]
    }

    pub fn peak(&self) -> [f64; 2] {
        [
            self.factors[0].norm() * self.schedules[0].base_amplitude,
            self.factors[1].norm() * self.schedules[1].base_amplitude,
        ]
    }

    /// cos²θ(t) = (|U₂|² + |U₄|²) / (|U₂|² + |U₄|² + 1); only meaningful for normalised pairs.
    pub fn cos2_theta(&self, t: f64) -> f64 {
        let [u2, u4] = self.at(t);
        let s = u2.norm_sqr() + u4.norm_sqr();
        s / (1.0 + s)
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self.schedules.iter().flat_map(|s| s.breakpoints()).collect();
        b.sort_by(f64::total_cmp);
        b
    }
}

/// Resonant, relaxation-free dynamics in the variables (S₁, S₃, σ_bc):
///
/// ∂S₁ = −κ₁²(R₁ + U₂σ_bc), ∂S₃ = −κ₃²(R₃ + U₄σ_bc), ∂σ_bc = U₂*S₁ + U₄*S₃.
#[derive(Clone, Debug)]
pub struct ReducedModel {
    pub kappa: [f64; 2],
    pub controls: ControlPair,
}

impl ReducedModel {
    pub fn new(system: &DoubleLambda, controls: &[ControlSchedule; 2]) -> Self {
        ReducedModel {
            kappa: [system.medium.kappa1, system.medium.kappa3],
            controls: ControlPair::normalized(system, controls),
        }
    }
}

impl AtomicModel for ReducedModel {
    #[inline]
    fn dynamics(&self, t: f64) -> Matrix3<C64> {
        let [u2, u4] = self.controls.at(t);
        let k1 = self.kappa[0] * self.kappa[0];
        let k3 = self.kappa[1] * self.kappa[1];
        Matrix3::new(
            ZERO, ZERO, -u2 * k1,
            ZERO, ZERO, -u4 * k3,
            u2.conj(), u4.conj(), ZERO,
        )
    }

    fn drive(&self) -> Matrix3x2<C64> {
        let k1 = C64::from(-self.kappa[0] * self.kappa[0]);
        let k3 = C64::from(-self.kappa[1] * self.kappa[1]);
        Matrix3x2::new(k1, ZERO, ZERO, k3, ZERO, ZERO)
    }

    fn source(&self) -> Matrix2x3<C64> {
        let one = C64::from(1.0);
        Matrix2x3::new(one, ZERO, ZERO, ZERO, one, ZERO)
    }

    fn observables(&self, y: &Vector3<C64>) -> [C64; 3] {
        [y[0], y[1], y[2]]
    }

    fn rabi_max(&self) -> f64 {
        let [u2, u4] = self.controls.peak();
        let (o2, o4) = (u2 * self.kappa[0], u4 * self.kappa[1]);
        (o2 * o2 + o4 * o4).sqrt()
    }
}

/// Bloch equations with detunings and relaxation in the coherences
/// (σ_ba, σ_bd, σ_bc):
///
/// iσ̇_ba = κ₁R₁ + Ω₂σ_bc + Δ₁σ_ba,
/// iσ̇_bd = κ₃R₃ + Ω₄σ_bc + Δ₃σ_bd,
/// iσ̇_bc = Ω₂*σ_ba + Ω₄*σ_bd + δσ_bc,
///
/// with field sources S₁ = −iκ₁σ_ba and S₃ = −iκ₃σ_bd.
#[derive(Clone, Debug)]
pub struct FullModel {
    pub kappa: [f64; 2],
    pub rabi: ControlPair,
    pub detunings: Detunings,
}

impl FullModel {
    pub fn new(system: &DoubleLambda, detunings: Detunings, controls: &[ControlSchedule; 2]) -> Self {
        FullModel {
            kappa: [system.medium.kappa1, system.medium.kappa3],
            rabi: ControlPair::rabi(system, controls),
            detunings,
        }
    }
}

impl AtomicModel for FullModel {
    #[inline]
    fn dynamics(&self, t: f64) -> Matrix3<C64> {
        let [o2, o4] = self.rabi.at(t);
        let d = &self.detunings;
        let m = -I;
        Matrix3::new(
            m * d.delta1, ZERO, m * o2,
            ZERO, m * d.delta3, m * o4,
            m * o2.conj(), m * o4.conj(), m * d.delta,
        )
    }

    fn drive(&self) -> Matrix3x2<C64> {
        Matrix3x2::new(-I * self.kappa[0], ZERO, ZERO, -I * self.kappa[1], ZERO, ZERO)
    }

    fn source(&self) -> Matrix2x3<C64> {
        Matrix2x3::new(-I * self.kappa[0], ZERO, ZERO, ZERO, -I * self.kappa[1], ZERO)
    }

    fn observables(&self, y: &Vector3<C64>) -> [C64; 3] {
        [-I * self.kappa[0] * y[0], -I * self.kappa[1] * y[1], y[2]]
    }

    fn rabi_max(&self) -> f64 {
        let [o2, o4] = self.rabi.peak();
        (o2 * o2 + o4 * o4).sqrt()
    }
}
