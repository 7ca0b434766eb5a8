//! Signal envelopes and control-field schedules.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PulseShape {
    SineSquare,
    Rectangular,
}

/// A signal pulse supported on `[start_time, start_time + duration]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseSpec {
    pub shape: PulseShape,
    pub amplitude: f64,
    pub duration: f64,
    #[serde(default)]
    pub phase: f64,
    #[serde(default)]
    pub start_time: f64,
}

impl PulseSpec {
    pub fn sine_square(amplitude: f64, duration: f64) -> Self {
        PulseSpec { shape: PulseShape::SineSquare, amplitude, duration, phase: 0.0, start_time: 0.0 }
    }

    pub fn rectangular(amplitude: f64, duration: f64) -> Self {
        PulseSpec { shape: PulseShape::Rectangular, amplitude, duration, phase: 0.0, start_time: 0.0 }
    }

    pub fn with_phase(self, phase: f64) -> Self {
        PulseSpec { phase, ..self }
    }

    pub fn with_start(self, start_time: f64) -> Self {
        PulseSpec { start_time, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.amplitude >= 0.0 && self.amplitude.is_finite()) {
            return Err(Error::Config(format!("pulse amplitude must be >= 0, got {}", self.amplitude)));
        }
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return Err(Error::Config(format!("pulse duration must be > 0, got {}", self.duration)));
        }
        if !(self.phase.is_finite() && self.start_time.is_finite()) {
            return Err(Error::Config("pulse phase and start time must be finite".into()));
        }
        Ok(())
    }

    pub fn end_time(&self) -> f64 {
        self.start_time + self.duration
    }

    pub fn peak_time(&self) -> f64 {
        self.start_time + 0.5 * self.duration
    }

    /// Real, phase-free envelope.
    pub fn envelope(&self, t: f64) -> f64 {
        let s = t - self.start_time;
        if s < 0.0 || s > self.duration {
            return 0.0;
        }
        match self.shape {
            PulseShape::SineSquare => {
                let x = (std::f64::consts::PI * s / self.duration).sin();
                self.amplitude * x * x
            }
            PulseShape::Rectangular => self.amplitude,
        }
    }

    pub fn value(&self, t: f64) -> Complex64 {
        Complex64::from_polar(self.envelope(t), self.phase)
    }
}

/// Complex amplitude of a signal pulse at time `t`.
pub fn eval_pulse(spec: &PulseSpec, t: f64) -> Complex64 {
    spec.value(t)
}

/// ∫|envelope|² dt in closed form.
pub fn pulse_l2_norm(spec: &PulseSpec) -> f64 {
    let a2 = spec.amplitude * spec.amplitude;
    match spec.shape {
        PulseShape::Rectangular => a2 * spec.duration,
        PulseShape::SineSquare => 0.375 * a2 * spec.duration,
    }
}

/// A control field that is constant apart from optional tanh switch-off and
/// switch-on ramps.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlSchedule {
    pub base_amplitude: f64,
    #[serde(default)]
    pub phase: f64,
    #[serde(default)]
    pub off_time: Option<f64>,
    #[serde(default)]
    pub on_time: Option<f64>,
    pub ramp_width: f64,
}

impl ControlSchedule {
    pub fn constant(base_amplitude: f64, phase: f64) -> Self {
        ControlSchedule { base_amplitude, phase, off_time: None, on_time: None, ramp_width: 1.0 }
    }

    pub fn switched_off(base_amplitude: f64, phase: f64, off_time: f64, ramp_width: f64) -> Self {
        ControlSchedule { base_amplitude, phase, off_time: Some(off_time), on_time: None, ramp_width }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.base_amplitude >= 0.0 && self.base_amplitude.is_finite()) {
            return Err(Error::Config(format!("control amplitude must be >= 0, got {}", self.base_amplitude)));
        }
        if !(self.ramp_width > 0.0 && self.ramp_width.is_finite()) {
            return Err(Error::Config(format!("control ramp width must be > 0, got {}", self.ramp_width)));
        }
        if let (Some(off), Some(on)) = (self.off_time, self.on_time) {
            if !(on > off) {
                return Err(Error::Config(format!(
                    "control switch-on time ({on:e}) must come after switch-off ({off:e})"
                )));
            }
        }
        Ok(())
    }

    pub fn is_constant(&self) -> bool {
        self.off_time.is_none() && self.on_time.is_none()
    }

    /// Real factor in [0, 1] multiplying the base amplitude.
    pub fn profile(&self, t: f64) -> f64 {
        let w = self.ramp_width;
        let off = |t0: f64| 0.5 * (1.0 - ((t - t0) / w).tanh());
        let on = |t0: f64| 0.5 * (1.0 + ((t - t0) / w).tanh());
        match (self.off_time, self.on_time) {
            (None, None) => 1.0,
            (Some(t0), None) => off(t0),
            (None, Some(t1)) => on(t1),
            (Some(t0), Some(t1)) => off(t0) + on(t1),
        }
    }

    pub fn value(&self, t: f64) -> Complex64 {
        Complex64::from_polar(self.base_amplitude * self.profile(t), self.phase)
    }

    /// Times around which the schedule changes quickly.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for t0 in [self.off_time, self.on_time].into_iter().flatten() {
            for k in [-12.0, -4.0, 0.0, 4.0, 12.0] {
                out.push(t0 + k * self.ramp_width);
            }
        }
        out
    }
}

/// Complex control amplitude at time `t`.
pub fn eval_control(schedule: &ControlSchedule, t: f64) -> Result<Complex64> {
    schedule.validate()?;
    Ok(schedule.value(t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn sine_square_support_and_peak() {
        let p = PulseSpec::sine_square(1e-10, 1e11).with_start(2e10);
        assert_eq!(eval_pulse(&p, 2e10).norm(), 0.0);
        assert_eq!(eval_pulse(&p, 1e10).norm(), 0.0);
        assert_eq!(eval_pulse(&p, 1.3e11).norm(), 0.0);
        assert_relative_eq!(eval_pulse(&p, p.peak_time()).re, 1e-10, max_relative = 1e-15);
    }

    #[test]
    fn rectangular_is_flat_inside() {
        let p = PulseSpec::rectangular(2.0, 5.0).with_phase(0.4);
        for t in [0.0, 1.0, 4.9, 5.0] {
            assert_eq!(eval_pulse(&p, t), Complex64::from_polar(2.0, 0.4));
        }
        assert_eq!(eval_pulse(&p, 5.0001).norm(), 0.0);
    }

    #[test]
    fn l2_norms() {
        assert_eq!(pulse_l2_norm(&PulseSpec::rectangular(3.0, 2.0)), 18.0);
        assert_eq!(pulse_l2_norm(&PulseSpec::sine_square(2.0, 4.0)), 6.0);
        assert_eq!(pulse_l2_norm(&PulseSpec::sine_square(0.0, 4.0)), 0.0);
        // closed form against a midpoint sum
        let p = PulseSpec::sine_square(1.3, 7.0);
        let n = 20_000;
        let h = p.duration / n as f64;
        let sum: f64 = (0..n).map(|i| p.value((i as f64 + 0.5) * h).norm_sqr() * h).sum();
        assert_relative_eq!(sum, pulse_l2_norm(&p), max_relative = 1e-9);
    }

    #[test]
    fn control_constant_and_switch_off() {
        let c = ControlSchedule::constant(1.2e-9, 0.3);
        assert_eq!(eval_control(&c, -1e12).unwrap(), Complex64::from_polar(1.2e-9, 0.3));
        let s = ControlSchedule::switched_off(1.0, 0.0, 10.0, 2.0);
        assert_eq!(eval_control(&s, 10.0).unwrap().norm(), 0.5);
        assert!(eval_control(&s, 22.0).unwrap().norm() < 1e-5);
    }

    #[test]
    fn switch_on_after_off_required() {
        let bad = ControlSchedule { on_time: Some(5.0), ..ControlSchedule::switched_off(1.0, 0.0, 10.0, 1.0) };
        assert!(matches!(eval_control(&bad, 0.0), Err(Error::Config(_))));
        let good = ControlSchedule { on_time: Some(50.0), ..bad };
        assert!(eval_control(&good, 0.0).unwrap().norm() > 0.999);
        assert!(good.value(30.0).norm() < 1e-6);
        assert!(good.value(80.0).norm() > 0.999);
    }

    proptest! {
        #[test]
        fn pulse_phase_covariance(t in -1.0f64..12.0, phi in -6.0f64..6.0) {
            let p = PulseSpec::sine_square(0.7, 10.0);
            let q = p.with_phase(phi);
            let lhs = eval_pulse(&q, t);
            let rhs = Complex64::from_polar(1.0, phi) * eval_pulse(&p, t);
            prop_assert!((lhs - rhs).norm() <= 1e-15);
        }

        #[test]
        fn pulse_time_translation(t in -5.0f64..15.0, shift in -3.0f64..3.0) {
            for p in [PulseSpec::sine_square(1.0, 8.0), PulseSpec::rectangular(1.0, 8.0)] {
                let q = p.with_start(p.start_time + shift);
                prop_assert!((eval_pulse(&q, t + shift) - eval_pulse(&p, t)).norm() <= 1e-12);
            }
        }

        #[test]
        fn switch_off_is_monotone(t in -50.0f64..50.0, dt in 0.0f64..10.0) {
            let s = ControlSchedule::switched_off(2.0, 1.0, 0.0, 3.0);
            prop_assert!(s.value(t + dt).norm() <= s.value(t).norm() + 1e-15);
            prop_assert!(s.value(t).norm() <= 2.0);
        }
    }
}
