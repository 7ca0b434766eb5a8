//! Dark and bright polaritons, mixing angles and the adiabatic predictions
//! built on them: transmitted fields, stored coherence, pulse position and
//! compression.

use std::f64::consts::FRAC_PI_2;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{DoubleLambda, Signal};
use crate::pulse::{ControlSchedule, PulseSpec};
use crate::solver::ControlPair;

type C64 = Complex64;

/// Mixing angles at one instant.
///
/// `sin θ = (|U₂|² + |U₄|² + 1)^(-1/2)`, `tan φ = |U₄|/|U₂|`. With both controls
/// zero, θ = π/2 and φ is set to 0 by convention.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MixingAngles {
    pub theta: f64,
    pub phi: f64,
    pub arg_u2: f64,
    pub arg_u4: f64,
}

impl MixingAngles {
    pub fn sin_theta(&self) -> f64 {
        sin_cos(self.theta).0
    }

    pub fn cos_theta(&self) -> f64 {
        sin_cos(self.theta).1
    }

    pub fn cos2_theta(&self) -> f64 {
        let c = self.cos_theta();
        c * c
    }

    /// Dark-polariton velocity c·cos²θ.
    pub fn group_velocity(&self, c: f64) -> f64 {
        group_velocity(self.theta, c)
    }
}

/// sin and cos, exact at π/2.
fn sin_cos(x: f64) -> (f64, f64) {
    if x == FRAC_PI_2 {
        (1.0, 0.0)
    } else {
        x.sin_cos()
    }
}

pub fn mixing_angles(u2: C64, u4: C64) -> MixingAngles {
    let (a2, a4) = (u2.norm(), u4.norm());
    let s = a2 * a2 + a4 * a4;
    // atan2 keeps θ accurate at both ends: tan θ = 1/sqrt(s)
    let theta = 1.0f64.atan2(s.sqrt());
    let phi = if s == 0.0 { 0.0 } else { a4.atan2(a2) };
    MixingAngles { theta, phi, arg_u2: u2.arg(), arg_u4: u4.arg() }
}

pub fn group_velocity(theta: f64, c: f64) -> f64 {
    let ct = sin_cos(theta).1;
    c * ct * ct
}

/// Spatial width of the stored coherence relative to the free-space pulse length.
pub fn compression_factor(angles0: &MixingAngles) -> Result<f64> {
    let c2 = angles0.cos2_theta();
    if angles0.cos_theta() <= 0.0 || c2 == 0.0 {
        return Err(Error::Singular("no compression factor without a control field at entry".into()));
    }
    Ok(c2)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PolaritonState {
    /// Dark polariton Ψ.
    pub psi: C64,
    /// Bright polariton Φ (couples to the upper levels).
    pub phi: C64,
    /// Second bright polariton X (imbalance between the two Λ systems).
    pub x: C64,
}

#[inline]
fn phases(a: &MixingAngles) -> (C64, C64) {
    (C64::from_polar(1.0, a.arg_u2), C64::from_polar(1.0, a.arg_u4))
}

pub fn to_polaritons(r1: C64, r3: C64, sigma_bc: C64, a: &MixingAngles) -> PolaritonState {
    let (e2, e4) = phases(a);
    let (q1, q3) = (r1 * e2.conj(), r3 * e4.conj());
    let (st, ct) = sin_cos(a.theta);
    let (sp, cp) = sin_cos(a.phi);
    PolaritonState {
        psi: q1 * (ct * cp) + q3 * (ct * sp) - sigma_bc * st,
        phi: q1 * (st * cp) + q3 * (st * sp) + sigma_bc * ct,
        x: q1 * sp - q3 * cp,
    }
}

/// Inverse of [`to_polaritons`]; returns (R₁, R₃, σ_bc).
pub fn from_polaritons(p: &PolaritonState, a: &MixingAngles) -> (C64, C64, C64) {
    let (e2, e4) = phases(a);
    let (st, ct) = sin_cos(a.theta);
    let (sp, cp) = sin_cos(a.phi);
    let r1 = e2 * (p.psi * (ct * cp) + p.phi * (st * cp) + p.x * sp);
    let r3 = e4 * (p.psi * (ct * sp) + p.phi * (st * sp) - p.x * cp);
    let sigma = p.phi * ct - p.psi * st;
    (r1, r3, sigma)
}

/// The rotation matrix taking (Ψ, Φ, X) to the phase-stripped (R₁, R₃, σ_bc).
pub fn polariton_matrix(theta: f64, phi: f64) -> [[f64; 3]; 3] {
    let (st, ct) = sin_cos(theta);
    let (sp, cp) = sin_cos(phi);
    [[ct * cp, st * cp, sp], [ct * sp, st * sp, -cp], [-st, ct, 0.0]]
}

fn dark_projection(r1_0: C64, r3_0: C64, a0: &MixingAngles) -> Result<C64> {
    let ct0 = a0.cos_theta();
    if ct0 <= 0.0 || !ct0.is_normal() {
        return Err(Error::Singular("entry mixing angle θ₀ = π/2: no control field at entry".into()));
    }
    let (e2, e4) = phases(a0);
    let (sp, cp) = sin_cos(a0.phi);
    Ok((r1_0 * e2.conj() * cp + r3_0 * e4.conj() * sp) / ct0)
}

/// Splits incoming fields into (Ψ, X) assuming Φ = 0 at entry.
pub fn initial_decomposition(r1_0: C64, r3_0: C64, a0: &MixingAngles) -> Result<(C64, C64)> {
    let psi = dark_projection(r1_0, r3_0, a0)?;
    let (e2, e4) = phases(a0);
    let (sp, cp) = sin_cos(a0.phi);
    let x = r1_0 * e2.conj() * sp - r3_0 * e4.conj() * cp;
    Ok((psi, x))
}

/// Adiabatic limit of (R₁, R₃, σ_bc): the dark part of the input carried to
/// angles `a`, with the bright polaritons damped out.
pub fn asymptotic_prediction(r1_0: C64, r3_0: C64, a0: &MixingAngles, a: &MixingAngles) -> Result<(C64, C64, C64)> {
    let psi = dark_projection(r1_0, r3_0, a0)?;
    Ok(from_polaritons(&PolaritonState { psi, phi: C64::new(0.0, 0.0), x: C64::new(0.0, 0.0) }, a))
}

const QUAD_REL_TOL: f64 = 1e-10;

/// ∫ₐᵇ f(τ) dτ by double-exponential quadrature, split at the given breakpoints.
fn integrate_split<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, scale: f64, breaks: &[f64]) -> f64 {
    if b == a {
        return 0.0;
    }
    if b < a {
        return -integrate_split(f, b, a, scale, breaks);
    }
    let mut knots = vec![a];
    knots.extend(breaks.iter().copied().filter(|&x| x > a && x < b));
    knots.push(b);
    knots
        .windows(2)
        .map(|w| quadrature::double_exponential::integrate(&f, w[0], w[1], QUAD_REL_TOL * scale * (w[1] - w[0])).integral)
        .sum()
}

/// Depth of a pulse feature measured from the sample entrance: free flight at
/// `c` until `entry_time` (negative depths), then ∫ c·cos²θ(τ) dτ inside.
///
/// `cos2_theta` is the lab-time schedule of cos²θ; `breakpoints` mark where it
/// changes quickly.
pub fn peak_position<F: Fn(f64) -> f64>(t: f64, entry_time: f64, c: f64, cos2_theta: F, breakpoints: &[f64]) -> f64 {
    if t <= entry_time {
        return c * (t - entry_time);
    }
    integrate_split(|tau| c * cos2_theta(tau), entry_time, t, c, breakpoints)
}

/// Cumulative ∫ c·cos²θ over lab time for switched controls, tabulated
/// across the ramps; outside them the integrand is constant.
#[derive(Clone, Debug)]
struct TravelTable {
    nodes: Vec<f64>,
    /// ∫ from nodes[0] to each node.
    cum: Vec<f64>,
    v_before: f64,
    v_after: f64,
}

/// tanh has saturated to ±1 in f64 beyond this many ramp widths.
const SATURATION_WIDTHS: f64 = 24.0;
const NODES_PER_WIDTH: f64 = 8.0;

impl TravelTable {
    fn new(controls: &ControlPair, c: f64, breaks: &[f64]) -> Option<Self> {
        let events: Vec<(f64, f64)> = controls
            .schedules
            .iter()
            .flat_map(|s| [s.off_time, s.on_time].into_iter().flatten().map(move |t0| (t0, s.ramp_width)))
            .collect();
        if events.is_empty() {
            return None;
        }
        let mut nodes = Vec::new();
        for &(t0, w) in &events {
            let n = (2.0 * SATURATION_WIDTHS * NODES_PER_WIDTH) as usize;
            let a = t0 - SATURATION_WIDTHS * w;
            nodes.extend((0..=n).map(|k| a + 2.0 * SATURATION_WIDTHS * w * k as f64 / n as f64));
        }
        nodes.sort_by(f64::total_cmp);
        nodes.dedup();
        let f = |tau: f64| c * controls.cos2_theta(tau);
        let mut cum = Vec::with_capacity(nodes.len());
        cum.push(0.0);
        for w in nodes.windows(2) {
            let last = *cum.last().unwrap();
            cum.push(last + integrate_split(f, w[0], w[1], c, breaks));
        }
        Some(TravelTable { v_before: f(nodes[0]), v_after: f(*nodes.last().unwrap()), nodes, cum })
    }

    fn at<F: Fn(f64) -> f64>(&self, f: F, tau: f64, c: f64, breaks: &[f64]) -> f64 {
        let (first, last) = (self.nodes[0], *self.nodes.last().unwrap());
        if tau <= first {
            return -self.v_before * (first - tau);
        }
        if tau >= last {
            return self.cum[self.cum.len() - 1] + self.v_after * (tau - last);
        }
        let k = self.nodes.partition_point(|&x| x <= tau) - 1;
        self.cum[k] + integrate_split(f, self.nodes[k], tau, c, breaks)
    }

    /// τ with W(τ) = target, if any.
    fn invert<F: Fn(f64) -> f64>(&self, f: F, target: f64, c: f64, breaks: &[f64]) -> Option<f64> {
        let (first, last) = (self.nodes[0], *self.nodes.last().unwrap());
        let w_last = self.cum[self.cum.len() - 1];
        if target < 0.0 {
            return (self.v_before > 0.0).then(|| first + target / self.v_before);
        }
        if target > w_last {
            return (self.v_after > 0.0).then(|| last + (target - w_last) / self.v_after);
        }
        let k = self.cum.partition_point(|&w| w <= target).clamp(1, self.cum.len() - 1) - 1;
        let (mut lo, mut hi) = (self.nodes[k], self.nodes[k + 1]);
        if self.cum[k + 1] == self.cum[k] {
            return Some(lo);
        }
        // safeguarded Newton on W(τ) − target inside one table cell
        let mut tau = lo + (hi - lo) * (target - self.cum[k]) / (self.cum[k + 1] - self.cum[k]);
        for _ in 0..60 {
            let g = self.cum[k] + integrate_split(&f, self.nodes[k], tau, c, breaks) - target;
            if g > 0.0 {
                hi = tau;
            } else {
                lo = tau;
            }
            let d = f(tau);
            let next = if d > 0.0 { tau - g / d } else { f64::NAN };
            let next = if next > lo && next < hi { next } else { 0.5 * (lo + hi) };
            if (next - tau).abs() <= 1e-15 * tau.abs().max(hi - lo) || hi - lo <= 4.0 * f64::EPSILON * tau.abs() {
                return Some(next);
            }
            tau = next;
        }
        Some(tau)
    }
}

/// Predicted (R₁, R₃, σ_bc) at one point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PredictedPoint {
    pub r1: C64,
    pub r3: C64,
    pub sigma_bc: C64,
}

/// Predictions on a local-time axis at fixed depth.
#[derive(Clone, Debug, PartialEq)]
pub struct PredictionTable {
    pub z: f64,
    pub t_prime: Vec<f64>,
    pub points: Vec<PredictedPoint>,
}

impl PredictionTable {
    pub fn write_csv(&self, path: &Path, header: &[String]) -> Result<()> {
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        for line in header {
            writeln!(w, "# {line}")?;
        }
        writeln!(w, "# z = {:e}", self.z)?;
        writeln!(w, "t,abs_r1,arg_r1,abs_r3,arg_r3,abs_sigma_bc,arg_sigma_bc")?;
        for (t, p) in self.t_prime.iter().zip(&self.points) {
            writeln!(
                w,
                "{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
                t,
                p.r1.norm(),
                p.r1.arg(),
                p.r3.norm(),
                p.r3.arg(),
                p.sigma_bc.norm(),
                p.sigma_bc.arg()
            )?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Closed-form predictions for a configured system, pulses and control schedules.
///
/// Controls are functions of lab time and uniform over the sample; a point of
/// the input that entered at lab time τ sits at depth ∫_τ^t c·cos²θ at time t.
#[derive(Clone, Debug)]
pub struct Predictor {
    pub controls: ControlPair,
    pub signals: [PulseSpec; 2],
    pub signal_factors: [C64; 2],
    pub c: f64,
    breaks: Vec<f64>,
    table: Option<TravelTable>,
}

impl Predictor {
    pub fn new(system: &DoubleLambda, controls: &[ControlSchedule; 2], signals: &[PulseSpec; 2]) -> Self {
        let pair = ControlPair::normalized(system, controls);
        let breaks = pair.breakpoints();
        let c = system.constants.c;
        let table = TravelTable::new(&pair, c, &breaks);
        Predictor {
            controls: pair,
            signals: *signals,
            signal_factors: [system.signal_factor(Signal::One), system.signal_factor(Signal::Three)],
            c,
            breaks,
            table,
        }
    }

    pub fn angles_at(&self, t: f64) -> MixingAngles {
        let [u2, u4] = self.controls.at(t);
        mixing_angles(u2, u4)
    }

    fn speed(&self, tau: f64) -> f64 {
        self.c * self.controls.cos2_theta(tau)
    }

    /// ∫_a^b c·cos²θ(τ) dτ.
    pub fn travel(&self, a: f64, b: f64) -> f64 {
        match &self.table {
            None => self.speed(a) * (b - a),
            Some(tab) => {
                let f = |tau| self.speed(tau);
                tab.at(f, b, self.c, &self.breaks) - tab.at(f, a, self.c, &self.breaks)
            }
        }
    }

    /// Normalised input fields at the entrance at time `t`.
    pub fn input_at(&self, t: f64) -> (C64, C64) {
        (self.signal_factors[0] * self.signals[0].value(t), self.signal_factors[1] * self.signals[1].value(t))
    }

    /// Depth of the input feature that entered at `entry_time`, at lab time `t`.
    pub fn position(&self, t: f64, entry_time: f64) -> f64 {
        if t <= entry_time {
            return self.c * (t - entry_time);
        }
        self.travel(entry_time, t)
    }

    /// Depth of the peak of signal `which` at lab time `t`.
    pub fn peak_position(&self, which: Signal, t: f64) -> f64 {
        self.position(t, self.signals[which.index()].peak_time())
    }

    /// Entry time of the input feature found at depth `z` at lab time `t`;
    /// `None` if no such feature exists (light stopped before reaching `z`).
    pub fn entry_time(&self, z: f64, t: f64) -> Option<f64> {
        if z <= 0.0 {
            return Some(t + z / self.c);
        }
        match &self.table {
            None => {
                let v = self.speed(t);
                (v > 0.0).then(|| t - z / v)
            }
            Some(tab) => {
                let f = |tau| self.speed(tau);
                let target = tab.at(f, t, self.c, &self.breaks) - z;
                tab.invert(f, target, self.c, &self.breaks)
            }
        }
    }

    /// Adiabatic fields at depth `z` and local time `t' = t − z/c`.
    pub fn predict(&self, z: f64, t_prime: f64) -> Result<PredictedPoint> {
        let t = t_prime + z / self.c;
        let zero = C64::new(0.0, 0.0);
        let Some(te) = self.entry_time(z, t) else {
            return Ok(PredictedPoint { r1: zero, r3: zero, sigma_bc: zero });
        };
        let (r1_0, r3_0) = self.input_at(te);
        if r1_0 == zero && r3_0 == zero {
            return Ok(PredictedPoint { r1: zero, r3: zero, sigma_bc: zero });
        }
        let (r1, r3, sigma_bc) = asymptotic_prediction(r1_0, r3_0, &self.angles_at(te), &self.angles_at(t))?;
        Ok(PredictedPoint { r1, r3, sigma_bc })
    }

    pub fn table(&self, z: f64, t_prime: &[f64]) -> Result<PredictionTable> {
        let points = t_prime.iter().map(|&t| self.predict(z, t)).collect::<Result<Vec<_>>>()?;
        Ok(PredictionTable { z, t_prime: t_prime.to_vec(), points })
    }

    /// Predicted σ_bc over depth at the last local time of a run.
    pub fn coherence_profile(&self, z: &[f64], t_prime: f64) -> Result<Vec<C64>> {
        z.iter().map(|&zi| self.predict(zi, t_prime).map(|p| p.sigma_bc)).collect()
    }

    /// Peak heights of the transmitted signals at depth `z` for constant controls.
    pub fn transmitted_peaks(&self, z: f64) -> Result<(C64, C64)> {
        let t1 = self.signals[0].peak_time();
        let t3 = self.signals[1].peak_time();
        let tp1 = self.position_to_local(z, t1);
        let tp3 = self.position_to_local(z, t3);
        Ok((self.predict(z, tp1)?.r1, self.predict(z, tp3)?.r3))
    }

    fn position_to_local(&self, z: f64, entry: f64) -> f64 {
        // constant controls: the feature reaches z after z/v
        let v = self.c * self.controls.cos2_theta(entry);
        entry + z / v - z / self.c
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_4, PI};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn angle_limits() {
        let a = mixing_angles(c(0.0, 0.0), c(0.0, 0.0));
        assert_eq!(a.theta, FRAC_PI_2);
        assert_eq!(a.phi, 0.0);
        assert!(a.group_velocity(1.0).abs() < 1e-30);
        let a = mixing_angles(c(2.0, 0.0), c(0.0, 2.0));
        assert!((a.phi - FRAC_PI_4).abs() < 1e-15);
        let a = mixing_angles(c(1.0, 0.0), c(1.0, 0.0));
        assert!((a.sin_theta() - 3f64.sqrt().recip()).abs() < 1e-15);
        assert!((a.group_velocity(3.0) - 2.0).abs() < 1e-14);
        assert!((compression_factor(&a).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        let big = mixing_angles(c(1e8, 0.0), c(0.0, 0.0));
        assert!((compression_factor(&big).unwrap() - 1.0).abs() < 1e-15);
        assert!(compression_factor(&mixing_angles(c(0.0, 0.0), c(0.0, 0.0))).is_err());
    }

    #[test]
    fn pure_dark_state() {
        let a = mixing_angles(c(0.5, 0.0), c(0.3, 0.0));
        let p = PolaritonState { psi: c(1.0, 0.0), phi: c(0.0, 0.0), x: c(0.0, 0.0) };
        let (r1, r3, s) = from_polaritons(&p, &a);
        let (st, ct) = sin_cos(a.theta);
        let (sp, cp) = sin_cos(a.phi);
        assert!((r1 - ct * cp).norm() < 1e-15);
        assert!((r3 - ct * sp).norm() < 1e-15);
        assert!((s + st).norm() < 1e-15);
    }

    #[test]
    fn matched_fields_are_dark() {
        let (u2, u4) = (c(0.3, 0.4), c(-0.2, 0.7));
        let a = mixing_angles(u2, u4);
        let lam = c(0.8, -1.1);
        // adiabatic family: R = λU, σ_bc = −λ
        let p = to_polaritons(lam * u2, lam * u4, -lam, &a);
        assert!(p.x.norm() < 1e-15);
        assert!(p.phi.norm() < 1e-15);
    }

    #[test]
    fn decomposition_examples() {
        let a0 = mixing_angles(c(1.0, 0.0), c(1.0, 0.0));
        let r = c(0.7, 0.2);
        let (psi, x) = initial_decomposition(r, c(0.0, 0.0), &a0).unwrap();
        assert!((psi - r / (2f64.sqrt() * a0.cos_theta())).norm() < 1e-15);
        assert!((x - r / 2f64.sqrt()).norm() < 1e-15);
        let (_, x) = initial_decomposition(r, r, &a0).unwrap();
        assert!(x.norm() < 1e-15);
        assert!(initial_decomposition(r, r, &mixing_angles(c(0.0, 0.0), c(0.0, 0.0))).is_err());
    }

    #[test]
    fn single_input_spawns_the_other_signal() {
        let a = mixing_angles(c(2.0, 0.0), c(2.0, 0.0));
        let r = c(1.0, 0.5);
        let (r1, r3, _) = asymptotic_prediction(r, c(0.0, 0.0), &a, &a).unwrap();
        assert!((r1 - r / 2.0).norm() < 1e-15);
        assert!((r3 - r / 2.0).norm() < 1e-15);
    }

    #[test]
    fn matched_inputs_fully_transmitted() {
        let (u2, u4) = (c(0.3, 0.4), c(0.1, -0.7));
        let a = mixing_angles(u2, u4);
        let lam = c(0.2, 0.9);
        let (r1, r3, _) = asymptotic_prediction(lam * u2, lam * u4, &a, &a).unwrap();
        assert!((r1 - lam * u2).norm() < 1e-15);
        assert!((r3 - lam * u4).norm() < 1e-15);
    }

    #[test]
    fn stored_coherence_phase_line() {
        let a0 = mixing_angles(c(1.0, 0.0), c(1.0, 0.0));
        let off = mixing_angles(c(0.0, 0.0), c(0.0, 0.0));
        for k in [0.0, 0.5, 1.0, 2.0, 2.5] {
            let p3 = k * PI / 6.0;
            let (r1, r3, s) = asymptotic_prediction(c(1.0, 0.0), C64::from_polar(1.0, p3), &a0, &off).unwrap();
            assert!(r1.norm() < 1e-16 && r3.norm() < 1e-16);
            let expect = PI + p3 / 2.0;
            let d = (s.arg() - expect).rem_euclid(2.0 * PI);
            assert!(d.min(2.0 * PI - d) < 1e-14, "phi3 = {p3}");
        }
    }

    #[test]
    fn peak_position_limits() {
        let cc = 137.0;
        assert_eq!(peak_position(1.0, 3.0, cc, |_| 0.5, &[]), -2.0 * cc);
        let z = peak_position(13.0, 3.0, cc, |_| 0.25, &[]);
        assert!((z - cc * 0.25 * 10.0).abs() < 1e-8 * z);
        // velocity drops to zero at t = 8: position freezes
        let step = |t: f64| if t < 8.0 { 0.25 } else { 0.0 };
        let z1 = peak_position(20.0, 3.0, cc, step, &[8.0]);
        let z2 = peak_position(50.0, 3.0, cc, step, &[8.0]);
        assert!((z1 - cc * 0.25 * 5.0).abs() < 1e-8 * z1);
        assert_eq!(z1, z2);
    }

    fn angles() -> impl Strategy<Value = (f64, f64, f64, f64)> {
        (1e-3..FRAC_PI_2, 0.0..FRAC_PI_2, -PI..PI, -PI..PI)
    }

    fn cplx() -> impl Strategy<Value = C64> {
        (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(a, b)| C64::new(a, b))
    }

    proptest! {
        #[test]
        fn round_trip((th, ph, a2, a4) in angles(), r1 in cplx(), r3 in cplx(), s in cplx()) {
            let a = MixingAngles { theta: th, phi: ph, arg_u2: a2, arg_u4: a4 };
            let p = to_polaritons(r1, r3, s, &a);
            let (b1, b3, bs) = from_polaritons(&p, &a);
            let scale = r1.norm().max(r3.norm()).max(s.norm()).max(1e-300);
            prop_assert!((b1 - r1).norm() <= 1e-12 * scale);
            prop_assert!((b3 - r3).norm() <= 1e-12 * scale);
            prop_assert!((bs - s).norm() <= 1e-12 * scale);
        }

        #[test]
        fn orthogonality(th in 0.0..FRAC_PI_2, ph in 0.0..FRAC_PI_2) {
            let m = polariton_matrix(th, ph);
            for i in 0..3 {
                for j in 0..3 {
                    let dot: f64 = (0..3).map(|k| m[i][k] * m[j][k]).sum();
                    let id = if i == j { 1.0 } else { 0.0 };
                    prop_assert!((dot - id).abs() < 1e-14);
                }
            }
        }

        #[test]
        fn dark_projection_contracts(u2 in cplx(), u4 in cplx(), r1 in cplx(), r3 in cplx()) {
            prop_assume!(u2.norm() + u4.norm() > 1e-3);
            let a = mixing_angles(u2, u4);
            let (p1, p3, _) = asymptotic_prediction(r1, r3, &a, &a).unwrap();
            let (_, x) = initial_decomposition(r1, r3, &a).unwrap();
            let e_in = r1.norm_sqr() + r3.norm_sqr();
            let e_out = p1.norm_sqr() + p3.norm_sqr();
            prop_assert!(e_out <= e_in * (1.0 + 1e-12));
            prop_assert!((e_in - e_out - x.norm_sqr()).abs() <= 1e-12 * e_in.max(1e-300));
        }

        #[test]
        fn prediction_is_dark_reconstruction(u2 in cplx(), u4 in cplx(), v2 in cplx(), v4 in cplx(), r1 in cplx(), r3 in cplx()) {
            prop_assume!(u2.norm() + u4.norm() > 1e-3);
            let (a0, a) = (mixing_angles(u2, u4), mixing_angles(v2, v4));
            let (psi, _) = initial_decomposition(r1, r3, &a0).unwrap();
            let dark = PolaritonState { psi, phi: C64::new(0.0, 0.0), x: C64::new(0.0, 0.0) };
            let (e1, e3, es) = from_polaritons(&dark, &a);
            let (p1, p3, ps) = asymptotic_prediction(r1, r3, &a0, &a).unwrap();
            let scale = psi.norm().max(1e-300);
            prop_assert!((e1 - p1).norm() <= 1e-12 * scale);
            prop_assert!((e3 - p3).norm() <= 1e-12 * scale);
            prop_assert!((es - ps).norm() <= 1e-12 * scale);
        }

        #[test]
        fn final_phase_covariance(u2 in cplx(), u4 in cplx(), r1 in cplx(), r3 in cplx(), alpha in -PI..PI) {
            prop_assume!(u2.norm() > 1e-3 && u4.norm() > 1e-3);
            let a0 = mixing_angles(u2, u4);
            let a = a0;
            let mut b = a0;
            b.arg_u2 += alpha;
            let (p1, p3, ps) = asymptotic_prediction(r1, r3, &a0, &a).unwrap();
            let (q1, q3, qs) = asymptotic_prediction(r1, r3, &a0, &b).unwrap();
            prop_assert!((q1 - p1 * C64::from_polar(1.0, alpha)).norm() <= 1e-12 * p1.norm().max(1e-12));
            prop_assert!((q3 - p3).norm() <= 1e-15 * p3.norm().max(1.0));
            prop_assert!((qs - ps).norm() <= 1e-15 * ps.norm().max(1.0));
        }
    }
}
