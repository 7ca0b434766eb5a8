//! Linear susceptibilities of the medium for the two signal fields, with
//! sideband frequency ω measured from the carriers (fields ∝ e^{−iωt}).
//!
//! The polarisation is `N d₁ σ_ba = 2πε₀ (χ₁₁ ε₁ + χ₁₃ ε₃)` and
//! `N d₃ σ_bd = 2πε₀ (χ₃₁ ε₁ + χ₃₃ ε₃)`.

use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Detunings, DoubleLambda};

type C64 = Complex64;

/// Points closer than this (relative to the local frequency scale) to a pole are flagged.
pub const POLE_TOLERANCE: f64 = 1e-14;

/// N d_i d_j* / (4πħε₀) for the four components.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Prefactors {
    pub c11: f64,
    pub c13: C64,
    pub c31: C64,
    pub c33: f64,
}

impl Prefactors {
    pub fn new(system: &DoubleLambda) -> Self {
        let k = &system.constants;
        let n = system.medium.density;
        let (d1, d3) = (system.scheme.dipoles[0], system.scheme.dipoles[2]);
        let s = n / (4.0 * std::f64::consts::PI * k.hbar * k.eps0);
        Prefactors {
            c11: s * d1.norm_sqr(),
            c13: d1 * d3.conj() * s,
            c31: d1.conj() * d3 * s,
            c33: s * d3.norm_sqr(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SusceptibilityMatrix {
    pub omega_grid: Vec<f64>,
    pub chi11: Vec<C64>,
    pub chi13: Vec<C64>,
    pub chi31: Vec<C64>,
    pub chi33: Vec<C64>,
    /// Roots of the common cubic denominator.
    pub poles: Vec<C64>,
    /// Grid points sitting on a pole; their values are NaN.
    pub flagged: Vec<bool>,
}

impl SusceptibilityMatrix {
    /// χ₁₁ + χ₁₃·(ε₃/ε₁), the response seen by field 1 for a fixed field ratio.
    pub fn combined(&self, field_ratio: C64) -> Vec<C64> {
        self.chi11.iter().zip(&self.chi13).map(|(a, b)| a + b * field_ratio).collect()
    }

    pub fn write_csv(&self, path: &Path, header: &[String]) -> Result<()> {
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        for line in header {
            writeln!(w, "# {line}")?;
        }
        let poles: Vec<String> = self.poles.iter().map(|p| format!("{:e}{:+e}i", p.re, p.im)).collect();
        writeln!(w, "# poles: {}", poles.join(" "))?;
        writeln!(w, "omega,re_chi11,im_chi11,re_chi13,im_chi13,re_chi31,im_chi31,re_chi33,im_chi33")?;
        for i in 0..self.omega_grid.len() {
            writeln!(
                w,
                "{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
                self.omega_grid[i],
                self.chi11[i].re,
                self.chi11[i].im,
                self.chi13[i].re,
                self.chi13[i].im,
                self.chi31[i].re,
                self.chi31[i].im,
                self.chi33[i].re,
                self.chi33[i].im
            )?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Coefficients (c₀, c₁, c₂) of the monic cubic
/// `(ω−Δ₁)(ω−Δ₃)(ω−δ) − |Ω₂|²(ω−Δ₃) − |Ω₄|²(ω−Δ₁) = ω³ + c₂ω² + c₁ω + c₀`.
fn denominator_coefficients(d: &Detunings, o2: f64, o4: f64) -> [C64; 3] {
    let (a, b, g) = (d.delta1, d.delta3, d.delta);
    [
        -a * b * g + b * o2 + a * o4,
        a * b + a * g + b * g - o2 - o4,
        -(a + b + g),
    ]
}

fn eval_monic(c: &[C64; 3], x: C64) -> C64 {
    ((x + c[2]) * x + c[1]) * x + c[0]
}

/// Roots of the common denominator (Durand–Kerner, then Newton polishing).
pub fn denominator_poles(d: &Detunings, omega2: C64, omega4: C64) -> Vec<C64> {
    let c = denominator_coefficients(d, omega2.norm_sqr(), omega4.norm_sqr());
    let scale = c
        .iter()
        .enumerate()
        .map(|(k, ck)| ck.norm().powf(1.0 / (3 - k) as f64))
        .fold(0.0, f64::max);
    if scale == 0.0 {
        return vec![C64::new(0.0, 0.0); 3];
    }
    let seed = C64::new(0.4, 0.9) * scale;
    let mut z = [seed, seed * seed / scale, seed * seed * seed / (scale * scale)];
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..3 {
            let mut den = C64::new(1.0, 0.0);
            for j in 0..3 {
                if i != j {
                    den *= z[i] - z[j];
                }
            }
            if den == C64::new(0.0, 0.0) {
                den = C64::new(f64::EPSILON * scale, 0.0);
            }
            let step = eval_monic(&c, z[i]) / den;
            z[i] -= step;
            moved = moved.max(step.norm());
        }
        if moved <= 1e-17 * scale {
            break;
        }
    }
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let f = eval_monic(&c, *zi);
            let df = (3.0 * *zi + 2.0 * c[2]) * *zi + c[1];
            if df.norm() == 0.0 {
                break;
            }
            *zi -= f / df;
        }
    }
    let mut v = z.to_vec();
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    v
}

fn near_pole(omega: f64, poles: &[C64], scale: f64) -> bool {
    let tol = POLE_TOLERANCE * scale.max(omega.abs());
    poles.iter().any(|p| (C64::from(omega) - p).norm() <= tol)
}

fn frequency_scale(d: &Detunings, omega2: C64, omega4: C64) -> f64 {
    [d.delta1.norm(), d.delta3.norm(), d.delta.norm(), omega2.norm(), omega4.norm()]
        .into_iter()
        .fold(f64::MIN_POSITIVE, f64::max)
}

fn relaxation_free(d: &Detunings) -> bool {
    d.delta1.im == 0.0 && d.delta3.im == 0.0 && d.delta.im == 0.0
}

fn strict_error(omega: f64, poles: &[C64]) -> Error {
    let p = poles
        .iter()
        .min_by(|a, b| (C64::from(omega) - *a).norm().total_cmp(&(C64::from(omega) - *b).norm()))
        .copied()
        .unwrap_or_default();
    Error::Singular(format!("ω = {omega:e} lies on the pole {:e}{:+e}i", p.re, p.im))
}

fn assemble<F>(omega_grid: &[f64], poles: Vec<C64>, scale: f64, strict: bool, eval: F) -> Result<SusceptibilityMatrix>
where
    F: Fn(f64) -> [C64; 4] + Sync,
{
    let nan = C64::new(f64::NAN, f64::NAN);
    let rows: Vec<(bool, [C64; 4])> = omega_grid
        .par_iter()
        .map(|&w| if near_pole(w, &poles, scale) { (true, [nan; 4]) } else { (false, eval(w)) })
        .collect();
    if strict {
        if let Some(i) = rows.iter().position(|r| r.0) {
            return Err(strict_error(omega_grid[i], &poles));
        }
    }
    let mut m = SusceptibilityMatrix {
        omega_grid: omega_grid.to_vec(),
        chi11: Vec::with_capacity(rows.len()),
        chi13: Vec::with_capacity(rows.len()),
        chi31: Vec::with_capacity(rows.len()),
        chi33: Vec::with_capacity(rows.len()),
        poles,
        flagged: Vec::with_capacity(rows.len()),
    };
    for (f, [a, b, c, d]) in rows {
        m.flagged.push(f);
        m.chi11.push(a);
        m.chi13.push(b);
        m.chi31.push(c);
        m.chi33.push(d);
    }
    Ok(m)
}

/// Full susceptibility matrix with detunings and relaxation.
///
/// Points on a pole are flagged (NaN values). With `strict` set and no
/// relaxation anywhere, hitting a pole is an error instead.
pub fn chi_matrix(
    omega_grid: &[f64],
    detunings: &Detunings,
    omega2: C64,
    omega4: C64,
    system: &DoubleLambda,
    strict: bool,
) -> Result<SusceptibilityMatrix> {
    let p = Prefactors::new(system);
    let (o2, o4) = (omega2.norm_sqr(), omega4.norm_sqr());
    let d = *detunings;
    let poles = denominator_poles(&d, omega2, omega4);
    let scale = frequency_scale(&d, omega2, omega4);
    let strict = strict && relaxation_free(&d);
    assemble(omega_grid, poles, scale, strict, |w| {
        let w = C64::from(w);
        let (a, b, g) = (w - d.delta1, w - d.delta3, w - d.delta);
        let den = a * b * g - o2 * b - o4 * a;
        [
            p.c11 * (b * g - o4) / den,
            p.c13 * omega2 * omega4.conj() / den,
            p.c31 * omega2.conj() * omega4 / den,
            p.c33 * (a * g - o2) / den,
        ]
    })
}

/// The resonant, relaxation-free limit, singular at ω = 0 and ω = ±sqrt(|Ω₂|² + |Ω₄|²).
pub fn chi_resonant(
    omega_grid: &[f64],
    omega2: C64,
    omega4: C64,
    system: &DoubleLambda,
    strict: bool,
) -> Result<SusceptibilityMatrix> {
    let p = Prefactors::new(system);
    let (o2, o4) = (omega2.norm_sqr(), omega4.norm_sqr());
    let r = (o2 + o4).sqrt();
    let poles = vec![C64::from(-r), C64::from(0.0), C64::from(r)];
    let scale = frequency_scale(&Detunings::zero(), omega2, omega4);
    assemble(omega_grid, poles, scale, strict, |w| {
        let den = w * w * w - w * (o2 + o4);
        [
            C64::from(p.c11 * (w * w - o4) / den),
            p.c13 * omega2 * omega4.conj() / den,
            p.c31 * omega2.conj() * omega4 / den,
            C64::from(p.c33 * (w * w - o2) / den),
        ]
    })
}

/// ε₃/ε₁ = d₁*Ω₄/(d₃*Ω₂): the field ratio under which both Λ systems share one dark state.
pub fn adiabatic_field_ratio(system: &DoubleLambda, omega2: C64, omega4: C64) -> Result<C64> {
    if omega2.norm() == 0.0 {
        return Err(Error::Domain("adiabatic field ratio undefined for Ω₂ = 0".into()));
    }
    let (d1, d3) = (system.scheme.dipoles[0], system.scheme.dipoles[2]);
    Ok(d1.conj() * omega4 / (d3.conj() * omega2))
}

/// Effective χ₁₁ for fields in the adiabatic ratio: `C·ω/(ω² − |Ω₂|² − |Ω₄|²)`,
/// zero at line centre and singular only at ±sqrt(|Ω₂|² + |Ω₄|²) (NaN there).
pub fn chi_adiabatic(omega_grid: &[f64], omega2: C64, omega4: C64, system: &DoubleLambda) -> Result<Vec<C64>> {
    if omega2.norm() == 0.0 {
        return Err(Error::Domain("adiabatic substitution undefined for Ω₂ = 0".into()));
    }
    let c = Prefactors::new(system).c11;
    let w2 = omega2.norm_sqr() + omega4.norm_sqr();
    Ok(omega_grid
        .iter()
        .map(|&w| {
            let den = w * w - w2;
            if den == 0.0 {
                C64::new(f64::NAN, f64::NAN)
            } else {
                C64::from(c * w / den)
            }
        })
        .collect())
}

/// Two-level response `C/(ω − Δ₁)` with no control field.
pub fn chi_bare(omega_grid: &[f64], delta1: C64, system: &DoubleLambda) -> Vec<C64> {
    let c = Prefactors::new(system).c11;
    omega_grid.iter().map(|&w| c / (w - delta1)).collect()
}

/// Default ω grid: 2001 points over ±5Ω, where Ω = sqrt(|Ω₂|² + |Ω₄|²); 801
/// uniform points plus 400 log-spaced points clustered around each of 0 and ±Ω.
pub fn default_omega_grid(omega_eff: f64) -> Vec<f64> {
    let w = if omega_eff > 0.0 { omega_eff } else { 1.0 };
    let mut g: Vec<f64> = (0..801).map(|i| w * (-5.0 + 10.0 * i as f64 / 800.0)).collect();
    let cluster = |lo: f64, hi: f64| -> Vec<f64> {
        (0..200).map(move |i| w * lo * (hi / lo).powf(i as f64 / 199.0)).collect()
    };
    for off in cluster(1e-2, 0.5) {
        g.push(off);
        g.push(-off);
    }
    for off in cluster(1e-3, 0.5) {
        g.push(w + off);
        g.push(w - off);
        g.push(-w + off);
        g.push(-w - off);
    }
    g.sort_by(f64::total_cmp);
    g
}

/// Absorption relative to the bare two-level response: `|χ|·|ω − Δ₁|/C` for a
/// relaxation-free Δ₁, otherwise `|Im χ| / |Im χ_bare|`.
pub fn absorption_ratio(omega_grid: &[f64], chi: &[C64], delta1: C64, system: &DoubleLambda) -> Vec<f64> {
    let bare = chi_bare(omega_grid, delta1, system);
    chi.iter()
        .zip(&bare)
        .map(|(x, b)| {
            if delta1.im == 0.0 {
                if b.norm().is_infinite() || b.is_nan() {
                    0.0
                } else {
                    x.norm() / b.norm()
                }
            } else {
                x.im.abs() / b.im.abs()
            }
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TransparencyWindow {
    pub half_width: f64,
    /// The ratio never crossed the threshold on one side; the window is at least as wide as the grid.
    pub exceeds_grid: bool,
}

/// Half-width of the interval around ω = 0 where the absorption ratio stays below `threshold`.
pub fn transparency_window(omega_grid: &[f64], ratio: &[f64], threshold: f64) -> Result<TransparencyWindow> {
    if omega_grid.len() != ratio.len() || omega_grid.len() < 2 {
        return Err(Error::Usage("frequency grid and absorption curve must match and hold two points".into()));
    }
    if threshold <= 0.0 {
        return Ok(TransparencyWindow { half_width: 0.0, exceeds_grid: false });
    }
    let centre = (0..omega_grid.len())
        .min_by(|&a, &b| omega_grid[a].abs().total_cmp(&omega_grid[b].abs()))
        .unwrap();
    let below = |i: usize| ratio[i].is_finite() && ratio[i] < threshold;
    if !below(centre) {
        return Ok(TransparencyWindow { half_width: 0.0, exceeds_grid: false });
    }
    let crossing = |dir: isize| -> Option<f64> {
        let mut i = centre as isize;
        loop {
            let j = i + dir;
            if j < 0 || j as usize >= omega_grid.len() {
                return None;
            }
            let (iu, ju) = (i as usize, j as usize);
            if !below(ju) {
                let (r0, r1) = (ratio[iu], ratio[ju]);
                let f = if r1.is_finite() && r1 != r0 { ((threshold - r0) / (r1 - r0)).clamp(0.0, 1.0) } else { 0.0 };
                return Some((omega_grid[iu] + f * (omega_grid[ju] - omega_grid[iu])).abs());
            }
            i = j;
        }
    };
    match (crossing(-1), crossing(1)) {
        (Some(l), Some(r)) => Ok(TransparencyWindow { half_width: l.min(r), exceeds_grid: false }),
        (Some(w), None) | (None, Some(w)) => Ok(TransparencyWindow { half_width: w, exceeds_grid: true }),
        (None, None) => Ok(TransparencyWindow {
            half_width: omega_grid.iter().fold(0.0f64, |m, w| m.max(w.abs())),
            exceeds_grid: true,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{reference_scheme, PhysicalConstants};
    use proptest::prelude::*;

    fn system() -> DoubleLambda {
        let k = PhysicalConstants::atomic();
        DoubleLambda::new(k, reference_scheme(&k).unwrap(), 3e-13, 1e7).unwrap()
    }

    fn rel(a: C64, b: C64) -> f64 {
        (a - b).norm() / b.norm().max(1e-300)
    }

    const O2: f64 = 1.8e-9;
    const O4: f64 = 2.1e-9;

    #[test]
    fn single_lambda_limit() {
        let s = system();
        let d = Detunings::new(C64::new(0.0, -1.2e-9), C64::new(0.0, -1.2e-9), C64::new(3e-10, -1e-11)).unwrap();
        let grid = [-3e-9, -1e-9, 0.0, 4e-10, 2e-9];
        let m = chi_matrix(&grid, &d, C64::from(O2), C64::from(0.0), &s, false).unwrap();
        let c = Prefactors::new(&s).c11;
        for (i, &w) in grid.iter().enumerate() {
            assert_eq!(m.chi13[i], C64::from(0.0));
            assert_eq!(m.chi31[i], C64::from(0.0));
            let (a, g) = (d.delta1 - w, d.delta - w);
            let expect = -c * g / (a * g - O2 * O2);
            assert!(rel(m.chi11[i], expect) < 1e-13);
        }
    }

    #[test]
    fn two_level_limit() {
        let s = system();
        let d = Detunings::new(C64::new(0.0, -1.2e-9), C64::new(0.0, -1.2e-9), C64::new(0.0, -1e-11)).unwrap();
        let grid = [-3e-9, 0.0, 2e-9];
        let m = chi_matrix(&grid, &d, C64::from(0.0), C64::from(0.0), &s, false).unwrap();
        let c = Prefactors::new(&s).c11;
        for (i, &w) in grid.iter().enumerate() {
            assert!(rel(m.chi11[i], -c / (d.delta1 - w)) < 1e-14);
        }
    }

    #[test]
    fn resonant_residue_at_zero() {
        let s = system();
        let c = Prefactors::new(&s).c11;
        let w = 1e-20;
        let m = chi_resonant(&[w], C64::from(O2), C64::from(O4), &s, true).unwrap();
        let residue = c * O4 * O4 / (O2 * O2 + O4 * O4);
        assert!(((m.chi11[0] * w).re - residue).abs() < 1e-12 * residue);
    }

    #[test]
    fn strict_mode_names_the_pole() {
        let s = system();
        let r = (O2 * O2 + O4 * O4).sqrt();
        let e = chi_resonant(&[0.5 * r, r], C64::from(O2), C64::from(O4), &s, true).unwrap_err();
        assert!(matches!(e, Error::Singular(_)));
        let m = chi_resonant(&[0.5 * r, r], C64::from(O2), C64::from(O4), &s, false).unwrap();
        assert_eq!(m.flagged, vec![false, true]);
        assert!(m.chi11[1].is_nan());
        // relaxation keeps the poles off the real axis: strict is moot
        let d = Detunings::new(C64::new(0.0, -1e-9), C64::new(0.0, -1e-9), C64::from(0.0)).unwrap();
        assert!(chi_matrix(&[0.0, r], &d, C64::from(O2), C64::from(O4), &s, true).is_ok());
    }

    #[test]
    fn adiabatic_values() {
        let s = system();
        let a = chi_adiabatic(&[0.0, 1e-9], C64::from(O2), C64::from(O4), &s).unwrap();
        assert_eq!(a[0], C64::from(0.0));
        assert!(chi_adiabatic(&[0.0], C64::from(0.0), C64::from(O4), &s).is_err());
        assert!(adiabatic_field_ratio(&s, C64::from(0.0), C64::from(O4)).is_err());
    }

    #[test]
    fn window_scaling_and_widening() {
        let s = system();
        let win = |o2: f64, o4: f64, grid_scale: f64| {
            let g = default_omega_grid(grid_scale);
            let chi = if o4 == 0.0 {
                chi_resonant(&g, C64::from(o2), C64::from(0.0), &s, false).unwrap().chi11
            } else {
                chi_adiabatic(&g, C64::from(o2), C64::from(o4), &s).unwrap()
            };
            let r = absorption_ratio(&g, &chi, C64::from(0.0), &s);
            transparency_window(&g, &r, 0.5).unwrap()
        };
        let w1 = win(O2, O4, 4e-9);
        let w2 = win(2.0 * O2, 2.0 * O4, 8e-9);
        assert!(!w1.exceeds_grid);
        assert!((w2.half_width / w1.half_width - 2.0).abs() < 1e-3, "{w1:?} {w2:?}");
        let single = win(O2, 0.0, 4e-9);
        assert!(w1.half_width > single.half_width);
        let g = default_omega_grid(4e-9);
        let chi = chi_adiabatic(&g, C64::from(O2), C64::from(O4), &s).unwrap();
        let r = absorption_ratio(&g, &chi, C64::from(0.0), &s);
        assert_eq!(transparency_window(&g, &r, 0.0).unwrap().half_width, 0.0);
        assert!(transparency_window(&g, &r, 1e6).unwrap().exceeds_grid);
    }

    #[test]
    fn absorption_dip_at_line_centre() {
        let s = system();
        let d = Detunings::new(C64::new(0.0, -1.2e-9), C64::new(0.0, -1.2e-9), C64::from(0.0)).unwrap();
        let (o2, o4) = (C64::from(O2), C64::from_polar(O4, 0.7));
        let grid = [-1e-10, 0.0, 1e-10];
        let m = chi_matrix(&grid, &d, o2, o4, &s, false).unwrap();
        let comb = m.combined(adiabatic_field_ratio(&s, o2, o4).unwrap());
        assert!(comb[1].im.abs() < comb[0].im.abs());
        assert!(comb[1].im.abs() < comb[2].im.abs());
    }

    #[test]
    fn default_grid_shape() {
        let g = default_omega_grid(2.0);
        assert_eq!(g.len(), 2001);
        assert_eq!(g[0], -10.0);
        assert_eq!(g[2000], 10.0);
        assert!(g.windows(2).all(|w| w[0] <= w[1]));
    }

    fn cpx(m: f64) -> impl Strategy<Value = C64> {
        (0.1 * m..m, -3.2..3.2f64).prop_map(|(r, a)| C64::from_polar(r, a))
    }

    proptest! {
        #[test]
        fn poles_reproduce_denominator(o2 in cpx(3e-9), o4 in cpx(3e-9), g1 in 0.0..2e-9f64, g3 in 0.0..2e-9f64, dl in -1e-9..1e-9f64) {
            let d = Detunings::new(C64::new(dl, -g1), C64::new(-dl, -g3), C64::new(0.3 * dl, -1e-11)).unwrap();
            let poles = denominator_poles(&d, o2, o4);
            prop_assert!(poles.len() <= 3);
            let c = denominator_coefficients(&d, o2.norm_sqr(), o4.norm_sqr());
            let scale = frequency_scale(&d, o2, o4);
            for w in [-2e-9, 0.0, 1.3e-9, 4e-9] {
                let x = C64::from(w);
                let prod = (x - poles[0]) * (x - poles[1]) * (x - poles[2]);
                let direct = eval_monic(&c, x);
                let mag = (x.norm() + scale).powi(3);
                prop_assert!((prod - direct).norm() <= 1e-10 * mag);
            }
        }

        #[test]
        fn matrix_reduces_to_resonant_form(o2 in cpx(3e-9), o4 in cpx(3e-9), t in -5.0..5.0f64) {
            let s = system();
            let r = (o2.norm_sqr() + o4.norm_sqr()).sqrt();
            let w = t * r;
            prop_assume!((w.abs() - r).abs() > 1e-3 * r && w.abs() > 1e-6 * r);
            let full = chi_matrix(&[w], &Detunings::zero(), o2, o4, &s, true).unwrap();
            let res = chi_resonant(&[w], o2, o4, &s, true).unwrap();
            prop_assert!(rel(full.chi11[0], res.chi11[0]) < 1e-12);
            prop_assert!(rel(full.chi13[0], res.chi13[0]) < 1e-12);
            prop_assert!(rel(full.chi31[0], res.chi31[0]) < 1e-12);
            prop_assert!(rel(full.chi33[0], res.chi33[0]) < 1e-12);
            prop_assert!((full.chi13[0].norm() - full.chi31[0].norm()).abs() <= 1e-14 * full.chi13[0].norm());
        }
    }
}
