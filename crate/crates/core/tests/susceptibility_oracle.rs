//! Susceptibilities of the reference atom against 50-digit reference values
//! in `common`.

use dlambda::model::{reference_scheme, Detunings, DoubleLambda, PhysicalConstants, Signal};
use dlambda::susceptibility::{adiabatic_field_ratio, chi_adiabatic, chi_matrix, chi_resonant, default_omega_grid};
use num_complex::Complex64 as C64;

mod common;

use common::{OMEGA_EFF, REFERENCE};

fn setup() -> (DoubleLambda, C64, C64) {
    let k = PhysicalConstants::atomic();
    let sys = DoubleLambda::new(k, reference_scheme(&k).unwrap(), 3e-13, 1e7).unwrap();
    let o2 = sys.rabi_factor(Signal::One) * 1.2e-9;
    let o4 = sys.rabi_factor(Signal::Three) * 1.8e-9;
    (sys, o2, o4)
}

fn rel(a: C64, b: f64) -> f64 {
    (a - b).norm() / b.abs()
}

#[test]
fn effective_rabi_frequency() {
    let (_, o2, o4) = setup();
    let w = (o2.norm_sqr() + o4.norm_sqr()).sqrt();
    assert!((w - OMEGA_EFF).abs() / OMEGA_EFF < 1e-13, "{w:e}");
}

#[test]
fn matrix_entries_match_reference() {
    let (sys, o2, o4) = setup();
    let grid: Vec<f64> = REFERENCE.iter().map(|r| r.0).collect();
    let m = chi_matrix(&grid, &Detunings::zero(), o2, o4, &sys, true).unwrap();
    let r = chi_resonant(&grid, o2, o4, &sys, true).unwrap();
    for (i, &(w, c11, c13, _)) in REFERENCE.iter().enumerate() {
        assert!(!m.flagged[i]);
        assert!(rel(m.chi11[i], c11) < 1e-12, "chi11 at {w:e}: {} vs {c11:e}", m.chi11[i]);
        assert!(rel(m.chi13[i], c13) < 1e-12, "chi13 at {w:e}: {} vs {c13:e}", m.chi13[i]);
        assert!(rel(r.chi11[i], c11) < 1e-12, "resonant chi11 at {w:e}");
        assert!(rel(r.chi13[i], c13) < 1e-12, "resonant chi13 at {w:e}");
    }
}

#[test]
fn closed_form_matches_reference_combination() {
    let (sys, o2, o4) = setup();
    let grid: Vec<f64> = REFERENCE.iter().map(|r| r.0).collect();
    let adia = chi_adiabatic(&grid, o2, o4, &sys).unwrap();
    for (i, &(w, _, _, comb)) in REFERENCE.iter().enumerate() {
        assert!(rel(adia[i], comb) < 1e-12, "at {w:e}: {} vs {comb:e}", adia[i]);
    }
    assert_eq!(chi_adiabatic(&[0.0], o2, o4, &sys).unwrap()[0], C64::new(0.0, 0.0));
}

#[test]
fn f64_combination_tracks_closed_form() {
    // χ₁₁ and χ₁₃·ratio are each O(1/ω) and cancel; the f64 difference is
    // accurate relative to the size of the terms, not of the result.
    let (sys, o2, o4) = setup();
    let grid = default_omega_grid(OMEGA_EFF);
    let m = chi_matrix(&grid, &Detunings::zero(), o2, o4, &sys, false).unwrap();
    let ratio = adiabatic_field_ratio(&sys, o2, o4).unwrap();
    let comb = m.combined(ratio);
    let adia = chi_adiabatic(&grid, o2, o4, &sys).unwrap();
    for i in 0..grid.len() {
        if m.flagged[i] || !adia[i].is_finite() {
            continue;
        }
        let scale = m.chi11[i].norm() + (m.chi13[i] * ratio).norm();
        assert!((comb[i] - adia[i]).norm() / scale < 1e-12, "at {:e}", grid[i]);
    }
}
